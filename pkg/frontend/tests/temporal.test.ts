import { describe, expect, it } from 'vitest'

import type { WindowResponse, WindowState } from '../src/api.js'
import { TemporalPlayer } from '../src/temporal.js'

// Server-side stepping rule reimplemented as a test fixture: advance the
// leading edge, shrink the trailing edge while the target still holds, flip
// direction at the ends before moving.
function makeServer(counts: number[], target: number) {
    const total = counts.reduce((a, b) => a + b, 0)
    const sum = (lo: number, hi: number) => counts.slice(lo, hi + 1).reduce((a, b) => a + b, 0)
    const effective = Math.min(target, total)
    return async (current: WindowState | null): Promise<WindowResponse> => {
        let window: WindowState
        if (current === null) {
            let hi = 0
            while (sum(0, hi) < effective && hi < counts.length - 1) hi++
            window = { lo: 0, hi, direction: 'forward', target }
        } else {
            let { lo, hi } = current
            let direction = current.direction
            if (direction === 'forward' && hi === counts.length - 1) direction = 'backward'
            else if (direction === 'backward' && lo === 0) direction = 'forward'
            if (direction === 'forward') {
                if (hi < counts.length - 1) hi++
                while (lo < hi && sum(lo + 1, hi) >= effective) lo++
            } else {
                if (lo > 0) lo--
                while (hi > lo && sum(lo, hi - 1) >= effective) hi--
            }
            window = { lo, hi, direction, target }
        }
        return {
            layer: 1,
            granularity: 'month',
            window,
            count: sum(window.lo, window.hi),
            total,
        }
    }
}

describe('TemporalPlayer', () => {
    it('ping-pongs at the histogram end and keeps the target every frame', async () => {
        const player = new TemporalPlayer(makeServer([5, 3, 2, 4], 6))
        const frames: Array<[number, number, string]> = []
        player.onFrame((r) => frames.push([r.window.lo, r.window.hi, r.window.direction]))
        for (let i = 0; i < 6; i++) {
            const resp = await player.tick()
            expect(resp!.count).toBeGreaterThanOrEqual(Math.min(6, resp!.total))
        }
        expect(frames).toEqual([
            [0, 1, 'forward'],
            [0, 2, 'forward'],
            [2, 3, 'forward'],
            [1, 3, 'backward'], // reversed at the last bin
            [0, 1, 'backward'],
            [0, 2, 'forward'], // reversed again at the first bin
        ])
    })

    it('pause freezes the window', async () => {
        const player = new TemporalPlayer(makeServer([2, 2, 2], 2))
        await player.tick()
        const frozen = player.window
        player.play(5)
        player.pause()
        const after = player.window
        await new Promise((resolve) => setTimeout(resolve, 30))
        expect(player.window).toEqual(after)
        expect(player.playing).toBe(false)
        expect(frozen).not.toBeNull()
    })

    it('never overlaps in-flight step requests', async () => {
        let inFlight = 0
        let maxInFlight = 0
        const server = makeServer([1, 1, 1, 1], 2)
        const player = new TemporalPlayer(async (w) => {
            inFlight++
            maxInFlight = Math.max(maxInFlight, inFlight)
            await new Promise((resolve) => setTimeout(resolve, 10))
            const resp = await server(w)
            inFlight--
            return resp
        })
        await Promise.all([player.tick(), player.tick(), player.tick()])
        expect(maxInFlight).toBe(1)
    })

    it('reset returns to the initial window on the next tick', async () => {
        const player = new TemporalPlayer(makeServer([5, 3, 2, 4], 6))
        await player.tick()
        await player.tick()
        player.reset()
        const resp = await player.tick()
        expect([resp!.window.lo, resp!.window.hi]).toEqual([0, 1])
    })
})
