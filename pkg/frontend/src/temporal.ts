// Temporal panel playback: a client loop that posts the current window to the
// step endpoint and renders whatever comes back. Direction reversal at the
// histogram ends happens server-side; the player just keeps stepping.

import type { WindowResponse, WindowState } from './api.js'

export type StepFn = (current: WindowState | null) => Promise<WindowResponse>

export class TemporalPlayer {
    window: WindowState | null = null
    lastCount = 0
    total = 0
    playing = false
    private timer: ReturnType<typeof setInterval> | null = null
    private stepping = false
    private listeners: Array<(resp: WindowResponse) => void> = []

    constructor(private stepFn: StepFn) {}

    onFrame(fn: (resp: WindowResponse) => void): void {
        this.listeners.push(fn)
    }

    reset(): void {
        this.pause()
        this.window = null
    }

    /** One animation frame: request the next window and apply it. */
    tick(): Promise<WindowResponse | null> {
        return this.step(() => true)
    }

    private async step(shouldApply: () => boolean): Promise<WindowResponse | null> {
        if (this.stepping) return null // never overlap requests
        this.stepping = true
        try {
            const resp = await this.stepFn(this.window)
            if (!shouldApply()) return null // e.g. paused while the request was in flight
            this.window = resp.window
            this.lastCount = resp.count
            this.total = resp.total
            for (const fn of this.listeners) fn(resp)
            return resp
        } finally {
            this.stepping = false
        }
    }

    play(frameMs = 600): void {
        if (this.playing) return
        this.playing = true
        const playingTick = () => void this.step(() => this.playing)
        playingTick()
        this.timer = setInterval(playingTick, frameMs)
    }

    pause(): void {
        this.playing = false
        if (this.timer !== null) {
            clearInterval(this.timer)
            this.timer = null
        }
    }
}
