// Spatial lens state: pointer-follow requests with throttling and stale
// response discarding (monotonic request ids), so a slow old answer can never
// overwrite a newer one.

import type { LensResult } from './api.js'

export interface LensAnswer {
    radiusM: number
    members: Set<number>
    k: number
}

type LensFetch = (layer: number, lat: number, lon: number, k: number) => Promise<LensResult>

export class LensController {
    k = 100
    layerId: number | null = null
    private requestId = 0
    private appliedId = 0
    private lastIssued = Number.NEGATIVE_INFINITY
    private answer: LensAnswer | null = null
    private listeners: Array<(a: LensAnswer | null) => void> = []

    constructor(
        private fetchLens: LensFetch,
        private minIntervalMs = 16, // <= 60 Hz request rate
        private now: () => number = () => Date.now(),
    ) {}

    get current(): LensAnswer | null {
        return this.answer
    }

    onAnswer(fn: (a: LensAnswer | null) => void): void {
        this.listeners.push(fn)
    }

    setLayer(layerId: number | null): void {
        this.layerId = layerId
        this.clear()
    }

    clear(): void {
        this.answer = null
        for (const fn of this.listeners) fn(null)
    }

    /** Pointer moved; returns false when throttled or inactive. */
    async onPointer(lat: number, lon: number): Promise<boolean> {
        if (this.layerId === null) return false
        const t = this.now()
        if (t - this.lastIssued < this.minIntervalMs) return false
        this.lastIssued = t
        const id = ++this.requestId
        let result: LensResult
        try {
            result = await this.fetchLens(this.layerId, lat, lon, this.k)
        } catch {
            if (id > this.appliedId) this.clear()
            return false
        }
        if (id <= this.appliedId) return false // a newer answer already landed
        this.appliedId = id
        this.answer = { radiusM: result.radius_m, members: new Set(result.members), k: this.k }
        for (const fn of this.listeners) fn(this.answer)
        return true
    }
}
