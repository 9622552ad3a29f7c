// Canvas map renderer. Each layer draws into an offscreen canvas that is only
// re-rendered when its data, the view, or its temporal filter changes; a
// toggle merely recomposites the cached bitmaps, so visibility flips stay
// within one animation frame even with tens of thousands of points.

import type { GridResponse, LayerDescriptor } from './api.js'
import type { LensAnswer } from './lens.js'
import { ToggleState } from './toggle.js'
import { ViewTransform } from './view.js'

export interface LayerData {
    descriptor: LayerDescriptor
    records: any[]
}

const CRIME_COLORS: Record<string, string> = {
    vehicle_theft: '#e03131',
    phone_theft: '#1971c2',
}

const TRANSPORT_COLORS: Record<string, string> = {
    bus_stop: '#2f9e44',
    terminal: '#0b7285',
    subway: '#9c36b5',
    train: '#e8590c',
}

const NODE_CLASS_COLORS: Record<string, string> = {
    dead_end: '#e03131',
    near_dead_end: '#f08c00',
    regular: '#74c0fc',
}

export type RecordPredicate = (record: any) => boolean

export class MapCanvas {
    private ctx: CanvasRenderingContext2D
    private layerData = new Map<number, LayerData>()
    private grid: GridResponse | null = null
    private offscreen = new Map<number, HTMLCanvasElement>()
    private dirty = new Set<number>()
    private temporalFilter: { layerId: number; predicate: RecordPredicate } | null = null
    private lens: { answer: LensAnswer; layerId: number; cursor: { x: number; y: number } } | null = null
    private renderQueued = false

    constructor(
        private canvas: HTMLCanvasElement,
        public view: ViewTransform,
        private toggles: ToggleState,
    ) {
        const ctx = canvas.getContext('2d')
        if (!ctx) throw new Error('canvas 2d context unavailable')
        this.ctx = ctx
        toggles.onChange(() => this.requestRender())
    }

    setLayerData(layerId: number, data: LayerData): void {
        this.layerData.set(layerId, data)
        this.dirty.add(layerId)
        this.requestRender()
    }

    setGrid(grid: GridResponse): void {
        this.grid = grid
        this.dirty.add(9)
        this.requestRender()
    }

    hasData(layerId: number): boolean {
        return this.layerData.has(layerId) || (layerId === 9 && this.grid !== null)
    }

    gridCellAt(px: number, py: number) {
        if (!this.grid || !this.toggles.isVisible(9)) return null
        const pos = this.view.fromScreen(px, py)
        for (const cell of this.grid.cells) {
            const b = cell.bounds
            if (pos.lat >= b.min_lat && pos.lat <= b.max_lat && pos.lon >= b.min_lon && pos.lon <= b.max_lon) {
                return cell
            }
        }
        return null
    }

    setTemporalFilter(layerId: number, predicate: RecordPredicate | null): void {
        if (predicate === null) {
            if (this.temporalFilter) this.dirty.add(this.temporalFilter.layerId)
            this.temporalFilter = null
        } else {
            if (this.temporalFilter && this.temporalFilter.layerId !== layerId) {
                this.dirty.add(this.temporalFilter.layerId)
            }
            this.temporalFilter = { layerId, predicate }
            this.dirty.add(layerId)
        }
        this.requestRender()
    }

    setLens(layerId: number | null, answer: LensAnswer | null, cursor: { x: number; y: number } | null): void {
        this.lens = layerId !== null && answer !== null && cursor !== null
            ? { answer, layerId, cursor }
            : null
        this.requestRender()
    }

    viewChanged(): void {
        for (const id of this.layerData.keys()) this.dirty.add(id)
        if (this.grid) this.dirty.add(9)
        this.requestRender()
    }

    requestRender(): void {
        if (this.renderQueued) return
        this.renderQueued = true
        requestAnimationFrame(() => {
            this.renderQueued = false
            this.render()
        })
    }

    private render(): void {
        const { width, height } = this.canvas
        this.ctx.fillStyle = '#11151a'
        this.ctx.fillRect(0, 0, width, height)
        for (const layerId of this.toggles.visibleLayers()) {
            if (this.lens && this.lens.layerId === layerId) continue // drawn live below
            const off = this.layerCanvas(layerId)
            if (off) this.ctx.drawImage(off, 0, 0)
        }
        if (this.lens) this.renderLensLayer()
    }

    private layerCanvas(layerId: number): HTMLCanvasElement | null {
        if (layerId === 9) {
            if (!this.grid) return null
        } else if (!this.layerData.has(layerId)) {
            return null
        }
        let off = this.offscreen.get(layerId)
        if (!off) {
            off = document.createElement('canvas')
            this.offscreen.set(layerId, off)
            this.dirty.add(layerId)
        }
        if (this.dirty.has(layerId)) {
            off.width = this.canvas.width
            off.height = this.canvas.height
            const ctx = off.getContext('2d')!
            this.drawLayer(ctx, layerId)
            this.dirty.delete(layerId)
        }
        return off
    }

    private filtered(layerId: number, records: any[]): any[] {
        if (this.temporalFilter && this.temporalFilter.layerId === layerId) {
            return records.filter(this.temporalFilter.predicate)
        }
        return records
    }

    private drawLayer(ctx: CanvasRenderingContext2D, layerId: number): void {
        if (layerId === 9) {
            this.drawGrid(ctx)
            return
        }
        const data = this.layerData.get(layerId)
        if (!data) return
        const records = this.filtered(layerId, data.records)
        switch (data.descriptor.name) {
            case 'crime':
                this.drawPoints(ctx, records, (r) => CRIME_COLORS[r.category] ?? '#fab005', 2)
                break
            case 'taxi_trips':
                this.drawArcs(ctx, records)
                break
            case 'weather':
                this.drawPoints(ctx, records, () => '#ffd43b', 6)
                break
            case 'public_transport':
                this.drawPoints(ctx, records, (r) => TRANSPORT_COLORS[r.category] ?? '#868e96', 3)
                break
            case 'favelas':
                this.drawPolygons(ctx, records, 'rgba(255,146,43,0.45)', '#ff922b')
                break
            case 'socioeconomic':
                this.drawChoropleth(ctx, records)
                break
            case 'graph':
                this.drawPoints(ctx, records, (r) => NODE_CLASS_COLORS[r.node_class] ?? '#ced4da', 2)
                break
            case 'hotspots':
                this.drawHotspots(ctx, records)
                break
        }
    }

    private drawPoints(
        ctx: CanvasRenderingContext2D,
        records: any[],
        color: (r: any) => string,
        size: number,
        alpha = 1,
    ): void {
        ctx.globalAlpha = alpha
        for (const r of records) {
            const p = this.view.toScreen(r.lat, r.lon)
            if (p.x < -size || p.y < -size || p.x > this.canvas.width + size || p.y > this.canvas.height + size) continue
            ctx.fillStyle = color(r)
            ctx.fillRect(p.x - size / 2, p.y - size / 2, size, size)
        }
        ctx.globalAlpha = 1
    }

    private drawArcs(ctx: CanvasRenderingContext2D, records: any[]): void {
        for (const r of records) {
            const a = this.view.toScreen(r.origin[0], r.origin[1])
            const b = this.view.toScreen(r.dest[0], r.dest[1])
            const occurrence = r.label === 'occurrence'
            ctx.strokeStyle = occurrence ? 'rgba(250,82,82,0.85)' : 'rgba(134,142,150,0.14)'
            ctx.lineWidth = occurrence ? 1.6 : 0.7
            // quadratic arc bowed perpendicular to the chord
            const mx = (a.x + b.x) / 2
            const my = (a.y + b.y) / 2
            const dx = b.x - a.x
            const dy = b.y - a.y
            const len = Math.hypot(dx, dy) || 1
            const bow = Math.min(40, len * 0.18)
            ctx.beginPath()
            ctx.moveTo(a.x, a.y)
            ctx.quadraticCurveTo(mx - (dy / len) * bow, my + (dx / len) * bow, b.x, b.y)
            ctx.stroke()
        }
    }

    private drawPolygons(ctx: CanvasRenderingContext2D, records: any[], fill: string, stroke: string): void {
        ctx.fillStyle = fill
        ctx.strokeStyle = stroke
        ctx.lineWidth = 1
        for (const r of records) {
            for (const ring of r.rings) {
                ctx.beginPath()
                for (let i = 0; i < ring.length; i++) {
                    const p = this.view.toScreen(ring[i][0], ring[i][1])
                    if (i === 0) ctx.moveTo(p.x, p.y)
                    else ctx.lineTo(p.x, p.y)
                }
                ctx.closePath()
                ctx.fill()
                ctx.stroke()
            }
        }
    }

    private drawChoropleth(ctx: CanvasRenderingContext2D, records: any[]): void {
        const incomes = records.map((r) => r.properties.income as number)
        const lo = Math.min(...incomes)
        const hi = Math.max(...incomes)
        for (const r of records) {
            const t = hi > lo ? (r.properties.income - lo) / (hi - lo) : 0.5
            ctx.fillStyle = `rgba(${Math.round(46 + 30 * (1 - t))},${Math.round(110 + 110 * t)},70,0.45)`
            ctx.strokeStyle = 'rgba(255,255,255,0.25)'
            for (const ring of r.rings) {
                ctx.beginPath()
                for (let i = 0; i < ring.length; i++) {
                    const p = this.view.toScreen(ring[i][0], ring[i][1])
                    if (i === 0) ctx.moveTo(p.x, p.y)
                    else ctx.lineTo(p.x, p.y)
                }
                ctx.closePath()
                ctx.fill()
                ctx.stroke()
            }
        }
    }

    private drawHotspots(ctx: CanvasRenderingContext2D, records: any[]): void {
        for (const r of records) {
            const p = this.view.toScreen(r.lat, r.lon)
            const radius = 4 + Math.min(10, Math.sqrt(r.count))
            ctx.beginPath()
            ctx.arc(p.x, p.y, radius, 0, Math.PI * 2)
            ctx.fillStyle = 'rgba(224,49,49,0.35)'
            ctx.fill()
            ctx.strokeStyle = '#e03131'
            ctx.stroke()
        }
    }

    private drawGrid(ctx: CanvasRenderingContext2D): void {
        if (!this.grid) return
        for (const cell of this.grid.cells) {
            const total = cell.success + cell.failure
            if (total === 0) continue
            const ratio = cell.success / total
            const a = this.view.toScreen(cell.bounds.max_lat, cell.bounds.min_lon)
            const b = this.view.toScreen(cell.bounds.min_lat, cell.bounds.max_lon)
            ctx.fillStyle = `rgba(${Math.round(224 * (1 - ratio))},${Math.round(190 * ratio)},60,0.55)`
            ctx.fillRect(a.x, a.y, b.x - a.x, b.y - a.y)
        }
    }

    /** Lens-active layer: members at full opacity, the rest dimmed, plus the brush circle. */
    private renderLensLayer(): void {
        const lens = this.lens!
        const data = this.layerData.get(lens.layerId)
        if (!data) return
        const ctx = this.ctx
        const members = lens.answer.members
        const records = this.filtered(lens.layerId, data.records)
        if (data.descriptor.kind === 'arc') {
            this.drawArcs(ctx, records.filter((r) => members.has(r.id)))
        } else {
            const color = data.descriptor.name === 'crime'
                ? (r: any) => CRIME_COLORS[r.category] ?? '#fab005'
                : () => '#ffd43b'
            this.drawPoints(ctx, records.filter((r) => !members.has(r.id)), color, 2, 0.15)
            this.drawPoints(ctx, records.filter((r) => members.has(r.id)), color, 3, 1)
        }
        const radiusPx = this.view.metersToPixels(lens.answer.radiusM)
        ctx.beginPath()
        ctx.arc(lens.cursor.x, lens.cursor.y, radiusPx, 0, Math.PI * 2)
        ctx.strokeStyle = '#ffffff'
        ctx.lineWidth = 1.5
        ctx.stroke()
    }
}
