// Screen <-> geographic mapping. Same equirectangular projection the server
// uses, anchored at a fixed origin so meter distances translate to pixels by
// one multiplication: px = meters * pixelsPerMeter.

const EARTH_RADIUS_M = 6_371_000
const DEG = Math.PI / 180

export interface ScreenPoint {
    x: number
    y: number
}

export class ViewTransform {
    /** Meters east/north of the projection origin at the canvas center. */
    centerX = 0
    centerY = 0

    constructor(
        public originLat: number,
        public originLon: number,
        public pixelsPerMeter: number,
        public width: number,
        public height: number,
    ) {}

    projectMeters(lat: number, lon: number): { x: number; y: number } {
        const k = EARTH_RADIUS_M * DEG
        return {
            x: k * (lon - this.originLon) * Math.cos(this.originLat * DEG),
            y: k * (lat - this.originLat),
        }
    }

    unprojectMeters(x: number, y: number): { lat: number; lon: number } {
        const k = EARTH_RADIUS_M * DEG
        return {
            lat: this.originLat + y / k,
            lon: this.originLon + x / (k * Math.cos(this.originLat * DEG)),
        }
    }

    toScreen(lat: number, lon: number): ScreenPoint {
        const m = this.projectMeters(lat, lon)
        return {
            x: this.width / 2 + (m.x - this.centerX) * this.pixelsPerMeter,
            y: this.height / 2 - (m.y - this.centerY) * this.pixelsPerMeter,
        }
    }

    fromScreen(px: number, py: number): { lat: number; lon: number } {
        const x = this.centerX + (px - this.width / 2) / this.pixelsPerMeter
        const y = this.centerY - (py - this.height / 2) / this.pixelsPerMeter
        return this.unprojectMeters(x, y)
    }

    metersToPixels(meters: number): number {
        return meters * this.pixelsPerMeter
    }

    panByPixels(dx: number, dy: number): void {
        this.centerX -= dx / this.pixelsPerMeter
        this.centerY += dy / this.pixelsPerMeter
    }

    /** Zoom keeping the given screen point fixed. */
    zoomBy(factor: number, anchorX: number, anchorY: number): void {
        const before = this.fromScreen(anchorX, anchorY)
        this.pixelsPerMeter *= factor
        const after = this.toScreen(before.lat, before.lon)
        this.panByPixels(anchorX - after.x, anchorY - after.y)
    }

    /** Fit a lat/lon bounding box with a padding fraction. */
    fitBounds(minLat: number, minLon: number, maxLat: number, maxLon: number, pad = 0.08): void {
        const a = this.projectMeters(minLat, minLon)
        const b = this.projectMeters(maxLat, maxLon)
        this.centerX = (a.x + b.x) / 2
        this.centerY = (a.y + b.y) / 2
        const spanX = Math.max(1, Math.abs(b.x - a.x)) * (1 + 2 * pad)
        const spanY = Math.max(1, Math.abs(b.y - a.y)) * (1 + 2 * pad)
        this.pixelsPerMeter = Math.min(this.width / spanX, this.height / spanY)
    }
}
