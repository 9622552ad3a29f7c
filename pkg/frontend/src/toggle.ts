// Layer visibility state. Every input route (digit key, eye icon, on-screen
// button) funnels into the same toggle() so their transitions are identical.

export type ToggleSource = 'key' | 'eye' | 'button'

export interface ToggleChange {
    layerId: number
    visible: boolean
    source: ToggleSource
}

export class ToggleState {
    private visible = new Map<number, boolean>()
    private keyToLayer = new Map<string, number>()
    private drawOrder: number[]
    private listeners: Array<(change: ToggleChange) => void> = []

    constructor(layers: Array<{ id: number; toggle_key: string }>, initiallyVisible: number[] = []) {
        this.drawOrder = layers.map((l) => l.id)
        for (const layer of layers) {
            this.visible.set(layer.id, initiallyVisible.includes(layer.id))
            this.keyToLayer.set(layer.toggle_key, layer.id)
        }
    }

    isVisible(layerId: number): boolean {
        return this.visible.get(layerId) ?? false
    }

    /** Flip one layer; other layers' flags and the draw order never change. */
    toggle(layerId: number, source: ToggleSource = 'button'): boolean {
        if (!this.visible.has(layerId)) return false
        const next = !this.visible.get(layerId)
        this.visible.set(layerId, next)
        for (const fn of this.listeners) fn({ layerId, visible: next, source })
        return next
    }

    /** Digit-key route; unknown keys are ignored. */
    handleKey(key: string): boolean {
        const layerId = this.keyToLayer.get(key)
        if (layerId === undefined) return false
        this.toggle(layerId, 'key')
        return true
    }

    /** Visible layer ids in stable draw order. */
    visibleLayers(): number[] {
        return this.drawOrder.filter((id) => this.visible.get(id))
    }

    snapshot(): Record<number, boolean> {
        const out: Record<number, boolean> = {}
        for (const [id, v] of this.visible) out[id] = v
        return out
    }

    onChange(fn: (change: ToggleChange) => void): void {
        this.listeners.push(fn)
    }
}
