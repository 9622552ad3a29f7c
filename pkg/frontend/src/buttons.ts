// The three toggle input routes: on-screen button grid (emulating the
// physical button box), per-layer eye icons, and number keys. All of them
// call the same ToggleState.toggle, so transitions are identical by
// construction.

import type { LayerDescriptor } from './api.js'
import { ToggleState } from './toggle.js'

const ICON_GLYPHS: Record<string, string> = {
    crime: '\u{1F6A8}',
    taxi: '\u{1F695}',
    weather: '\u{1F321}',
    transport: '\u{1F687}',
    favela: '\u{1F3D8}',
    census: '\u{1F4CA}',
    graph: '⬡',
    hotspot: '\u{1F525}',
    grid: '\u{1F7E9}',
}

export function glyphFor(icon: string): string {
    return ICON_GLYPHS[icon] ?? '■'
}

/** 3x3 grid of layer buttons, one per toggle key. */
export function buildButtonGrid(
    container: HTMLElement,
    layers: LayerDescriptor[],
    toggles: ToggleState,
): void {
    container.classList.add('button-grid')
    const buttons = new Map<number, HTMLButtonElement>()
    for (const layer of layers) {
        const btn = document.createElement('button')
        btn.className = 'deck-button'
        btn.innerHTML = `<span class="glyph">${glyphFor(layer.icon)}</span>` +
            `<span class="key">${layer.toggle_key}</span><span class="name">${layer.name}</span>`
        btn.title = `${layer.name} (key ${layer.toggle_key})`
        btn.addEventListener('click', () => toggles.toggle(layer.id, 'button'))
        container.appendChild(btn)
        buttons.set(layer.id, btn)
    }
    const sync = () => {
        for (const [id, btn] of buttons) btn.classList.toggle('active', toggles.isVisible(id))
    }
    toggles.onChange(sync)
    sync()
}

/** Sidebar rows with an eye icon per layer. */
export function buildLayerList(
    container: HTMLElement,
    layers: LayerDescriptor[],
    toggles: ToggleState,
): void {
    const eyes = new Map<number, HTMLButtonElement>()
    for (const layer of layers) {
        const row = document.createElement('div')
        row.className = 'layer-row'
        const eye = document.createElement('button')
        eye.className = 'eye'
        eye.addEventListener('click', () => toggles.toggle(layer.id, 'eye'))
        const label = document.createElement('span')
        label.textContent = `${layer.toggle_key} ${glyphFor(layer.icon)} ${layer.name}`
        const count = document.createElement('span')
        count.className = 'count'
        count.textContent = String(layer.record_count)
        row.append(eye, label, count)
        container.appendChild(row)
        eyes.set(layer.id, eye)
    }
    const sync = () => {
        for (const [id, eye] of eyes) {
            const on = toggles.isVisible(id)
            eye.textContent = on ? '\u{1F441}' : '—'
            eye.classList.toggle('active', on)
        }
    }
    toggles.onChange(sync)
    sync()
}

/** Digits 1-9 mirror the layer toggle keys; ignored while typing in a field. */
export function bindKeyboard(toggles: ToggleState, target: Document = document): void {
    target.addEventListener('keydown', (ev: Event) => {
        const e = ev as KeyboardEvent
        const el = e.target as HTMLElement | null
        if (el && (el.tagName === 'INPUT' || el.tagName === 'SELECT' || el.tagName === 'TEXTAREA')) return
        toggles.handleKey(e.key)
    })
}
