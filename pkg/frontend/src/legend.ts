// Legend analytics: the 8x8 layer-correlation heatmap and the absolute
// Shapley bars (sorted descending, with the percentage total shown).

import type { CorrelationResponse, ShapleyResponse } from './api.js'

function divergingColor(v: number): string {
    // blue (-1) -> white (0) -> red (+1)
    const t = Math.max(-1, Math.min(1, v))
    if (t >= 0) {
        const s = Math.round(255 * (1 - t))
        return `rgb(255,${s},${s})`
    }
    const s = Math.round(255 * (1 + t))
    return `rgb(${s},${s},255)`
}

export function drawCorrelationHeatmap(canvas: HTMLCanvasElement, data: CorrelationResponse): void {
    const n = data.layers.length
    const labelSpace = 64
    const cell = 26
    canvas.width = labelSpace + n * cell + 8
    canvas.height = labelSpace + n * cell + 8
    const ctx = canvas.getContext('2d')!
    ctx.fillStyle = '#1b2026'
    ctx.fillRect(0, 0, canvas.width, canvas.height)
    ctx.font = '10px sans-serif'
    for (let i = 0; i < n; i++) {
        for (let j = 0; j < n; j++) {
            ctx.fillStyle = divergingColor(data.reduced[i][j])
            ctx.fillRect(labelSpace + j * cell, labelSpace + i * cell, cell - 1, cell - 1)
        }
    }
    ctx.fillStyle = '#dee2e6'
    for (let i = 0; i < n; i++) {
        const name = data.layers[i]
        ctx.save()
        ctx.translate(labelSpace + i * cell + cell / 2 + 3, labelSpace - 4)
        ctx.rotate(-Math.PI / 4)
        ctx.fillText(name, 0, 0)
        ctx.restore()
        ctx.fillText(name, 2, labelSpace + i * cell + cell / 2 + 3)
    }
}

export function renderShapleyBars(container: HTMLElement, data: ShapleyResponse): void {
    container.innerHTML = ''
    const entries = Object.entries(data.layer_percentages).sort((a, b) => b[1] - a[1])
    const maxPct = entries.length ? entries[0][1] : 0
    for (const [layer, pct] of entries) {
        const row = document.createElement('div')
        row.className = 'shap-row'
        const label = document.createElement('span')
        label.className = 'shap-label'
        label.textContent = layer
        const barBox = document.createElement('div')
        barBox.className = 'shap-bar-box'
        const bar = document.createElement('div')
        bar.className = 'shap-bar'
        bar.style.width = maxPct > 0 ? `${(pct / maxPct) * 100}%` : '0%'
        barBox.appendChild(bar)
        const value = document.createElement('span')
        value.className = 'shap-value'
        value.textContent = `${pct.toFixed(1)}%`
        row.append(label, barBox, value)
        container.appendChild(row)
    }
    const total = document.createElement('div')
    total.className = 'shap-total'
    const sum = entries.reduce((acc, [, v]) => acc + v, 0)
    total.textContent = `attribution total: ${sum.toFixed(0)}% of |mean Shapley| (${data.method}, n=${data.sample_size})`
    container.appendChild(total)
}
