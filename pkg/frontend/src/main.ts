// Boot and wiring: fetch the layer roster, set up toggling (keys, eyes,
// button grid), the map canvas, both lenses, and the legend analytics.

import { ApiClient, ApiRequestError, Histogram, LayerDescriptor, WindowState } from './api.js'
import { bindKeyboard, buildButtonGrid, buildLayerList } from './buttons.js'
import { drawCorrelationHeatmap, renderShapleyBars } from './legend.js'
import { LensController } from './lens.js'
import { MapCanvas, RecordPredicate } from './map.js'
import { TemporalPlayer } from './temporal.js'
import { ToggleState } from './toggle.js'
import { ViewTransform } from './view.js'

const WEEKDAYS = ['Mon', 'Tue', 'Wed', 'Thu', 'Fri', 'Sat', 'Sun']

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id)
    if (!node) throw new Error(`missing element #${id}`)
    return node as T
}

function toast(message: string): void {
    const box = el<HTMLDivElement>('toast')
    box.textContent = message
    box.classList.add('show')
    setTimeout(() => box.classList.remove('show'), 2500)
}

function binOf(record: any, layerName: string, granularity: string): number {
    if (layerName === 'taxi_trips') {
        if (granularity === 'month') return record.month - 1
        return WEEKDAYS.indexOf(record.weekday)
    }
    const ts: string = record.timestamp
    if (granularity === 'month') return +ts.slice(5, 7) - 1
    if (granularity === 'hour') return +ts.slice(11, 13)
    const day = new Date(ts).getDay() // JS: 0 = Sunday
    return (day + 6) % 7
}

async function boot(): Promise<void> {
    const apiBase = new URLSearchParams(location.search).get('api') ?? ''
    const api = new ApiClient(apiBase)

    let layers: LayerDescriptor[]
    try {
        layers = await api.layers()
    } catch (err) {
        toast(`cannot reach the urbanlens API: ${err}`)
        return
    }

    const toggles = new ToggleState(layers, [1])
    const canvas = el<HTMLCanvasElement>('map')
    canvas.width = canvas.clientWidth
    canvas.height = canvas.clientHeight
    const view = new ViewTransform(0, 0, 1, canvas.width, canvas.height)
    const map = new MapCanvas(canvas, view, toggles)

    // frame the city using the street graph extent
    const nodes = await api.graphNodes()
    if (nodes.nodes.length) {
        const lats = nodes.nodes.map((n) => n.lat)
        const lons = nodes.nodes.map((n) => n.lon)
        view.originLat = (Math.min(...lats) + Math.max(...lats)) / 2
        view.originLon = (Math.min(...lons) + Math.max(...lons)) / 2
        view.fitBounds(Math.min(...lats), Math.min(...lons), Math.max(...lats), Math.max(...lons))
    }
    map.setLayerData(7, { descriptor: layers[6], records: nodes.nodes })

    const loading = new Set<number>()
    async function ensureLayerData(layerId: number): Promise<void> {
        if (map.hasData(layerId) || loading.has(layerId)) return
        loading.add(layerId)
        try {
            if (layerId === 9) {
                map.setGrid(await api.grid())
            } else {
                const data = await api.features(layerId)
                map.setLayerData(layerId, { descriptor: layers[layerId - 1], records: data.records })
            }
        } catch (err) {
            if (err instanceof ApiRequestError) toast(err.body.message)
            else toast(String(err))
        } finally {
            loading.delete(layerId)
        }
    }

    toggles.onChange((change) => {
        if (change.visible) void ensureLayerData(change.layerId)
    })
    void ensureLayerData(1)

    buildLayerList(el('layer-list'), layers, toggles)
    buildButtonGrid(el('button-grid'), layers, toggles)
    bindKeyboard(toggles)

    // --- pan / zoom -----------------------------------------------------
    let dragging = false
    let lastX = 0
    let lastY = 0
    canvas.addEventListener('pointerdown', (e) => {
        dragging = true
        lastX = e.offsetX
        lastY = e.offsetY
    })
    window.addEventListener('pointerup', () => (dragging = false))
    canvas.addEventListener('wheel', (e) => {
        e.preventDefault()
        view.zoomBy(e.deltaY < 0 ? 1.15 : 1 / 1.15, e.offsetX, e.offsetY)
        map.viewChanged()
    })

    // --- spatial lens -----------------------------------------------------
    const lens = new LensController((layer, lat, lon, k) => api.lens(layer, lat, lon, k))
    const lensLayerSelect = el<HTMLSelectElement>('lens-layer')
    for (const layer of layers) {
        if (layer.kind === 'polygon') continue
        const opt = document.createElement('option')
        opt.value = String(layer.id)
        opt.textContent = layer.name
        lensLayerSelect.appendChild(opt)
    }
    const lensToggle = el<HTMLInputElement>('lens-active')
    const kSlider = el<HTMLInputElement>('lens-k')
    const kValue = el<HTMLSpanElement>('lens-k-value')
    kSlider.value = '100'
    kValue.textContent = '100'
    kSlider.addEventListener('input', () => {
        lens.k = +kSlider.value
        kValue.textContent = kSlider.value
    })
    const syncLensLayer = () => {
        lens.setLayer(lensToggle.checked ? +lensLayerSelect.value : null)
        if (!lensToggle.checked) map.setLens(null, null, null)
    }
    lensToggle.addEventListener('change', syncLensLayer)
    lensLayerSelect.addEventListener('change', syncLensLayer)

    let cursor = { x: 0, y: 0 }
    canvas.addEventListener('pointermove', (e) => {
        if (dragging) {
            view.panByPixels(e.offsetX - lastX, e.offsetY - lastY)
            lastX = e.offsetX
            lastY = e.offsetY
            map.viewChanged()
            return
        }
        cursor = { x: e.offsetX, y: e.offsetY }
        if (lensToggle.checked && lens.layerId !== null) {
            const pos = view.fromScreen(cursor.x, cursor.y)
            void lens.onPointer(pos.lat, pos.lon)
        }
        const cell = map.gridCellAt(e.offsetX, e.offsetY)
        const tip = el<HTMLDivElement>('tooltip')
        if (cell) {
            tip.style.display = 'block'
            tip.style.left = `${e.offsetX + 14}px`
            tip.style.top = `${e.offsetY + 14}px`
            tip.textContent = `cell (${cell.ix},${cell.iy}): ${cell.success} success / ${cell.failure} failure`
        } else {
            tip.style.display = 'none'
        }
    })
    lens.onAnswer((answer) => {
        if (answer === null) map.setLens(null, null, null)
        else map.setLens(lens.layerId, answer, cursor)
    })

    // --- temporal lens ----------------------------------------------------
    const tLayerSelect = el<HTMLSelectElement>('temporal-layer')
    const tGranularity = el<HTMLSelectElement>('temporal-granularity')
    const tMode = el<HTMLSelectElement>('temporal-mode')
    const tValue = el<HTMLInputElement>('temporal-value')
    const tPlay = el<HTMLButtonElement>('temporal-play')
    const tStatus = el<HTMLSpanElement>('temporal-status')
    const histCanvas = el<HTMLCanvasElement>('temporal-hist')
    let histogram: Histogram | null = null

    const player = new TemporalPlayer((current: WindowState | null) =>
        api.windowStep(+tLayerSelect.value, tGranularity.value, tMode.value as 'count' | 'density', +tValue.value, current),
    )

    function drawHistogram(): void {
        const ctx = histCanvas.getContext('2d')!
        histCanvas.width = histCanvas.clientWidth
        histCanvas.height = 90
        ctx.fillStyle = '#1b2026'
        ctx.fillRect(0, 0, histCanvas.width, histCanvas.height)
        if (!histogram) return
        const n = histogram.counts.length
        const w = histCanvas.width / n
        const peak = Math.max(1, ...histogram.counts)
        for (let i = 0; i < n; i++) {
            const h = (histogram.counts[i] / peak) * (histCanvas.height - 14)
            const inWindow = player.window !== null && i >= player.window.lo && i <= player.window.hi
            ctx.fillStyle = inWindow ? '#fab005' : '#495057'
            ctx.fillRect(i * w + 1, histCanvas.height - h - 12, w - 2, h)
        }
        ctx.fillStyle = '#adb5bd'
        ctx.font = '9px sans-serif'
        ctx.fillText('0', 2, histCanvas.height - 2)
        ctx.fillText(String(n - 1), histCanvas.width - 14, histCanvas.height - 2)
    }

    async function reloadHistogram(): Promise<void> {
        player.reset()
        map.setTemporalFilter(+tLayerSelect.value, null)
        tPlay.textContent = 'play'
        try {
            histogram = await api.histogram(+tLayerSelect.value, tGranularity.value)
            tStatus.textContent = `${histogram.total} records`
            tPlay.disabled = false
        } catch (err) {
            histogram = null
            tPlay.disabled = true
            tStatus.textContent = err instanceof ApiRequestError ? err.body.message : String(err)
        }
        drawHistogram()
    }

    player.onFrame((resp) => {
        const layerId = +tLayerSelect.value
        const layerName = layers[layerId - 1].name
        const { lo, hi } = resp.window
        const predicate: RecordPredicate = (r) => {
            const bin = binOf(r, layerName, resp.granularity)
            return bin >= lo && bin <= hi
        }
        map.setTemporalFilter(layerId, predicate)
        tStatus.textContent = `bins [${lo}..${hi}] ${resp.window.direction}, ${resp.count} of ${resp.total} shown`
        drawHistogram()
    })

    tPlay.addEventListener('click', () => {
        if (player.playing) {
            player.pause()
            tPlay.textContent = 'play'
        } else {
            void ensureLayerData(+tLayerSelect.value)
            player.play(600)
            tPlay.textContent = 'pause'
        }
    })
    for (const control of [tLayerSelect, tGranularity, tMode, tValue]) {
        control.addEventListener('change', () => void reloadHistogram())
    }
    await reloadHistogram()

    // --- legend -------------------------------------------------------------
    try {
        drawCorrelationHeatmap(el<HTMLCanvasElement>('legend-correlation'), await api.correlation())
    } catch (err) {
        el('legend-correlation-box').textContent =
            err instanceof ApiRequestError ? err.body.message : String(err)
    }
    try {
        renderShapleyBars(el('legend-shapley'), await api.shapley())
    } catch (err) {
        el('legend-shapley').textContent =
            err instanceof ApiRequestError ? err.body.message : String(err)
    }
}

void boot()
