// Typed client for the urbanlens HTTP API.

export interface LayerDescriptor {
    id: number
    name: string
    kind: 'point' | 'arc' | 'polygon'
    record_count: number
    toggle_key: string
    icon: string
}

export interface LensResult {
    layer: number
    k: number
    radius_m: number
    members: number[]
}

export interface Histogram {
    layer: number
    granularity: string
    counts: number[]
    cumulative: number[]
    total: number
}

export interface WindowState {
    lo: number
    hi: number
    direction: 'forward' | 'backward'
    target: number
}

export interface WindowResponse {
    layer: number
    granularity: string
    window: WindowState
    count: number
    total: number
}

export interface GridCell {
    ix: number
    iy: number
    success: number
    failure: number
    bounds: { min_lat: number; min_lon: number; max_lat: number; max_lon: number }
}

export interface GridResponse {
    cell_m: number
    nx: number
    ny: number
    total_success: number
    total_failure: number
    cells: GridCell[]
}

export interface CorrelationResponse {
    layers: string[]
    reduced: number[][]
    feature_names: string[]
    full: number[][]
}

export interface ShapleyResponse {
    feature_names: string[]
    assignment: string[]
    mean_abs: number[]
    percentages: number[]
    layer_totals: Record<string, number>
    layer_percentages: Record<string, number>
    sample_size: number
    method: string
}

export interface GraphNode {
    id: number
    lat: number
    lon: number
    node_class: string
    degree: number
}

export interface ApiError {
    code: string
    message: string
    parameter?: string | null
}

export class ApiRequestError extends Error {
    constructor(public status: number, public body: ApiError) {
        super(body.message)
    }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>

export class ApiClient {
    constructor(
        private base: string,
        private fetchFn: FetchLike = (url, init) => fetch(url, init),
    ) {}

    private async get<T>(path: string): Promise<T> {
        const resp = await this.fetchFn(this.base + path)
        if (!resp.ok) throw new ApiRequestError(resp.status, await resp.json())
        return resp.json() as Promise<T>
    }

    layers(): Promise<LayerDescriptor[]> {
        return this.get('/api/layers')
    }

    features(layerId: number): Promise<{ layer: number; count: number; records: any[] }> {
        return this.get(`/api/layers/${layerId}/features`)
    }

    lens(layer: number, lat: number, lon: number, k: number): Promise<LensResult> {
        return this.get(`/api/lens/spatial?layer=${layer}&lon=${lon}&lat=${lat}&k=${k}`)
    }

    histogram(layer: number, granularity: string): Promise<Histogram> {
        return this.get(`/api/temporal/${layer}/histogram?granularity=${granularity}`)
    }

    async windowStep(
        layer: number,
        granularity: string,
        mode: 'count' | 'density',
        value: number,
        current: WindowState | null,
    ): Promise<WindowResponse> {
        const resp = await this.fetchFn(this.base + '/api/temporal/window', {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify({ layer, granularity, mode, value, window: current }),
        })
        if (!resp.ok) throw new ApiRequestError(resp.status, await resp.json())
        return resp.json()
    }

    grid(): Promise<GridResponse> {
        return this.get('/api/prediction/grid')
    }

    correlation(): Promise<CorrelationResponse> {
        return this.get('/api/analytics/correlation')
    }

    shapley(): Promise<ShapleyResponse> {
        return this.get('/api/analytics/shapley')
    }

    graphNodes(): Promise<{ count: number; nodes: GraphNode[] }> {
        return this.get('/api/graph/nodes')
    }
}
