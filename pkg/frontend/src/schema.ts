// Documented output schemas of the sparseavg CLI.
//
// results.csv: experiment_id,R,re,im,abs,err,seconds (one row per radius)
// fit.json:    { experiments: [ { experiment_id, fit: {...} | null,
//                prediction: {...}, ... } ] }

export interface ResultRow {
    experimentId: string
    R: number
    re: number
    im: number
    abs: number
    err: number
    seconds: number
}

export interface DecayFit {
    exponent: number
    intercept: number
    residual_rms: number
    half_width: number
    n_used: number
    flags: string[]
}

export interface Prediction {
    envelope_exponent?: number | null
    predicted_slope?: number | null
    candidate_slopes?: number[]
    gamma_prime?: number
    omega_critical?: number
    delta_at_R_max?: number
    br_rate?: number
}

export interface FitRecord {
    experiment_id: string
    family?: string
    fit: DecayFit | null
    flags: string[]
    prediction: Prediction
    n_points?: number
}

export interface FitSummary {
    experiments: FitRecord[]
}

export const CSV_HEADER = "experiment_id,R,re,im,abs,err,seconds"

export function parseResultsCsv(text: string): ResultRow[] {
    const lines = text.split(/\r?\n/).filter(line => line.trim().length > 0)
    if (lines.length === 0) {
        throw new Error("results.csv is empty")
    }
    if (lines[0].trim() !== CSV_HEADER) {
        throw new Error(`results.csv has unexpected header: ${lines[0]}`)
    }
    if (lines.length === 1) {
        throw new Error("results.csv contains no data rows")
    }
    const rows: ResultRow[] = []
    for (const line of lines.slice(1)) {
        const parts = line.split(",")
        if (parts.length !== 7) {
            throw new Error(`malformed CSV row: ${line}`)
        }
        const nums = parts.slice(1).map(Number)
        if (nums.some(v => Number.isNaN(v))) {
            throw new Error(`non-numeric CSV row: ${line}`)
        }
        rows.push({
            experimentId: parts[0],
            R: nums[0],
            re: nums[1],
            im: nums[2],
            abs: nums[3],
            err: nums[4],
            seconds: nums[5],
        })
    }
    return rows
}

export function parseFitJson(text: string): FitSummary {
    let data: unknown
    try {
        data = JSON.parse(text)
    } catch (err) {
        throw new Error(`fit.json is not valid JSON: ${err}`)
    }
    const summary = data as FitSummary
    if (!summary || !Array.isArray(summary.experiments)) {
        throw new Error("fit.json is missing the experiments array")
    }
    for (const rec of summary.experiments) {
        if (typeof rec.experiment_id !== "string") {
            throw new Error("fit.json record without experiment_id")
        }
    }
    return summary
}

export function groupByExperiment(rows: ResultRow[]): Map<string, ResultRow[]> {
    const groups = new Map<string, ResultRow[]>()
    for (const row of rows) {
        const list = groups.get(row.experimentId)
        if (list) {
            list.push(row)
        } else {
            groups.set(row.experimentId, [row])
        }
    }
    for (const list of groups.values()) {
        list.sort((a, b) => a.R - b.R)
    }
    return groups
}
