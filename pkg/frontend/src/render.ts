// render_decay: read a sparseavg output directory (results.csv + fit.json),
// validate that the experiment ids agree across the two inputs, and write
// one SVG decay panel per experiment (plus a small-multiples sheet when a
// sweep produced several experiments).

import * as fs from "fs"
import * as path from "path"

import { FitRecord, groupByExperiment, parseFitJson, parseResultsCsv } from "./schema"
import { buildDecayPanel, buildSmallMultiples } from "./svg"

export interface PlotSpec {
    resultsCsv: string
    fitJson: string
    outDir: string
    title?: string
}

export interface RenderedImage {
    experimentId: string
    path: string
    slopeLabel: string | null
}

function readFileOrThrow(p: string): string {
    if (!fs.existsSync(p)) {
        throw new Error(`input file not found: ${p}`)
    }
    return fs.readFileSync(p, "utf8")
}

function safeName(id: string): string {
    return id.replace(/[^A-Za-z0-9._-]+/g, "_")
}

export function renderDecay(spec: PlotSpec): RenderedImage[] {
    const rows = parseResultsCsv(readFileOrThrow(spec.resultsCsv))
    const summary = parseFitJson(readFileOrThrow(spec.fitJson))

    const groups = groupByExperiment(rows)
    const fitIds = new Set(summary.experiments.map(r => r.experiment_id))
    const csvIds = new Set(groups.keys())
    for (const id of csvIds) {
        if (!fitIds.has(id)) {
            throw new Error(`experiment id mismatch: ${id} present in CSV but not in fit.json`)
        }
    }
    for (const id of fitIds) {
        if (!csvIds.has(id)) {
            throw new Error(`experiment id mismatch: ${id} present in fit.json but not in CSV`)
        }
    }

    fs.mkdirSync(spec.outDir, { recursive: true })
    const images: RenderedImage[] = []
    const panels: string[] = []
    for (const rec of summary.experiments) {
        const data = groups.get(rec.experiment_id)!
        const panel = buildDecayPanel(data, {
            title: spec.title ? `${spec.title}: ${rec.experiment_id}` : rec.experiment_id,
            fit: rec.fit,
            prediction: rec.prediction ?? {},
        })
        panels.push(panel)
        const out = path.join(spec.outDir, `${safeName(rec.experiment_id)}.svg`)
        fs.writeFileSync(out, panel)
        images.push({
            experimentId: rec.experiment_id,
            path: out,
            slopeLabel: rec.fit ? rec.fit.exponent.toFixed(2) : null,
        })
    }
    if (panels.length > 1) {
        const sheet = buildSmallMultiples(panels, Math.min(panels.length, 3), 560, 420)
        const out = path.join(spec.outDir, "small-multiples.svg")
        fs.writeFileSync(out, sheet)
    }
    return images
}

export function renderDirectory(inDir: string, outDir: string): RenderedImage[] {
    return renderDecay({
        resultsCsv: path.join(inDir, "results.csv"),
        fitJson: path.join(inDir, "fit.json"),
        outDir,
    })
}

export { FitRecord }
