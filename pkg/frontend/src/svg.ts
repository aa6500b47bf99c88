// Log-log decay panels as plain SVG strings: scatter of |value| against R,
// the fitted power law, predicted envelope lines and a residual annotation.
// Pure string building, so repeated renders are byte-identical.

import { DecayFit, Prediction, ResultRow } from "./schema"

export interface PanelOptions {
    title: string
    fit: DecayFit | null
    prediction: Prediction
    width?: number
    height?: number
}

const PALETTE = {
    points: "#1f4e79",
    fitted: "#c0392b",
    envelope: "#2e8b57",
    candidate: "#8860b0",
    grid: "#d8d8d8",
    text: "#222222",
}

function fmt(x: number): string {
    return x.toFixed(2)
}

function niceLogTicks(lo: number, hi: number): number[] {
    const ticks: number[] = []
    const start = Math.ceil(lo - 1e-9)
    for (let p = start; Math.pow(10, p) <= Math.pow(10, hi) * (1 + 1e-9); p++) {
        ticks.push(p)
    }
    return ticks
}

export function buildDecayPanel(rows: ResultRow[], opts: PanelOptions): string {
    const width = opts.width ?? 560
    const height = opts.height ?? 420
    const margin = { left: 62, right: 16, top: 34, bottom: 46 }
    const plotW = width - margin.left - margin.right
    const plotH = height - margin.top - margin.bottom

    const usable = rows.filter(r => r.abs > 0)
    if (usable.length === 0) {
        throw new Error(`experiment ${opts.title}: no positive magnitudes to plot`)
    }
    const xs = usable.map(r => Math.log10(r.R))
    const ys = usable.map(r => Math.log10(r.abs))
    const xLo = Math.min(...xs)
    const xHi = Math.max(...xs)
    const yLo = Math.min(...ys)
    const yHi = Math.max(...ys)
    const xPad = 0.04 * (xHi - xLo || 1)
    const yPad = 0.06 * (yHi - yLo || 1)
    const x0 = xLo - xPad, x1 = xHi + xPad
    const y0 = yLo - yPad, y1 = yHi + yPad

    const px = (x: number) => margin.left + ((x - x0) / (x1 - x0)) * plotW
    const py = (y: number) => margin.top + ((y1 - y) / (y1 - y0)) * plotH

    const parts: string[] = []
    parts.push(
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    )
    parts.push(`<rect width="${width}" height="${height}" fill="white"/>`)

    // grid and axis tick labels at decade powers
    for (const p of niceLogTicks(x0, x1)) {
        const gx = px(p)
        parts.push(`<line x1="${gx.toFixed(1)}" y1="${margin.top}" x2="${gx.toFixed(1)}" y2="${margin.top + plotH}" stroke="${PALETTE.grid}" stroke-width="1"/>`)
        parts.push(`<text x="${gx.toFixed(1)}" y="${margin.top + plotH + 18}" font-size="11" text-anchor="middle" fill="${PALETTE.text}">1e${p}</text>`)
    }
    for (const p of niceLogTicks(y0, y1)) {
        const gy = py(p)
        parts.push(`<line x1="${margin.left}" y1="${gy.toFixed(1)}" x2="${margin.left + plotW}" y2="${gy.toFixed(1)}" stroke="${PALETTE.grid}" stroke-width="1"/>`)
        parts.push(`<text x="${margin.left - 6}" y="${(gy + 4).toFixed(1)}" font-size="11" text-anchor="end" fill="${PALETTE.text}">1e${p}</text>`)
    }
    parts.push(`<rect x="${margin.left}" y="${margin.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#555" stroke-width="1"/>`)

    // axis titles and panel title
    parts.push(`<text x="${margin.left + plotW / 2}" y="${height - 10}" font-size="12" text-anchor="middle" fill="${PALETTE.text}">R</text>`)
    parts.push(`<text x="16" y="${margin.top + plotH / 2}" font-size="12" text-anchor="middle" fill="${PALETTE.text}" transform="rotate(-90 16 ${margin.top + plotH / 2})">|average|</text>`)
    parts.push(`<text x="${margin.left + plotW / 2}" y="20" font-size="13" font-weight="bold" text-anchor="middle" fill="${PALETTE.text}">${escapeXml(opts.title)}</text>`)

    // lines: fitted power law and predicted envelopes, anchored at the left
    const legend: string[] = []
    if (opts.fit) {
        const f = opts.fit
        const yAtX = (x: number) => (f.exponent * x * Math.LN10 + f.intercept) / Math.LN10
        parts.push(line(px(xLo), py(yAtX(xLo)), px(xHi), py(yAtX(xHi)), PALETTE.fitted, 1.8, undefined))
        legend.push(`<tspan fill="${PALETTE.fitted}">fitted slope ${fmt(f.exponent)}</tspan>`)
    }
    const anchorX = xLo
    const anchorY = opts.fit
        ? (opts.fit.exponent * xLo * Math.LN10 + opts.fit.intercept) / Math.LN10
        : ys[0]
    const pred = opts.prediction ?? {}
    if (typeof pred.predicted_slope === "number") {
        const s = pred.predicted_slope
        parts.push(line(px(anchorX), py(anchorY), px(xHi), py(anchorY + s * (xHi - anchorX)), PALETTE.envelope, 1.5, "6 4"))
        legend.push(`<tspan fill="${PALETTE.envelope}">envelope ${fmt(s)}</tspan>`)
    }
    if (Array.isArray(pred.candidate_slopes)) {
        for (const s of pred.candidate_slopes) {
            if (s === pred.predicted_slope) continue
            parts.push(line(px(anchorX), py(anchorY), px(xHi), py(anchorY + s * (xHi - anchorX)), PALETTE.candidate, 1.2, "2 4"))
            legend.push(`<tspan fill="${PALETTE.candidate}">candidate ${fmt(s)}</tspan>`)
        }
    }

    // scatter on top of the lines
    for (let i = 0; i < usable.length; i++) {
        parts.push(`<circle cx="${px(xs[i]).toFixed(1)}" cy="${py(ys[i]).toFixed(1)}" r="3.2" fill="${PALETTE.points}"/>`)
    }

    if (opts.fit) {
        legend.push(`<tspan fill="${PALETTE.text}">residual rms ${opts.fit.residual_rms.toFixed(3)}</tspan>`)
    } else {
        legend.push(`<tspan fill="${PALETTE.text}">fit refused</tspan>`)
    }
    parts.push(`<text x="${margin.left + 8}" y="${margin.top + 16}" font-size="12">${legend.join("  ")}</text>`)
    parts.push("</svg>")
    return parts.join("\n") + "\n"
}

function line(x1: number, y1: number, x2: number, y2: number, color: string, width: number, dash?: string): string {
    const d = dash ? ` stroke-dasharray="${dash}"` : ""
    return `<line x1="${x1.toFixed(1)}" y1="${y1.toFixed(1)}" x2="${x2.toFixed(1)}" y2="${y2.toFixed(1)}" stroke="${color}" stroke-width="${width}"${d}/>`
}

function escapeXml(s: string): string {
    return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;")
}

export function buildSmallMultiples(panels: string[], columns: number, panelW: number, panelH: number): string {
    const rows = Math.ceil(panels.length / columns)
    const width = columns * panelW
    const height = rows * panelH
    const parts = [
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    ]
    panels.forEach((panel, i) => {
        const cx = (i % columns) * panelW
        const cy = Math.floor(i / columns) * panelH
        const inner = panel
            .replace(/^<svg[^>]*>/, "")
            .replace(/<\/svg>\s*$/, "")
        parts.push(`<g transform="translate(${cx} ${cy})">`)
        parts.push(inner)
        parts.push("</g>")
    })
    parts.push("</svg>")
    return parts.join("\n") + "\n"
}
