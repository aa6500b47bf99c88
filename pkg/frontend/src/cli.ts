// sparseavg-plots render --in DIR --out DIR
//
// DIR must contain results.csv and fit.json as written by `sparseavg run`;
// writes one SVG per experiment into the output directory.  Exits nonzero
// with a message on missing, empty or mismatched inputs.

import { renderDirectory } from "./render"

function parseArgs(argv: string[]): { inDir: string; outDir: string } {
    if (argv[0] !== "render") {
        throw new Error("usage: render --in DIR --out DIR")
    }
    let inDir: string | null = null
    let outDir: string | null = null
    for (let i = 1; i < argv.length; i += 2) {
        const flag = argv[i]
        const value = argv[i + 1]
        if (value === undefined) {
            throw new Error(`missing value for ${flag}`)
        }
        if (flag === "--in") inDir = value
        else if (flag === "--out") outDir = value
        else throw new Error(`unknown flag ${flag}`)
    }
    if (!inDir || !outDir) {
        throw new Error("usage: render --in DIR --out DIR")
    }
    return { inDir, outDir }
}

function main(): number {
    try {
        const { inDir, outDir } = parseArgs(process.argv.slice(2))
        const images = renderDirectory(inDir, outDir)
        for (const img of images) {
            const label = img.slopeLabel === null ? "fit refused" : `slope ${img.slopeLabel}`
            console.log(`${img.experimentId}: ${img.path} (${label})`)
        }
        return 0
    } catch (err) {
        console.error(`render failed: ${err instanceof Error ? err.message : err}`)
        return 1
    }
}

process.exitCode = main()
