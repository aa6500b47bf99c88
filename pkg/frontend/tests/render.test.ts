// Rendering against the checked-in preset fixtures (real sparseavg outputs)
// and the failure contracts: empty input, mismatched experiment ids.

import { execFileSync } from "child_process"
import * as fs from "fs"
import * as os from "os"
import * as path from "path"
import { describe, expect, it } from "vitest"

import { parseFitJson, parseResultsCsv, CSV_HEADER } from "../src/schema"
import { renderDecay, renderDirectory } from "../src/render"

const FIXTURES = path.join(__dirname, "..", "fixtures")
const PRESETS = fs.readdirSync(FIXTURES).filter(name =>
    fs.existsSync(path.join(FIXTURES, name, "results.csv")))

function tmpdir(): string {
    return fs.mkdtempSync(path.join(os.tmpdir(), "sparseavg-plots-"))
}

describe("schema parsing", () => {
    it("parses every fixture results.csv and fit.json", () => {
        for (const preset of PRESETS) {
            const rows = parseResultsCsv(
                fs.readFileSync(path.join(FIXTURES, preset, "results.csv"), "utf8"))
            expect(rows.length).toBeGreaterThanOrEqual(6)
            const fits = parseFitJson(
                fs.readFileSync(path.join(FIXTURES, preset, "fit.json"), "utf8"))
            expect(fits.experiments.length).toBeGreaterThanOrEqual(1)
        }
    })

    it("rejects empty and header-only CSV", () => {
        expect(() => parseResultsCsv("")).toThrow(/empty/)
        expect(() => parseResultsCsv(CSV_HEADER + "\n")).toThrow(/no data rows/)
    })

    it("rejects malformed JSON", () => {
        expect(() => parseFitJson("{not json")).toThrow(/not valid JSON/)
        expect(() => parseFitJson("{}")).toThrow(/experiments/)
    })
})

describe("renderDecay on all presets", () => {
    it("writes one image per experiment with the fitted-slope label equal to fit.json (2 decimals)", () => {
        for (const preset of PRESETS) {
            const out = tmpdir()
            const images = renderDirectory(path.join(FIXTURES, preset), out)
            const fits = parseFitJson(
                fs.readFileSync(path.join(FIXTURES, preset, "fit.json"), "utf8"))
            expect(images.length).toBe(fits.experiments.length)
            for (const rec of fits.experiments) {
                const img = images.find(i => i.experimentId === rec.experiment_id)
                expect(img).toBeDefined()
                const svg = fs.readFileSync(img!.path, "utf8")
                expect(svg.startsWith("<svg")).toBe(true)
                if (rec.fit) {
                    const label = rec.fit.exponent.toFixed(2)
                    expect(img!.slopeLabel).toBe(label)
                    expect(svg).toContain(`fitted slope ${label}`)
                } else {
                    expect(svg).toContain("fit refused")
                }
            }
        }
    })

    it("renders envelope and candidate overlay labels when predicted", () => {
        const out = tmpdir()
        renderDirectory(path.join(FIXTURES, "torus-circle-decay"), out)
        const svg = fs.readFileSync(path.join(out, "torus-circle-decay.svg"), "utf8")
        expect(svg).toContain("envelope -0.50")

        const out2 = tmpdir()
        renderDirectory(path.join(FIXTURES, "heisenberg-abelian-decay"), out2)
        const svg2 = fs.readFileSync(
            path.join(out2, "heisenberg-abelian-decay.svg"), "utf8")
        expect(svg2).toContain("candidate -1.50")
    })

    it("writes a small-multiples sheet for sweep outputs", () => {
        const out = tmpdir()
        const images = renderDirectory(path.join(FIXTURES, "br-alpha-sweep"), out)
        expect(images.length).toBe(3)
        expect(fs.existsSync(path.join(out, "small-multiples.svg"))).toBe(true)
    })

    it("is deterministic: repeated renders are byte-identical", () => {
        const a = tmpdir()
        const b = tmpdir()
        renderDirectory(path.join(FIXTURES, "torus-circle-decay"), a)
        renderDirectory(path.join(FIXTURES, "torus-circle-decay"), b)
        const fa = fs.readFileSync(path.join(a, "torus-circle-decay.svg"))
        const fb = fs.readFileSync(path.join(b, "torus-circle-decay.svg"))
        expect(fa.equals(fb)).toBe(true)
    })
})

describe("failure contracts", () => {
    it("fails cleanly on an empty results.csv", () => {
        const dir = tmpdir()
        fs.writeFileSync(path.join(dir, "results.csv"), "")
        fs.writeFileSync(path.join(dir, "fit.json"), JSON.stringify({ experiments: [] }))
        expect(() => renderDirectory(dir, tmpdir())).toThrow(/empty/)
    })

    it("fails on missing inputs", () => {
        expect(() => renderDirectory(tmpdir(), tmpdir())).toThrow(/not found/)
    })

    it("refuses mismatched experiment ids across inputs", () => {
        const dir = tmpdir()
        const src = path.join(FIXTURES, "torus-circle-decay")
        fs.copyFileSync(path.join(src, "results.csv"), path.join(dir, "results.csv"))
        const fit = parseFitJson(fs.readFileSync(path.join(src, "fit.json"), "utf8"))
        fit.experiments[0].experiment_id = "someone-else"
        fs.writeFileSync(path.join(dir, "fit.json"), JSON.stringify(fit))
        expect(() => renderDirectory(dir, tmpdir())).toThrow(/mismatch/)
    })

    it("renderDecay accepts explicit file paths", () => {
        const src = path.join(FIXTURES, "annulus-decay")
        const out = tmpdir()
        const images = renderDecay({
            resultsCsv: path.join(src, "results.csv"),
            fitJson: path.join(src, "fit.json"),
            outDir: out,
            title: "annulus",
        })
        expect(images.length).toBe(1)
        const svg = fs.readFileSync(images[0].path, "utf8")
        expect(svg).toContain("annulus: annulus-decay")
    })
})

describe("command line", () => {
    const cliPath = path.join(__dirname, "..", "dist", "cli.js")
    const haveBuild = fs.existsSync(cliPath)

    it.skipIf(!haveBuild)("renders a directory and reports slope labels", () => {
        const out = tmpdir()
        const stdout = execFileSync(
            "node",
            [cliPath, "render", "--in", path.join(FIXTURES, "torus-circle-decay"), "--out", out],
            { encoding: "utf8" })
        expect(stdout).toMatch(/torus-circle-decay: .*\.svg \(slope -0\.51\)/)
    })

    it.skipIf(!haveBuild)("exits nonzero on empty input", () => {
        const dir = tmpdir()
        fs.writeFileSync(path.join(dir, "results.csv"), "")
        fs.writeFileSync(path.join(dir, "fit.json"), JSON.stringify({ experiments: [] }))
        let failed = false
        try {
            execFileSync("node", [cliPath, "render", "--in", dir, "--out", tmpdir()],
                { encoding: "utf8", stdio: "pipe" })
        } catch (err: any) {
            failed = true
            expect(String(err.stderr)).toContain("render failed")
        }
        expect(failed).toBe(true)
    })
})
