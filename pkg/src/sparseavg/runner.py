"""Experiment runner: executes validated configs, writes CSV/JSON artifacts.

Outputs are deterministic given the config (seeds included): floats are
written with repr (shortest round-trip), JSON keys are sorted, and the
wall-time column is zeroed unless the config opts into timing.
"""

from __future__ import annotations

import copy
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analysis, kernels
from .averages import AverageSpec, evaluate
from .config import (
    build_base_point,
    build_observable,
    build_space,
    r_grid,
    scheme_for,
    validate_nilsearch_config,
    validate_run_config,
)
from .errors import FitRefusedError
from .nilsearch import obstruction_search
from .spaces import HeisenbergProductSpace

CSV_HEADER = "experiment_id,R,re,im,abs,err,seconds"


def expand_sweep(cfg: dict) -> list[dict]:
    """One config per sweep value; ids get a ':field=value' suffix."""
    sweep = cfg.get("sweep")
    if not sweep:
        return [cfg]
    _, _, field = str(sweep["path"]).partition(".")
    out = []
    for v in sweep["values"]:
        sub = copy.deepcopy(cfg)
        del sub["sweep"]
        sub["average"][field] = v
        sub["experiment_id"] = f"{cfg['experiment_id']}:{field}={v:g}"
        out.append(sub)
    return out


def _average_spec(avg_cfg: dict, R: float, seed: int) -> AverageSpec:
    beta = avg_cfg.get("beta")
    if beta is None and avg_cfg["family"] == "tangent_patch":
        beta = 0.5  # default patch-size exponent; swept by configs when needed
    return AverageSpec(
        family=avg_cfg["family"],
        R=R,
        omega=avg_cfg.get("omega"),
        alpha=avg_cfg.get("alpha"),
        beta=beta,
        delta=float(avg_cfg.get("delta", 0.0)),
        direction=tuple(avg_cfg["direction"]) if "direction" in avg_cfg else None,
        scheme=scheme_for(avg_cfg, R, seed),
    )


def _evaluate_point(space, f, x, avg_cfg, peak_cfg, R, seed):
    """Average at nominal radius R, optionally scanning for the local
    oscillation maximum inside half a period around R."""
    if not peak_cfg:
        res = evaluate(space, f, x, _average_spec(avg_cfg, R, seed))
        return res.value, res.error
    period = float(peak_cfg["period"])
    points = int(peak_cfg.get("points", 17))
    radii = R + np.linspace(-0.5 * period, 0.5 * period, points)
    radii = radii[radii > 0.25 * period]
    best_val, best_err, best_mag = 0.0 + 0.0j, 0.0, -1.0
    for r in radii:
        res = evaluate(space, f, x, _average_spec(avg_cfg, float(r), seed))
        if abs(res.value) > best_mag:
            best_mag, best_val, best_err = abs(res.value), res.value, res.error
    return best_val, best_err


@dataclass
class ExperimentOutput:
    experiment_id: str
    rows: list
    fit_record: dict


def _envelope_exponent(family: str, d: int, alpha) -> float | None:
    if family == "sphere" and d >= 2:
        return kernels.kernel_envelope("sphere", d)[0]
    if family == "ball":
        return kernels.kernel_envelope("ball", d)[0]
    if family == "annulus" and d >= 2:
        return kernels.kernel_envelope("annulus", d)[0]
    if family == "bochner_riesz":
        return kernels.kernel_envelope("bochner_riesz", d, alpha=alpha)[0]
    return None


def run_experiment(cfg: dict, threads: int = 1) -> ExperimentOutput:
    eid = cfg["experiment_id"]
    seed = int(cfg.get("seed", 0))
    space = build_space(cfg["space"])
    x = build_base_point(space, cfg.get("base_point", {}), seed)
    f = build_observable(space, cfg["observable"], seed)
    avg_cfg = cfg["average"]
    peak_cfg = cfg.get("peak_scan")
    radii = r_grid(cfg["r_grid"])
    timing = bool(cfg.get("timing", False))

    def work(R):
        t0 = time.perf_counter()
        value, err = _evaluate_point(space, f, x, avg_cfg, peak_cfg, float(R), seed)
        dt = time.perf_counter() - t0
        return value, err, (dt if timing else 0.0)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, radii))
    else:
        results = [work(R) for R in radii]

    rows = [
        (eid, float(R), v.real, v.imag, abs(v), e, dt)
        for R, (v, e, dt) in zip(radii, results)
    ]

    mags = np.array([abs(v) for v, _, _ in results])
    errs = np.array([e for _, e, _ in results])
    flags = []
    fit_block = None
    fitted_exponent = None
    try:
        fit = analysis.decay_fit(
            analysis.DecaySeries(radii, mags.astype(complex), errs)
        )
        fitted_exponent = fit.exponent
        fit_block = {
            "exponent": fit.exponent,
            "intercept": fit.intercept,
            "residual_rms": fit.residual_rms,
            "half_width": fit.half_width,
            "n_used": fit.n_used,
            "flags": list(fit.flags),
        }
        flags.extend(fit.flags)
    except FitRefusedError as exc:
        flags.append(f"fit-refused: {exc}")

    d = space.flow_dim
    family = avg_cfg["family"]
    alpha = avg_cfg.get("alpha")
    # the kernel envelope predicts the decay only for character observables
    # (the average then factorizes through the kernel)
    if cfg["observable"]["kind"] in ("character", "trig", "nilcharacter"):
        envelope = _envelope_exponent(family, d, alpha)
    else:
        envelope = None
    prediction = {
        "envelope_exponent": envelope,
        "predicted_slope": None if envelope is None else -envelope,
    }
    if isinstance(space, HeisenbergProductSpace) and family == "sphere":
        # measured exponent is reported against both candidate envelopes
        prediction["candidate_slopes"] = [-(d - 1) / 2.0, -(d + 1) / 2.0]
    gp_cfg = cfg.get("prediction", {}).get("gamma_prime")
    gamma_prime = None
    if gp_cfg == "fit":
        if fitted_exponent is not None and fitted_exponent < 0:
            gamma_prime = -fitted_exponent
            prediction["gamma_prime_source"] = "fit"
    elif gp_cfg is not None:
        gamma_prime = float(gp_cfg)
        prediction["gamma_prime_source"] = "config"
    if gamma_prime is not None:
        prediction["gamma_prime"] = gamma_prime
        if d >= 2:
            prediction["omega_critical"] = analysis.predict_omega_critical(d, gamma_prime)
            prediction["delta_at_R_max"] = analysis.choose_delta_annulus(
                d, gamma_prime, float(radii[-1])
            )
        if family == "bochner_riesz":
            prediction["br_rate"] = analysis.predict_br_rate(d, alpha, gamma_prime)

    record = {
        "experiment_id": eid,
        "family": family,
        "space": cfg["space"]["kind"],
        "flow_dim": d,
        "params": {
            k: avg_cfg[k] for k in ("omega", "alpha", "beta", "delta") if k in avg_cfg
        },
        "n_points": len(radii),
        "fit": fit_block,
        "flags": flags,
        "prediction": prediction,
        "r_values": [float(R) for R in radii],
        "magnitudes": [float(m) for m in mags],
    }
    return ExperimentOutput(eid, rows, record)


def format_csv(rows) -> str:
    lines = [CSV_HEADER]
    for eid, R, re, im, mag, err, dt in rows:
        lines.append(
            f"{eid},{R!r},{re!r},{im!r},{mag!r},{err!r},{dt!r}"
        )
    return "\n".join(lines) + "\n"


def run_config(cfg: dict, out_dir: str, threads: int = 1) -> dict:
    """Run (possibly sweeping) config; write results.csv and fit.json."""
    validate_run_config(cfg)
    os.makedirs(out_dir, exist_ok=True)
    outputs = [run_experiment(sub, threads) for sub in expand_sweep(cfg)]
    rows = [row for out in outputs for row in out.rows]
    with open(os.path.join(out_dir, "results.csv"), "w", encoding="utf-8") as fh:
        fh.write(format_csv(rows))
    summary = {"experiments": [out.fit_record for out in outputs]}
    with open(os.path.join(out_dir, "fit.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def run_nilsearch(cfg: dict, out_dir: str) -> dict:
    validate_nilsearch_config(cfg)
    os.makedirs(out_dir, exist_ok=True)
    space = build_space(cfg["space"])
    x = build_base_point(space, cfg.get("base_point", {}), int(cfg.get("seed", 0)))
    report = obstruction_search(
        space,
        x,
        delta=float(cfg["delta"]),
        C1=float(cfg["C1"]),
        C2=float(cfg["C2"]),
        R=float(cfg["R"]),
    )
    payload = {"experiment_id": cfg["experiment_id"], "report": report.to_jsonable()}
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return payload


def refit_csv(csv_path: str, out_path: str) -> dict:
    """Recompute decay fits from a results.csv (fit subcommand)."""
    groups: dict = {}
    with open(csv_path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise FitRefusedError(f"unexpected CSV header: {header}")
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) != 7:
                continue
            eid = parts[0]
            groups.setdefault(eid, []).append(
                (float(parts[1]), float(parts[4]), float(parts[5]))
            )
    records = []
    for eid, pts in groups.items():
        pts.sort()
        R = np.array([p[0] for p in pts])
        mags = np.array([p[1] for p in pts], dtype=complex)
        errs = np.array([p[2] for p in pts])
        rec = {"experiment_id": eid, "n_points": len(pts), "fit": None, "flags": []}
        try:
            fit = analysis.decay_fit(analysis.DecaySeries(R, mags, errs))
            rec["fit"] = {
                "exponent": fit.exponent,
                "intercept": fit.intercept,
                "residual_rms": fit.residual_rms,
                "half_width": fit.half_width,
                "n_used": fit.n_used,
                "flags": list(fit.flags),
            }
        except FitRefusedError as exc:
            rec["flags"].append(f"fit-refused: {exc}")
        records.append(rec)
    summary = {"experiments": sorted(records, key=lambda r: r["experiment_id"])}
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
