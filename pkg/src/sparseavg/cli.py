"""Command-line interface.

Subcommands: run, sweep, fit, predict, nilsearch, kernels.
Exit codes: 0 success, 2 invalid config, 3 capacity exceeded, 4 internal
error; nilsearch additionally uses 0 = obstruction found, 5 = none found.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import analysis, kernels
from .config import load_config
from .errors import CapacityError, ConfigError, ParameterError
from .presets import NILSEARCH_PRESETS, RUN_PRESETS, get_preset
from .runner import refit_csv, run_config, run_nilsearch

EXIT_OK = 0
EXIT_INVALID_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_INTERNAL = 4
EXIT_NO_OBSTRUCTION = 5


def _error_report(kind: str, exc: Exception):
    report = {"error": kind, "message": str(exc)}
    if isinstance(exc, ConfigError):
        report = exc.report()
    print(json.dumps(report, sort_keys=True), file=sys.stderr)


def _load(args) -> dict:
    if args.preset:
        try:
            cfg = get_preset(args.preset)
        except KeyError:
            raise ConfigError(
                f"unknown preset {args.preset!r}; available: "
                + ", ".join(sorted(list(RUN_PRESETS) + list(NILSEARCH_PRESETS))),
                "preset",
            )
    elif args.config:
        cfg = load_config(args.config)
    else:
        raise ConfigError("need --config PATH or --preset NAME", "")
    if args.seed is not None:
        cfg["seed"] = args.seed
    return cfg


def cmd_run(args, require_sweep=False) -> int:
    cfg = _load(args)
    if require_sweep and "sweep" not in cfg:
        raise ConfigError("sweep subcommand needs a config with a sweep block", "sweep")
    summary = run_config(cfg, args.out, threads=args.threads)
    for rec in summary["experiments"]:
        fit = rec["fit"]
        if fit is None:
            print(f"{rec['experiment_id']}: fit refused ({'; '.join(rec['flags'])})")
        else:
            pred = rec["prediction"].get("predicted_slope")
            pred_txt = "" if pred is None else f" (envelope slope {pred:+.4f})"
            print(
                f"{rec['experiment_id']}: fitted slope {fit['exponent']:+.4f} "
                f"+- {fit['half_width']:.4f}, residual {fit['residual_rms']:.3f}"
                f"{pred_txt}"
            )
    print(f"wrote {args.out}/results.csv and {args.out}/fit.json")
    return EXIT_OK


def cmd_fit(args) -> int:
    summary = refit_csv(args.results, args.out_file)
    for rec in summary["experiments"]:
        fit = rec["fit"]
        if fit is None:
            print(f"{rec['experiment_id']}: fit refused")
        else:
            print(f"{rec['experiment_id']}: fitted slope {fit['exponent']:+.4f}")
    return EXIT_OK


def cmd_predict(args) -> int:
    try:
        if args.what == "omega-critical":
            value = analysis.predict_omega_critical(args.d, args.gamma_prime)
        elif args.what == "delta":
            if args.R is None:
                raise ConfigError("predict delta needs --R", "R")
            value = analysis.choose_delta_annulus(args.d, args.gamma_prime, args.R)
        else:
            if args.alpha is None:
                raise ConfigError("predict br-rate needs --alpha", "alpha")
            value = analysis.predict_br_rate(args.d, args.alpha, args.gamma_prime)
            if args.alpha == -1.0:
                print(
                    "warning: alpha = -1 sits on the logarithmic singularity; "
                    "the smoothing error does not vanish and the rate is 0",
                    file=sys.stderr,
                )
    except ParameterError as exc:
        raise ConfigError(str(exc), args.what) from exc
    print(repr(value))
    return EXIT_OK


def cmd_nilsearch(args) -> int:
    cfg = _load(args)
    payload = run_nilsearch(cfg, args.out)
    rep = payload["report"]
    if rep["found"]:
        print(
            f"obstruction found: character {tuple(rep['character'])} with "
            f"frequency {rep['tau']:.6g} (threshold {rep['threshold']:.6g})"
        )
        return EXIT_OK
    print(
        f"no obstruction among {rep['n_scanned']} characters of height "
        f"<= {rep['height_bound']:.6g} (threshold {rep['threshold']:.6g})"
    )
    return EXIT_NO_OBSTRUCTION


def cmd_kernels(args) -> int:
    try:
        rk = kernels.RadialKernel(
            kind=args.kind,
            d=args.d,
            R=args.R,
            omega=args.omega,
            alpha=args.alpha,
            delta=args.delta,
        )
        radii = np.linspace(args.r_min, args.r_max, args.count)
        lines = ["kind,d,R,omega,alpha,delta,r,value"]
        for r in radii:
            v = rk(float(r))
            lines.append(
                ",".join(
                    [
                        args.kind,
                        str(args.d),
                        "" if args.R is None else repr(args.R),
                        "" if args.omega is None else repr(args.omega),
                        "" if args.alpha is None else repr(args.alpha),
                        "" if args.delta is None else repr(args.delta),
                        repr(float(r)),
                        repr(v),
                    ]
                )
            )
    except ParameterError as exc:
        raise ConfigError(str(exc), "kernels") from exc
    text = "\n".join(lines) + "\n"
    if args.out_file:
        with open(args.out_file, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out_file}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sparseavg",
        description="sparse averaging operators on homogeneous spaces: "
        "experiment runner, decay fits, predictions, obstruction search",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="path to a JSON experiment config")
        sp.add_argument("--preset", help="name of an in-repo preset")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="override config seed")
        sp.add_argument("--threads", type=int, default=1, help="worker threads")

    sp = sub.add_parser("run", help="run a config or preset, write results + fits")
    common(sp)
    sp = sub.add_parser("sweep", help="run a config with a parameter sweep block")
    common(sp)
    sp = sub.add_parser("nilsearch", help="horizontal-character obstruction search")
    common(sp)

    sp = sub.add_parser("fit", help="recompute decay fits from a results.csv")
    sp.add_argument("--results", required=True, help="path to results.csv")
    sp.add_argument("--out-file", default="fit.json", help="output JSON path")

    sp = sub.add_parser("predict", help="print proof-parameter predictions")
    sp.add_argument("what", choices=["omega-critical", "delta", "br-rate"])
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--gamma-prime", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--R", type=float, default=None)

    sp = sub.add_parser("kernels", help="tabulate kernel values as CSV")
    sp.add_argument("--kind", required=True,
                    choices=["ball", "sphere", "annulus", "bochner_riesz", "mollifier"])
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--r-min", type=float, default=0.0)
    sp.add_argument("--r-max", type=float, default=5.0)
    sp.add_argument("--count", type=int, default=51)
    sp.add_argument("--R", type=float, default=None)
    sp.add_argument("--omega", type=float, default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--delta", type=float, default=None)
    sp.add_argument("--out-file", default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "sweep":
            return cmd_run(args, require_sweep=True)
        if args.command == "fit":
            return cmd_fit(args)
        if args.command == "predict":
            return cmd_predict(args)
        if args.command == "nilsearch":
            return cmd_nilsearch(args)
        if args.command == "kernels":
            return cmd_kernels(args)
        raise RuntimeError(f"unknown command {args.command}")
    except ConfigError as exc:
        _error_report("invalid-config", exc)
        return EXIT_INVALID_CONFIG
    except CapacityError as exc:
        _error_report("capacity", exc)
        return EXIT_CAPACITY
    except Exception as exc:  # pragma: no cover - defensive
        _error_report("internal", exc)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
