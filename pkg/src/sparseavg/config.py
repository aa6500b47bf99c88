"""Experiment configuration: JSON schema, validation, object construction.

A config is a plain JSON object (round-trips losslessly).  All parameter
ranges are validated before any computation; failures raise ConfigError
with the offending field path, which the CLI turns into exit code 2 and a
machine-readable report.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import ConfigError, ParameterError
from .observables import (
    BumpObservable,
    NilCharacter,
    ProductObservable,
    RadialBumpObservable,
    TrigPolynomial,
)
from .quadrature import SCHEME_KINDS, QuadratureScheme
from .spaces import (
    HeisenbergProductSpace,
    ModularProductSpace,
    TorusSpace,
    point_from_jsonable,
)

AVERAGE_FAMILIES = ("ball", "sphere", "annulus", "bochner_riesz", "tangent_patch")


def _need(cfg: dict, field: str, path: str):
    if field not in cfg:
        raise ConfigError(f"missing required field {path}.{field}", f"{path}.{field}")
    return cfg[field]


def _num(cfg, field, path, lo=None, hi=None, lo_open=False, hi_open=False):
    v = _need(cfg, field, path)
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
        raise ConfigError(f"{path}.{field} must be a finite number", f"{path}.{field}")
    if lo is not None and (v <= lo if lo_open else v < lo):
        raise ConfigError(f"{path}.{field} = {v} out of range", f"{path}.{field}")
    if hi is not None and (v >= hi if hi_open else v > hi):
        raise ConfigError(f"{path}.{field} = {v} out of range", f"{path}.{field}")
    return v


def build_space(cfg: dict):
    kind = _need(cfg, "kind", "space")
    try:
        if kind == "torus":
            n = int(_num(cfg, "n", "space", lo=1))
            action = cfg.get("action")
            return TorusSpace(n, None if action is None else np.asarray(action, float))
        if kind == "heisenberg":
            flows = _need(cfg, "flows", "space")
            return HeisenbergProductSpace(
                tuple(tuple(f) for f in flows), minimal=bool(cfg.get("minimal", False))
            )
        if kind == "modular":
            return ModularProductSpace(int(_num(cfg, "factors", "space", lo=1)))
    except (ParameterError, ValueError, TypeError) as exc:
        raise ConfigError(f"space: {exc}", "space") from exc
    raise ConfigError(f"unknown space kind {kind!r}", "space.kind")


def build_base_point(space, cfg: dict, default_seed: int):
    kind = cfg.get("kind", "haar")
    if kind == "haar":
        seed = int(cfg.get("seed", default_seed))
        return space.haar_sample(np.random.default_rng(seed))
    if kind == "explicit":
        coords = _need(cfg, "coords", "base_point")
        try:
            return space.reduce(point_from_jsonable(space, coords))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"base_point: {exc}", "base_point.coords") from exc
    raise ConfigError(f"unknown base point kind {kind!r}", "base_point.kind")


def build_observable(space, cfg: dict, default_seed: int):
    kind = _need(cfg, "kind", "observable")
    try:
        if kind == "character":
            freq = tuple(int(k) for k in _need(cfg, "frequency", "observable"))
            return TrigPolynomial(space, {freq: 1.0})
        if kind == "trig":
            terms = {}
            for t in _need(cfg, "terms", "observable"):
                freq = tuple(int(k) for k in t["frequency"])
                terms[freq] = complex(t.get("re", 0.0), t.get("im", 0.0))
            return TrigPolynomial(space, terms)
        if kind == "nilcharacter":
            return NilCharacter(
                space, _need(cfg, "type", "observable"), _need(cfg, "frequency", "observable")
            )
        if kind == "bump":
            return BumpObservable(
                space,
                center=_num(cfg, "center", "observable", lo=0, lo_open=True),
                width=_num(cfg, "width", "observable", lo=0, lo_open=True),
                factor=int(cfg.get("factor", 0)),
                centered=bool(cfg.get("centered", False)),
                mc_samples=int(cfg.get("mc_samples", 200_000)),
                seed=int(cfg.get("mc_seed", default_seed + 1)),
            )
        if kind == "product_bump":
            parts = [
                BumpObservable(
                    space,
                    center=_num(cfg, "center", "observable", lo=0, lo_open=True),
                    width=_num(cfg, "width", "observable", lo=0, lo_open=True),
                    factor=i,
                    centered=bool(cfg.get("centered", True)),
                    mc_samples=int(cfg.get("mc_samples", 200_000)),
                    seed=int(cfg.get("mc_seed", default_seed + 1)) + i,
                )
                for i in range(space.d)
            ]
            return ProductObservable(parts)
        if kind == "radial_bump":
            return RadialBumpObservable(
                space,
                center=_need(cfg, "center", "observable"),
                radius=_num(cfg, "radius", "observable", lo=0, lo_open=True),
                width=_num(cfg, "width", "observable", lo=0, lo_open=True),
            )
    except ConfigError:
        raise
    except (ParameterError, TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"observable: {exc}", "observable") from exc
    raise ConfigError(f"unknown observable kind {kind!r}", "observable.kind")


def validate_average(cfg: dict):
    family = _need(cfg, "family", "average")
    if family not in AVERAGE_FAMILIES:
        raise ConfigError(f"unknown family {family!r}", "average.family")
    if family == "annulus":
        _num(cfg, "omega", "average", lo=0, lo_open=True, hi=1)
    if family == "bochner_riesz":
        alpha = _num(cfg, "alpha", "average")
        if alpha <= -1.0:
            raise ConfigError("alpha must exceed -1", "average.alpha")
    if family == "tangent_patch":
        if "beta" in cfg:
            _num(cfg, "beta", "average", lo=0, lo_open=True, hi=1, hi_open=True)
        _need(cfg, "direction", "average")
    if "delta" in cfg and _num(cfg, "delta", "average", lo=0) is None:
        pass
    quad = cfg.get("quadrature", "product")
    if quad not in SCHEME_KINDS:
        raise ConfigError(f"unknown quadrature kind {quad!r}", "average.quadrature")
    if "resolution" in cfg:
        _num(cfg, "resolution", "average", lo=2)
    if "resolution_per_R" in cfg:
        _num(cfg, "resolution_per_R", "average", lo=0)
    return family


def r_grid(cfg: dict) -> np.ndarray:
    kind = cfg.get("kind", "geometric")
    if kind != "geometric":
        raise ConfigError(f"unknown r_grid kind {kind!r}", "r_grid.kind")
    lo = _num(cfg, "min", "r_grid", lo=0, lo_open=True)
    hi = _num(cfg, "max", "r_grid", lo=lo, lo_open=True)
    count = int(_num(cfg, "count", "r_grid", lo=2))
    return np.geomspace(lo, hi, count)


def scheme_for(cfg: dict, R: float, seed: int) -> QuadratureScheme:
    base = int(cfg.get("resolution", 64))
    per_r = float(cfg.get("resolution_per_R", 8.0))
    kind = cfg.get("quadrature", "product")
    if kind in ("mc", "lowdisc"):
        resolution = base
    else:
        resolution = max(base, int(math.ceil(per_r * R)))
    return QuadratureScheme(kind=kind, resolution=resolution, seed=seed)


def validate_run_config(cfg: dict) -> dict:
    """Full validation of a run/sweep config; returns the config unchanged."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object", "")
    _need(cfg, "experiment_id", "")
    space_cfg = _need(cfg, "space", "")
    space = build_space(space_cfg)
    seed = int(cfg.get("seed", 0))
    build_base_point(space, cfg.get("base_point", {}), seed)
    build_observable(space, _need(cfg, "observable", ""), seed)
    validate_average(_need(cfg, "average", ""))
    grid = r_grid(_need(cfg, "r_grid", ""))
    if len(grid) < 1:
        raise ConfigError("empty radius grid", "r_grid")
    peak = cfg.get("peak_scan")
    if peak:
        _num(peak, "period", "peak_scan", lo=0, lo_open=True)
        if int(peak.get("points", 17)) < 3:
            raise ConfigError("peak_scan needs at least 3 points", "peak_scan.points")
    pred = cfg.get("prediction", {})
    gp = pred.get("gamma_prime")
    if gp is not None and gp != "fit":
        if not isinstance(gp, (int, float)) or gp <= 0:
            raise ConfigError("gamma_prime must be positive or 'fit'", "prediction.gamma_prime")
    sweep = cfg.get("sweep")
    if sweep is not None:
        if "path" not in sweep or "values" not in sweep or not sweep["values"]:
            raise ConfigError("sweep needs path and nonempty values", "sweep")
        head, _, field = str(sweep["path"]).partition(".")
        if head != "average" or not field:
            raise ConfigError("only average.* sweep paths are supported", "sweep.path")
    return cfg


def validate_nilsearch_config(cfg: dict) -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object", "")
    _need(cfg, "experiment_id", "")
    space_cfg = _need(cfg, "space", "")
    if space_cfg.get("kind") != "heisenberg":
        raise ConfigError("nilsearch needs a heisenberg space", "space.kind")
    space = build_space(space_cfg)
    seed = int(cfg.get("seed", 0))
    build_base_point(space, cfg.get("base_point", {}), seed)
    delta = _num(cfg, "delta", "", lo=0, lo_open=True, hi=0.5, hi_open=True)
    _num(cfg, "C1", "", lo=0, lo_open=True)
    _num(cfg, "C2", "", lo=0, lo_open=True)
    _num(cfg, "R", "", lo=0, lo_open=True)
    del delta
    return cfg


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}", "") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}", "") from exc
