"""Numerical evaluation of the sparse averaging operators at a base point.

Families: ball, sphere, annulus (t-average of spheres over
[R/2, R/2 + R^omega]), Bochner-Riesz (weight (1-|v/R|^2)^alpha_+), flat
tangent patches, twisted ball averages and model-function Fourier
coefficients.  Mollified variants convolve the operator with the standard
bump phi_delta in the acting group (outer quadrature over phi_delta).

All operators integrate against unit-mass node/weight sets, so the average
of f = 1 is exactly 1 and every result is linear in f.  Quadrature errors
are estimated by re-evaluating at half resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError
from .quadrature import (
    DEFAULT_SCHEME,
    QuadratureScheme,
    annulus_radii,
    ball_nodes,
    br_ball_nodes,
    mollifier_nodes,
    patch_nodes,
    sphere_nodes,
)

TWO_PI_I = 2j * math.pi

FAMILIES = ("ball", "sphere", "annulus", "bochner_riesz", "tangent_patch")


@dataclass(frozen=True)
class AverageSpec:
    """Which sparse average to apply: family plus its parameters.

    delta = 0 means unmollified; tangent patches need a unit direction.
    """

    family: str
    R: float
    omega: float | None = None
    alpha: float | None = None
    beta: float | None = None
    delta: float = 0.0
    direction: tuple | None = None
    scheme: QuadratureScheme = field(default_factory=QuadratureScheme)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown average family {self.family!r}")
        if self.R <= 0.0:
            raise ParameterError(f"R must be positive, got {self.R}")
        if self.family == "annulus":
            if self.omega is None or not 0.0 < self.omega <= 1.0:
                raise ParameterError(f"annulus needs omega in (0, 1], got {self.omega}")
        if self.family == "bochner_riesz":
            if self.alpha is None or self.alpha <= -1.0:
                raise ParameterError(f"Bochner-Riesz needs alpha > -1, got {self.alpha}")
        if self.family == "tangent_patch":
            if self.beta is None or not 0.0 < self.beta < 1.0:
                raise ParameterError(f"tangent patch needs beta in (0,1), got {self.beta}")
            if self.direction is None:
                raise ParameterError("tangent patch needs a direction")
        if self.delta < 0.0:
            raise ParameterError(f"delta must be nonnegative, got {self.delta}")


@dataclass(frozen=True)
class AverageResult:
    value: complex
    error: float
    flags: tuple = ()

    @property
    def magnitude(self) -> float:
        return abs(self.value)


def _orbit_sum(space, f, x, nodes, weights, phases=None) -> complex:
    pts = space.translate_batch(x, nodes)
    vals = f.eval_batch(pts)
    if phases is not None:
        vals = vals * phases
    return complex(np.dot(weights, vals))


def _family_nodes(spec: AverageSpec, d: int, scheme: QuadratureScheme):
    """Unit-scale node/weight set of the family in flow coordinates."""
    if spec.family == "ball":
        nodes, w = ball_nodes(d, scheme)
        return spec.R * nodes, w
    if spec.family == "sphere":
        nodes, w = sphere_nodes(d, scheme)
        return spec.R * nodes, w
    if spec.family == "annulus":
        radii, rw = annulus_radii(spec.R, spec.omega, scheme)
        dirs, dw = sphere_nodes(d, scheme)
        nodes = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, d)
        weights = (rw[:, None] * dw[None, :]).reshape(-1)
        return nodes, weights
    if spec.family == "bochner_riesz":
        nodes, w = br_ball_nodes(d, spec.alpha, scheme)
        return spec.R * nodes, w
    direction = np.asarray(spec.direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    nodes, w = patch_nodes(d, spec.R**spec.beta, direction, scheme)
    return nodes + spec.R * direction[None, :], w


ERROR_LEVELS = (0.75, 0.5)


def _error_estimate(value, coarse1, coarse2) -> float:
    """Resolution-refinement estimate from two coarser levels.

    |value - coarse| alone can understate the error when two refinement
    levels agree by accident; the coarse-level difference restores the
    scale (it is an error estimate for the coarser rule, which dominates
    the finer one for any convergent scheme).
    """
    return max(abs(value - coarse1), abs(coarse1 - coarse2))


def _with_error(space, f, x, spec: AverageSpec, flags=()) -> AverageResult:
    d = space.flow_dim

    def run(scheme):
        nodes, w = _family_nodes(spec, d, scheme)
        return _orbit_sum(space, f, x, nodes, w)

    value = run(spec.scheme)
    coarse1 = run(spec.scheme.scaled(ERROR_LEVELS[0]))
    coarse2 = run(spec.scheme.scaled(ERROR_LEVELS[1]))
    return AverageResult(value, _error_estimate(value, coarse1, coarse2), tuple(flags))


def ball_average(space, f, x, R, scheme: QuadratureScheme = DEFAULT_SCHEME):
    """Uniform average of f over the orbit patch {u_v.x : |v| <= R}."""
    return _with_error(space, f, x, AverageSpec("ball", R, scheme=scheme))


def sphere_average(space, f, x, R, scheme: QuadratureScheme = DEFAULT_SCHEME):
    """Unit-mass sphere integral of f along the orbit; d = 1 degenerates to
    the two-point average and is flagged."""
    flags = ("degenerate-two-point",) if space.flow_dim == 1 else ()
    return _with_error(space, f, x, AverageSpec("sphere", R, scheme=scheme), flags)


def annulus_average(space, f, x, R, omega, scheme: QuadratureScheme = DEFAULT_SCHEME):
    """t-average of sphere averages of radius R/2 + t over [0, R^omega]."""
    return _with_error(space, f, x, AverageSpec("annulus", R, omega=omega, scheme=scheme))


def br_average(space, f, x, R, alpha, scheme: QuadratureScheme = DEFAULT_SCHEME):
    """Bochner-Riesz weighted ball average, weight (1 - |v/R|^2)^alpha_+."""
    return _with_error(
        space, f, x, AverageSpec("bochner_riesz", R, alpha=alpha, scheme=scheme)
    )


def tangent_patch_average(
    space, f, x, R, beta, direction, scheme: QuadratureScheme = DEFAULT_SCHEME
):
    """Flat average over the (d-1)-ball of radius R^beta orthogonal to the
    unit direction, translated out to R * direction."""
    spec = AverageSpec(
        "tangent_patch", R, beta=beta, direction=tuple(np.asarray(direction, float)),
        scheme=scheme,
    )
    return _with_error(space, f, x, spec)


def patched_sphere_average(
    space, f, x, R, beta, scheme: QuadratureScheme = DEFAULT_SCHEME, n_directions=64
):
    """Angular combination of tangent-patch averages: the flat-patch
    approximation of the sphere average."""
    d = space.flow_dim
    if d == 2:
        theta = 2.0 * math.pi * np.arange(n_directions) / n_directions
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        dw = np.full(n_directions, 1.0 / n_directions)
    else:
        dirs, dw = sphere_nodes(d, scheme)
    total = 0.0 + 0.0j
    err = 0.0
    for v_hat, w in zip(dirs, dw):
        res = tangent_patch_average(space, f, x, R, beta, v_hat, scheme)
        total += w * res.value
        err += w * res.error
    return AverageResult(total, err)


def twisted_ball_average(
    space, f, x, R, z, scheme: QuadratureScheme = DEFAULT_SCHEME
):
    """Unit-mass ball average of f(u_v.x) e^{2 pi i <v, z>}; its decay in R
    is the quantitative-disjointness (Fourier-coefficient) statistic."""
    if R <= 0.0:
        raise ParameterError(f"R must be positive, got {R}")
    z = np.asarray(z, dtype=float)
    d = space.flow_dim

    def run(s):
        nodes, w = ball_nodes(d, s)
        nodes = R * nodes
        return _orbit_sum(space, f, x, nodes, w, np.exp(TWO_PI_I * nodes @ z))

    value = run(scheme)
    coarse1 = run(scheme.scaled(ERROR_LEVELS[0]))
    coarse2 = run(scheme.scaled(ERROR_LEVELS[1]))
    return AverageResult(value, _error_estimate(value, coarse1, coarse2))


def twisted_ball_averages(
    space, f, x, R, z_list, scheme: QuadratureScheme = DEFAULT_SCHEME
):
    """twisted_ball_average for several twist frequencies at once, sharing
    the orbit evaluations (the node cloud does not depend on z)."""
    if R <= 0.0:
        raise ParameterError(f"R must be positive, got {R}")
    zs = np.asarray(z_list, dtype=float)
    d = space.flow_dim

    # cap the (n_nodes, n_z) phase matrix at ~64 MB per chunk
    def run(s):
        nodes, w = ball_nodes(d, s)
        nodes = R * nodes
        pts = space.translate_batch(x, nodes)
        weighted = w * f.eval_batch(pts)
        out = np.empty(len(zs), dtype=complex)
        chunk = max(1, (1 << 22) // max(1, len(nodes)))
        for i in range(0, len(zs), chunk):
            block = zs[i : i + chunk]
            out[i : i + chunk] = weighted @ np.exp(TWO_PI_I * nodes @ block.T)
        return out

    value = run(scheme)
    coarse1 = run(scheme.scaled(ERROR_LEVELS[0]))
    coarse2 = run(scheme.scaled(ERROR_LEVELS[1]))
    return [
        AverageResult(complex(v), _error_estimate(v, c1, c2))
        for v, c1, c2 in zip(value, coarse1, coarse2)
    ]


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def model_fourier_coefficient(
    space, f, x, R, n_bar, scheme: QuadratureScheme = DEFAULT_SCHEME
):
    """Fourier coefficient a_{n,R} of the radius-R orbit model on [-1,1]^d.

    The model samples f on the rescaled ball and vanishes on the rest of the
    cube, so a_{n,R} is the twisted ball average times the ball-to-cube mass
    ratio vol(B_1)/2^d; at n = 0 it is the mass-weighted ball average, not
    the ball average itself.
    """
    n_bar = np.asarray(n_bar, dtype=float)
    d = space.flow_dim
    res = twisted_ball_average(space, f, x, R, -n_bar / (2.0 * R), scheme)
    factor = unit_ball_volume(d) / 2.0**d
    return AverageResult(factor * res.value, factor * res.error, res.flags)


def mollified_average(space, f, x, spec: AverageSpec, delta: float):
    """The spec's average convolved with phi_delta in the acting group:
    integral over h of phi_delta(h) * average(f)(u_h.x)."""
    if delta <= 0.0:
        raise ParameterError(f"delta must be positive, got {delta}")
    d = space.flow_dim

    def run(scheme):
        nodes, w = _family_nodes(spec, d, scheme)
        h_nodes, h_w = mollifier_nodes(d, delta, scheme)
        total = 0.0 + 0.0j
        for h, wh in zip(h_nodes, h_w):
            total += wh * _orbit_sum(space, f, x, nodes + h[None, :], w)
        return total

    value = run(spec.scheme)
    coarse1 = run(spec.scheme.scaled(ERROR_LEVELS[0]))
    coarse2 = run(spec.scheme.scaled(ERROR_LEVELS[1]))
    return AverageResult(value, _error_estimate(value, coarse1, coarse2))


def evaluate(space, f, x, spec: AverageSpec) -> AverageResult:
    """Dispatch an AverageSpec, applying mollification when delta > 0."""
    if spec.delta > 0.0:
        return mollified_average(space, f, x, replace(spec, delta=0.0), spec.delta)
    if spec.family == "ball":
        return ball_average(space, f, x, spec.R, spec.scheme)
    if spec.family == "sphere":
        return sphere_average(space, f, x, spec.R, spec.scheme)
    if spec.family == "annulus":
        return annulus_average(space, f, x, spec.R, spec.omega, spec.scheme)
    if spec.family == "bochner_riesz":
        return br_average(space, f, x, spec.R, spec.alpha, spec.scheme)
    return tangent_patch_average(
        space, f, x, spec.R, spec.beta, np.asarray(spec.direction), spec.scheme
    )
