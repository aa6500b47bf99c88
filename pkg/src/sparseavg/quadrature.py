"""Quadrature node generators for the averaging operators.

All generators return (nodes, weights) with weights normalized to sum to 1,
so averaging a constant function returns the constant exactly.  Node sets
are deterministic given (kind, resolution, seed).

Per-dimension sphere rules: d=1 the two-point set, d=2 a trapezoid rule on
the circle (spectrally accurate), d=3 a Gauss-Legendre x equiangular product
grid, d>=4 seeded low-discrepancy directions with resolution-doubling error
control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import ParameterError
from .kernels import mollifier_profile

SCHEME_KINDS = ("product", "lowdisc", "mc")


@dataclass(frozen=True)
class QuadratureScheme:
    """Which node family to use and how fine.

    resolution scales the node counts documented in each generator; the
    runner estimates errors by halving it and re-evaluating.
    """

    kind: str = "product"
    resolution: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ParameterError(f"unknown quadrature kind {self.kind!r}")
        if self.resolution < 2:
            raise ParameterError("resolution must be at least 2")

    def halved(self) -> "QuadratureScheme":
        return QuadratureScheme(self.kind, max(2, self.resolution // 2), self.seed)

    def scaled(self, factor: float) -> "QuadratureScheme":
        return QuadratureScheme(
            self.kind, max(2, int(self.resolution * factor)), self.seed
        )


DEFAULT_SCHEME = QuadratureScheme()


@lru_cache(maxsize=256)
def _circle_nodes(m: int):
    theta = 2.0 * math.pi * np.arange(m) / m
    nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return nodes, np.full(m, 1.0 / m)


@lru_cache(maxsize=256)
def _gl_product_sphere(n_theta: int):
    """Gauss-Legendre in cos(theta) times equiangular phi, exact for
    spherical polynomials of degree < 2*n_theta."""
    xs, ws = roots_legendre(n_theta)
    m_phi = 2 * n_theta
    phi = 2.0 * math.pi * np.arange(m_phi) / m_phi
    ct = xs[:, None] + 0.0 * phi[None, :]
    st = np.sqrt(1.0 - xs * xs)[:, None] + 0.0 * phi[None, :]
    nodes = np.stack(
        [st * np.cos(phi)[None, :], st * np.sin(phi)[None, :], ct], axis=-1
    ).reshape(-1, 3)
    weights = (ws[:, None] / (2.0 * m_phi) * np.ones(m_phi)[None, :]).reshape(-1)
    return nodes, weights / weights.sum()


def _lowdisc_sphere(d: int, n: int, seed: int):
    from scipy.stats import qmc

    sob = qmc.Sobol(d=d, scramble=True, seed=seed)
    u = sob.random(n)
    # inverse-normal map then radial projection
    from scipy.special import ndtri

    g = ndtri(np.clip(u, 1e-12, 1.0 - 1e-12))
    norms = np.linalg.norm(g, axis=1)
    norms[norms == 0.0] = 1.0
    nodes = g / norms[:, None]
    return nodes, np.full(n, 1.0 / n)


def sphere_nodes(d: int, scheme: QuadratureScheme = DEFAULT_SCHEME):
    """Unit-sphere nodes and unit-sum weights in dimension d."""
    if d < 1:
        raise ParameterError(f"dimension must be positive, got {d}")
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([0.5, 0.5])
    if scheme.kind == "mc":
        rng = np.random.default_rng(scheme.seed)
        g = rng.standard_normal((scheme.resolution * 8, d))
        nodes = g / np.linalg.norm(g, axis=1, keepdims=True)
        return nodes, np.full(len(nodes), 1.0 / len(nodes))
    if d == 2:
        return _circle_nodes(max(8, scheme.resolution))
    if d == 3 and scheme.kind == "product":
        return _gl_product_sphere(max(4, scheme.resolution // 2))
    return _lowdisc_sphere(d, max(16, scheme.resolution) * 8, scheme.seed)


@lru_cache(maxsize=256)
def _radial_rule(d: int, n: int):
    """Gauss-Legendre on [0,1] against the measure r^{d-1} dr, unit mass."""
    xs, ws = roots_legendre(n)
    r = 0.5 * (xs + 1.0)
    w = 0.5 * ws * r ** (d - 1)
    return r, w / w.sum()


def _uniform_ball_map(d: int, u: np.ndarray) -> np.ndarray:
    """Measure-preserving map from the unit cube to the unit ball (polar)."""
    r = u[:, 0] ** (1.0 / d)
    if d == 1:
        return (2.0 * u[:, 0:1] - 1.0).copy()
    if d == 2:
        theta = 2.0 * math.pi * u[:, 1]
        return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)
    if d == 3:
        z = 2.0 * u[:, 1] - 1.0
        phi = 2.0 * math.pi * u[:, 2]
        s = np.sqrt(1.0 - z * z)
        return np.stack(
            [r * s * np.cos(phi), r * s * np.sin(phi), r * z], axis=1
        )
    from scipy.special import ndtri

    g = ndtri(np.clip(u[:, 1:], 1e-12, 1.0 - 1e-12))
    extra = np.clip(1.0 - u[:, 0], 1e-12, 1.0)
    g = np.concatenate([ndtri(extra)[:, None], g], axis=1)
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    return r[:, None] * g / norms


def ball_nodes(d: int, scheme: QuadratureScheme = DEFAULT_SCHEME):
    """Nodes/weights averaging over the unit ball (uniform measure)."""
    if scheme.kind in ("mc", "lowdisc"):
        n = scheme.resolution * 8
        dims = d + 1 if d >= 4 else d
        if scheme.kind == "mc":
            u = np.random.default_rng(scheme.seed).random((n, dims))
        else:
            import warnings

            from scipy.stats import qmc

            with warnings.catch_warnings():
                # balance note for non-power-of-two n (coarse error levels)
                warnings.simplefilter("ignore", UserWarning)
                u = qmc.Sobol(d=dims, scramble=True, seed=scheme.seed).random(n)
        return _uniform_ball_map(d, u), np.full(n, 1.0 / n)
    if d == 1:
        xs, ws = roots_legendre(max(8, scheme.resolution))
        return xs[:, None].copy(), ws / ws.sum()
    dirs, dw = sphere_nodes(d, scheme)
    r, rw = _radial_rule(d, max(8, scheme.resolution // 2))
    nodes = (r[:, None, None] * dirs[None, :, :]).reshape(-1, d)
    weights = (rw[:, None] * dw[None, :]).reshape(-1)
    return nodes, weights


@lru_cache(maxsize=256)
def _jacobi_radial_rule(d: int, alpha: float, n: int):
    """Radial rule for the weight (1-r^2)^alpha r^{d-1} dr on [0,1].

    Substituting s = r^2 turns the weight into (1-s)^alpha s^{d/2-1}, the
    Gauss-Jacobi weight, which absorbs the endpoint singularity exactly.
    """
    xs, ws = roots_jacobi(n, alpha, d / 2.0 - 1.0)
    s = 0.5 * (xs + 1.0)
    r = np.sqrt(s)
    return r, ws / ws.sum()


def br_ball_nodes(d: int, alpha: float, scheme: QuadratureScheme = DEFAULT_SCHEME):
    """Nodes/weights for the unit-mass weighted ball (1-|v|^2)^alpha_+."""
    if alpha <= -1.0:
        raise ParameterError(f"Bochner-Riesz order must exceed -1, got {alpha}")
    n_rad = max(8, scheme.resolution // 2)
    if d == 1:
        r, rw = _jacobi_radial_rule(1, alpha, n_rad)
        nodes = np.concatenate([r, -r])[:, None]
        weights = np.concatenate([rw, rw]) / 2.0
        return nodes, weights
    dirs, dw = sphere_nodes(d, scheme)
    r, rw = _jacobi_radial_rule(d, alpha, n_rad)
    nodes = (r[:, None, None] * dirs[None, :, :]).reshape(-1, d)
    weights = (rw[:, None] * dw[None, :]).reshape(-1)
    return nodes, weights


@lru_cache(maxsize=256)
def _mollifier_radial(d: int, n: int):
    xs, ws = roots_legendre(n)
    s = 0.5 * (xs + 1.0)
    w = 0.5 * ws * mollifier_profile(s) * s ** (d - 1)
    return s, w / w.sum()


def mollifier_nodes(d: int, delta: float, scheme: QuadratureScheme = DEFAULT_SCHEME):
    """Nodes/weights integrating against the width-delta mollifier bump."""
    if delta <= 0.0:
        raise ParameterError(f"delta must be positive, got {delta}")
    n_rad = max(8, scheme.resolution // 4)
    if d == 1:
        s, sw = _mollifier_radial(1, n_rad)
        nodes = delta * np.concatenate([s, -s])[:, None]
        weights = np.concatenate([sw, sw]) / 2.0
        return nodes, weights
    dirs, dw = sphere_nodes(d, scheme)
    s, sw = _mollifier_radial(d, n_rad)
    nodes = delta * (s[:, None, None] * dirs[None, :, :]).reshape(-1, d)
    weights = (sw[:, None] * dw[None, :]).reshape(-1)
    return nodes, weights


def annulus_radii(R: float, omega: float, scheme: QuadratureScheme = DEFAULT_SCHEME):
    """Radii and unit-sum weights for the t-average over [R/2, R/2 + R^omega].

    Composite Gauss-Legendre panels; the panel count grows with the window
    so oscillatory integrands stay resolved, the per-panel order with the
    scheme resolution.
    """
    if R <= 0.0:
        raise ParameterError(f"R must be positive, got {R}")
    if not 0.0 < omega <= 1.0:
        raise ParameterError(f"omega must lie in (0, 1], got {omega}")
    width = R**omega
    # fixed order, resolution scales the panel count: h-refinement gives the
    # halved-resolution error estimate a regular convergence order
    order = 8
    scale = scheme.resolution / 64.0
    n_panels = max(
        2, int(math.ceil(width * 2.0 * scale)), int(math.ceil(4.0 * scale))
    )
    n_panels = min(65536, n_panels)
    xs, ws = roots_legendre(order)
    edges = np.linspace(0.0, width, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    ts = (mid[:, None] + half[:, None] * xs[None, :]).reshape(-1)
    tw = (half[:, None] * ws[None, :]).reshape(-1)
    return R / 2.0 + ts, tw / tw.sum()


def orthonormal_complement(direction: np.ndarray) -> np.ndarray:
    """Rows form an orthonormal basis of the hyperplane orthogonal to direction."""
    v = np.asarray(direction, dtype=float)
    v = v / np.linalg.norm(v)
    d = v.size
    # Householder reflection mapping e_1 to v; remaining columns span v-perp
    e1 = np.zeros(d)
    e1[0] = 1.0
    u = v - e1
    nu = np.linalg.norm(u)
    if nu < 1e-14:
        q = np.eye(d)
    else:
        u = u / nu
        q = np.eye(d) - 2.0 * np.outer(u, u)
    return q[:, 1:].T


def patch_nodes(
    d: int,
    radius: float,
    direction: np.ndarray,
    scheme: QuadratureScheme = DEFAULT_SCHEME,
):
    """Nodes/weights for the flat (d-1)-dimensional ball of the given radius
    inside the hyperplane orthogonal to direction."""
    if d < 2:
        raise ParameterError("tangent patches need d >= 2")
    basis = orthonormal_complement(direction)  # (d-1, d)
    sub, w = ball_nodes(d - 1, scheme)
    nodes = radius * sub @ basis
    return nodes, w
