"""Quantitative pipeline: decay-exponent fits, predicted-exponent formulas,
truncation bookkeeping, the Parseval sphere-restriction oracle and empirical
disjointness-rate estimation.

The predicted-exponent formulas are exact algebraic identities of the proof
parameters (with the default truncation exponent L = d + 2, i.e. K = d + 1
and L = K + 1): choose_delta_annulus satisfies
delta^(1 + L(d+1)/2) = R^(-gamma') exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FitRefusedError, ParameterError, SingularOrderError
from .averages import twisted_ball_averages
from .quadrature import QuadratureScheme

NOISE_FLOOR_FACTOR = 10.0


@dataclass(frozen=True)
class DecaySeries:
    """Magnitude-vs-radius samples with per-point quadrature error estimates."""

    R: np.ndarray
    values: np.ndarray
    errors: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        e = np.asarray(self.errors, dtype=float)
        if not (len(R) == len(v) == len(e)):
            raise ParameterError("series arrays must have equal length")
        if np.any(np.diff(R) <= 0.0):
            raise ParameterError("radii must be strictly increasing")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "errors", e)


@dataclass(frozen=True)
class DecayFit:
    """Least-squares slope of log|value| against log R."""

    exponent: float
    intercept: float
    residual_rms: float
    half_width: float
    n_used: int
    flags: tuple = ()


def decay_fit(series: DecaySeries, min_points: int = 4) -> DecayFit:
    """Fit |value| ~ C * R^exponent in log-log coordinates.

    Points whose magnitude sits below 10x their error estimate are treated
    as noise and dropped; fewer than min_points usable points refuses the
    fit rather than reporting a meaningless slope.
    """
    mags = np.abs(series.values)
    usable = (mags > 0.0) & (mags >= NOISE_FLOOR_FACTOR * series.errors)
    n = int(np.count_nonzero(usable))
    if n < min_points:
        raise FitRefusedError(
            f"only {n} of {len(mags)} points above the noise floor (need {min_points})"
        )
    x = np.log(series.R[usable])
    y = np.log(mags[usable])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    r = y - fitted
    rms = float(np.sqrt(np.mean(r * r)))
    sxx = float(np.sum((x - x.mean()) ** 2))
    if n > 2 and sxx > 0.0:
        se = math.sqrt(float(np.sum(r * r)) / (n - 2) / sxx)
    else:
        se = 0.0
    flags = ()
    if n < len(mags):
        flags = (f"dropped-{len(mags) - n}-noise-points",)
    return DecayFit(float(slope), float(intercept), rms, 2.0 * se, n, flags)


# ---------------------------------------------------------------------------
# predicted-exponent formulas
# ---------------------------------------------------------------------------


def predict_omega_critical(d: int, gamma_prime: float) -> float:
    """Critical annulus-width exponent 1 - 2 gamma'/(d^2 + 3d + 4), clamped at 0."""
    if d < 2:
        raise ParameterError(f"need d >= 2, got {d}")
    if gamma_prime <= 0.0:
        raise ParameterError(f"need gamma' > 0, got {gamma_prime}")
    return max(0.0, 1.0 - 2.0 * gamma_prime / (d * d + 3.0 * d + 4.0))


def choose_delta_annulus(d: int, gamma_prime: float, R: float) -> float:
    """Mollification width R^(-2 gamma'/(d^2+3d+4)) balancing truncation
    against smoothing error; satisfies delta^(1+L(d+1)/2) = R^(-gamma')
    with L = d + 2."""
    if d < 2:
        raise ParameterError(f"need d >= 2, got {d}")
    if gamma_prime <= 0.0:
        raise ParameterError(f"need gamma' > 0, got {gamma_prime}")
    if R < 1.0:
        raise ParameterError(f"need R >= 1, got {R}")
    return R ** (-2.0 * gamma_prime / (d * d + 3.0 * d + 4.0))


def predict_br_rate(d: int, alpha: float, gamma_prime: float) -> float:
    """Bochner-Riesz decay rate gamma' (1+alpha) / ((d+1)(d-alpha)).

    alpha = -1 is the boundary with rate exactly 0 (no decay); below it the
    order is singular.
    """
    if d < 1:
        raise ParameterError(f"need d >= 1, got {d}")
    if alpha < -1.0:
        raise SingularOrderError(f"order must be >= -1, got {alpha}")
    if gamma_prime <= 0.0:
        raise ParameterError(f"need gamma' > 0, got {gamma_prime}")
    if alpha == -1.0:
        return 0.0
    return gamma_prime * (1.0 + alpha) / ((d + 1.0) * (d - alpha))


def truncation_radius(delta: float, d: int, L: float | None = None) -> float:
    """Fourier-truncation radius delta^(-L); default L = d + 2 (K = d+1, L = K+1)."""
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"need 0 < delta < 1, got {delta}")
    if L is None:
        L = d + 2.0
    return delta**-L


def mollifier_tail_sum(delta: float, d: int, L: float | None = None, span: float = 1.5):
    """Upper bound for sum over |n| >= delta^-L of (delta |n|)^-(d+1).

    Enumerates the lattice band delta^-L <= |n| <= span * delta^-L exactly
    (chunked) and closes the tail with the standard integral comparison;
    the proposition's bound is O(delta), so the returned value divided by
    delta should stay bounded as delta shrinks.
    """
    if d not in (1, 2):
        raise ParameterError("lattice tail sum implemented for d in {1, 2}")
    K = d + 1.0
    N = truncation_radius(delta, d, L)
    M = span * N
    scale = delta**-K
    if d == 1:
        n = np.arange(math.ceil(N), math.floor(M) + 1, dtype=float)
        core = 2.0 * float(np.sum((delta * n) ** -K))
        tail = 2.0 * scale * (math.floor(M)) ** (-K + 1.0) / (K - 1.0)
        return core + tail
    n_lo = math.ceil(N)
    n_hi = math.floor(M)
    core = 0.0
    # quadrant a >= 1, b >= 0 represents each nonzero point once up to the
    # four rotations
    chunk = 256
    for a0 in range(1, n_hi + 1, chunk):
        a = np.arange(a0, min(a0 + chunk, n_hi + 1), dtype=float)
        b = np.arange(0.0, n_hi + 1.0)
        r2 = a[:, None] ** 2 + b[None, :] ** 2
        band = (r2 >= N * N) & (r2 <= M * M)
        if np.any(band):
            core += float(np.sum(r2[band] ** (-K / 2.0)))
    core *= 4.0 * scale
    # integral comparison beyond radius M: sum <= 2 pi int_{M-1} r^{-K+1} dr
    tail = 2.0 * math.pi * scale * (M - 1.0) ** (-K + 2.0) / (K - 2.0)
    return core + tail


# ---------------------------------------------------------------------------
# Parseval restriction oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParsevalReport:
    lhs: float
    rhs: float
    a0: float
    p0: float
    sphere_max: float
    a0_dominates: bool
    max_dominates: bool


def _eval_monomials(coeffs: dict, points: np.ndarray) -> np.ndarray:
    out = np.zeros(points.shape[0])
    for mono, c in coeffs.items():
        term = np.full(points.shape[0], float(c))
        for k, e in enumerate(mono):
            if e:
                term = term * points[:, k] ** e
        out += term
    return out


def parseval_check(coeffs: dict, R: float, d: int) -> ParsevalReport:
    """Compare the squared L^2 norm of a polynomial restricted to the radius-R
    sphere (by quadrature) against the coefficient sum of its restricted
    expansion, and test constant-term domination |a_0| >= |p(0)|.

    d = 2 expands the circle restriction as a trigonometric polynomial via
    FFT; d = 3 expands in orthonormalized spherical harmonics.  Higher d is
    unsupported (no expansion basis implemented).
    """
    if d not in (2, 3):
        raise ParameterError("parseval check implemented for d in {2, 3}")
    if R <= 0.0:
        raise ParameterError(f"need R > 0, got {R}")
    coeffs = {tuple(int(e) for e in k): float(v) for k, v in coeffs.items()}
    for mono in coeffs:
        if len(mono) != d:
            raise ParameterError(f"monomial {mono} has wrong arity")
    deg = max((sum(m) for m in coeffs), default=0)
    p0 = coeffs.get((0,) * d, 0.0)

    if d == 2:
        m = max(64, 8 * deg + 8)
        theta = 2.0 * math.pi * np.arange(m) / m
        pts = R * np.stack([np.cos(theta), np.sin(theta)], axis=1)
        vals = _eval_monomials(coeffs, pts)
        lhs = float(np.mean(vals * vals))
        fft = np.fft.fft(vals) / m
        keep = np.zeros(m, dtype=bool)
        keep[: deg + 1] = True
        if deg:
            keep[-deg:] = True
        rhs = float(np.sum(np.abs(fft[keep]) ** 2))
        a0 = float(fft[0].real)
        sphere_max = float(np.max(np.abs(vals)))
    else:
        from scipy.special import roots_legendre, sph_harm_y

        n_th = max(16, 2 * deg + 4)
        ct, wt = roots_legendre(n_th)
        n_ph = max(32, 4 * deg + 4)
        phi = 2.0 * math.pi * np.arange(n_ph) / n_ph
        st = np.sqrt(1.0 - ct * ct)
        theta = np.arccos(ct)
        pts = R * np.stack(
            [
                (st[:, None] * np.cos(phi)[None, :]).ravel(),
                (st[:, None] * np.sin(phi)[None, :]).ravel(),
                (ct[:, None] * np.ones(n_ph)[None, :]).ravel(),
            ],
            axis=1,
        )
        w = (wt[:, None] / (2.0 * n_ph) * np.ones(n_ph)[None, :]).ravel()
        vals = _eval_monomials(coeffs, pts)
        lhs = float(np.sum(w * vals * vals))
        rhs = 0.0
        a0 = float(np.sum(w * vals))  # coefficient of the constant basis element
        th_grid = np.repeat(theta, n_ph)
        ph_grid = np.tile(phi, n_th)
        for ell in range(deg + 1):
            for em in range(-ell, ell + 1):
                # sqrt(4 pi) Y_lm is orthonormal for the normalized measure
                basis = math.sqrt(4.0 * math.pi) * sph_harm_y(ell, em, th_grid, ph_grid)
                c = np.sum(w * vals * np.conj(basis))
                rhs += float(np.abs(c) ** 2)
        sphere_max = float(np.max(np.abs(vals)))

    return ParsevalReport(
        lhs=lhs,
        rhs=rhs,
        a0=a0,
        p0=p0,
        sphere_max=sphere_max,
        a0_dominates=abs(a0) >= abs(p0) - 1e-12,
        max_dominates=sphere_max >= abs(p0) - 1e-12,
    )


# ---------------------------------------------------------------------------
# empirical disjointness rate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaPrimeEstimate:
    """Worst-case (over twist frequencies) twisted-average decay fit."""

    gamma_prime: float | None
    fit: DecayFit | None
    R: np.ndarray
    magnitudes: np.ndarray
    errors: np.ndarray
    flags: tuple = ()


def estimate_gamma_prime(
    space,
    f,
    x,
    R_grid,
    z_set,
    scheme: QuadratureScheme | None = None,
    resolution_per_R: float = 8.0,
) -> GammaPrimeEstimate:
    """Fit the decay of max_z |twisted ball average| over the radius grid.

    f must be (approximately) mean zero -- otherwise the z = 0 coefficient
    converges to the mean and no decay can exist.  A null twist matching
    one of f's own frequencies keeps the magnitudes at 1; the fit then
    reports exponent near 0 and the estimate is flagged no-disjointness.
    """
    R_grid = np.asarray(R_grid, dtype=float)
    if len(R_grid) < 6:
        raise ParameterError("need at least 6 radii")
    m, merr = f.mean()
    if not f.regularity.mean_zero and abs(m) > max(10.0 * merr, 1e-9):
        raise ParameterError("observable must be mean zero")
    mags = np.empty(len(R_grid))
    errs = np.empty(len(R_grid))
    for i, R in enumerate(R_grid):
        res = scheme or QuadratureScheme(
            resolution=max(64, int(resolution_per_R * R))
        )
        outs = twisted_ball_averages(space, f, x, float(R), list(z_set), res)
        best = max(outs, key=lambda o: abs(o.value))
        mags[i] = abs(best.value)
        errs[i] = best.error
    flags = []
    fit = None
    gamma = None
    try:
        fit = decay_fit(DecaySeries(R_grid, mags.astype(complex), errs))
        gamma = -fit.exponent
        if fit.exponent > -0.05:
            flags.append("no-disjointness")
    except FitRefusedError:
        flags.append("fit-refused")
    return GammaPrimeEstimate(gamma, fit, R_grid, mags, errs, tuple(flags))
