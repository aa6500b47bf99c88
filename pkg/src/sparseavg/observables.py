"""Test functions with evaluable values, known means and regularity data.

Only structured observables are supported: every error bound downstream
needs an explicit Lipschitz or Sobolev handle, which arbitrary callables
cannot supply.  The types:

* TrigPolynomial -- finite Fourier sums on a torus; exact means.
* NilCharacter -- abelian characters (factoring through the horizontal
  torus) or central-frequency characters on Heisenberg products.
* BumpObservable -- a smooth compactly supported bump applied to the
  lattice shortest vector on a modular factor; Monte Carlo mean cached at
  construction.
* ProductObservable -- product of observables living on distinct factors.
* RadialBumpObservable -- a smoothed indicator of a metric ball on the
  torus; Lipschitz with a sharp, controllable transition width (the witness
  used for boundary-layer smoothing-error scalings).

Lipschitz constants are with respect to the flat metric on canonical
coordinates (circle distance per coordinate, Frobenius distance on modular
matrices).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SpaceMismatchError
from .spaces import (
    HeisenbergProductSpace,
    ModularProductSpace,
    TorusSpace,
    circle_dist,
)

TWO_PI_I = 2j * math.pi

# Lipschitz constant of the shortest-vector map on reduced determinant-1
# bases: the minimizing integer vector has norm at most 4/sqrt(3)
SHORTEST_VECTOR_LIPSCHITZ = 4.0 / math.sqrt(3.0)


@dataclass
class Regularity:
    """Metadata consumed by the error bounds: Lipschitz constant, declared
    Sobolev order, mean-zero flag, optionally an assumed equidistribution
    rate for the base point."""

    lipschitz_constant: float = 0.0
    sobolev_order: int | None = None
    mean_zero: bool = False
    assumed_rate: float | None = None

    def __post_init__(self):
        if self.lipschitz_constant < 0.0:
            raise ParameterError("Lipschitz constant must be nonnegative")


class Observable:
    """Common interface: eval/eval_batch, mean with error bar, Lipschitz bound."""

    space = None
    sup_norm = 1.0

    def eval(self, point) -> complex:
        self._check_point(point)
        return complex(self.eval_batch(np.asarray(point, dtype=float)[None])[0])

    def eval_batch(self, points) -> np.ndarray:
        raise NotImplementedError

    def mean(self):
        """(mean value, error bar); exact observables report error 0."""
        raise NotImplementedError

    def lipschitz_bound(self) -> float:
        return self.regularity.lipschitz_constant

    def _check_point(self, point):
        p = np.asarray(point)
        if p.shape != self._point_shape:
            raise SpaceMismatchError(
                f"point shape {p.shape} does not match space ({self._point_shape})"
            )

    @property
    def _point_shape(self):
        s = self.space
        if isinstance(s, TorusSpace):
            return (s.n,)
        if isinstance(s, HeisenbergProductSpace):
            return (s.d, 3)
        return (s.d, 2, 2)


class TrigPolynomial(Observable):
    """Finite sum of torus characters sum_j c_j e(<n_j, x>)."""

    def __init__(self, space: TorusSpace, coeffs: dict, sobolev_order=None):
        if not isinstance(space, TorusSpace):
            raise SpaceMismatchError("TrigPolynomial lives on a torus")
        self.space = space
        freqs = []
        cs = []
        for n_bar, c in sorted(coeffs.items()):
            n_bar = tuple(int(k) for k in n_bar)
            if len(n_bar) != space.n:
                raise ParameterError(f"frequency {n_bar} has wrong length")
            freqs.append(n_bar)
            cs.append(complex(c))
        self.frequencies = np.array(freqs, dtype=float).reshape(len(freqs), space.n)
        self.coefficients = np.array(cs, dtype=complex)
        self.sup_norm = float(np.sum(np.abs(self.coefficients)))
        mean = complex(sum(c for f, c in zip(freqs, cs) if not any(f)))
        self._mean = mean
        lip = float(
            2.0
            * math.pi
            * np.sum(np.abs(self.coefficients) * np.linalg.norm(self.frequencies, axis=1))
        )
        self.regularity = Regularity(
            lipschitz_constant=lip,
            sobolev_order=sobolev_order,
            mean_zero=(mean == 0),
        )

    def eval_batch(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.exp(TWO_PI_I * pts @ self.frequencies.T) @ self.coefficients

    def mean(self):
        return self._mean, 0.0


def character(space: TorusSpace, n_bar) -> TrigPolynomial:
    """Single torus character e(<n_bar, x>)."""
    return TrigPolynomial(space, {tuple(n_bar): 1.0})


class NilCharacter(Observable):
    """Characters on a Heisenberg product: abelian (horizontal frequency
    z in Z^{2d}) or central (per-factor central frequencies m in Z^d).

    Central characters are evaluated on canonical Mal'cev coordinates; they
    are discontinuous across the gluing but Lipschitz in the flat metric on
    coordinates, which is what the bounds consume.
    """

    def __init__(self, space: HeisenbergProductSpace, kind: str, frequency):
        if not isinstance(space, HeisenbergProductSpace):
            raise SpaceMismatchError("NilCharacter lives on a Heisenberg product")
        self.space = space
        self.kind = kind
        freq = np.asarray(frequency, dtype=float)
        if kind == "abelian":
            if freq.shape != (2 * space.d,):
                raise ParameterError("abelian frequency must lie in Z^{2d}")
        elif kind == "central":
            if freq.shape != (space.d,):
                raise ParameterError("central frequency must lie in Z^d")
            if not np.any(freq):
                raise ParameterError("central character needs some m_i != 0")
        else:
            raise ParameterError(f"unknown nilcharacter type {kind!r}")
        if np.any(freq != np.round(freq)):
            raise ParameterError("character frequencies must be integers")
        self.frequency = freq
        self.sup_norm = 1.0
        trivial = not np.any(freq)
        self._mean = 1.0 + 0.0j if trivial else 0.0 + 0.0j
        self.regularity = Regularity(
            lipschitz_constant=2.0 * math.pi * float(np.linalg.norm(freq)),
            mean_zero=not trivial,
        )

    def eval_batch(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 2:
            pts = pts[None]
        if self.kind == "abelian":
            horiz = self.space.horizontal_proj(pts)
            return np.exp(TWO_PI_I * horiz @ self.frequency)
        return np.exp(TWO_PI_I * pts[..., :, 2] @ self.frequency)

    def mean(self):
        return self._mean, 0.0


def _smooth_bump(u):
    """C-infinity bump on (-1,1), value 1 at 0: exp(1 - 1/(1-u^2))."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ui * ui))
    return out


# sup |d/du exp(1 - 1/(1-u^2))|, computed once on a fine grid
_BUMP_SLOPE = float(
    np.max(
        np.abs(np.gradient(_smooth_bump(np.linspace(-1, 1, 200001)), 1e-5))
    )
)


class BumpObservable(Observable):
    """Smooth bump of the shortest lattice vector on one modular factor.

    Supported where shortest_vector lies in [center-width, center+width].
    The mean is cached at construction by seeded Monte Carlo over Haar
    samples; centered=True subtracts it, making the observable mean-zero up
    to the reported standard error.
    """

    def __init__(
        self,
        space: ModularProductSpace,
        center: float,
        width: float,
        factor: int = 0,
        centered: bool = False,
        mc_samples: int = 200_000,
        seed: int = 20260810,
    ):
        if not isinstance(space, ModularProductSpace):
            raise SpaceMismatchError("BumpObservable lives on a modular product")
        if center <= 0.0 or width <= 0.0:
            raise ParameterError("bump needs center > 0 and width > 0")
        if not 0 <= factor < space.d:
            raise ParameterError(f"factor index {factor} out of range")
        self.space = space
        self.center = float(center)
        self.width = float(width)
        self.factor = int(factor)
        self.centered = bool(centered)
        rng = np.random.default_rng(seed)
        batch = space.haar_sample_batch(mc_samples, rng)
        sv = space.shortest_vectors_batch(batch)[:, self.factor]
        vals = _smooth_bump((sv - self.center) / self.width)
        self._raw_mean = float(vals.mean())
        self._mean_err = float(vals.std(ddof=1) / math.sqrt(mc_samples))
        self.sup_norm = 1.0 + (self._raw_mean if centered else 0.0)
        lip = _BUMP_SLOPE / self.width * SHORTEST_VECTOR_LIPSCHITZ
        self.regularity = Regularity(lipschitz_constant=lip, mean_zero=centered)

    def eval_batch(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 3:
            pts = pts[None]
        sv = self.space.shortest_vectors_batch(pts)[:, self.factor]
        vals = _smooth_bump((sv - self.center) / self.width).astype(complex)
        if self.centered:
            vals = vals - self._raw_mean
        return vals

    def mean(self):
        if self.centered:
            return 0.0 + 0.0j, self._mean_err
        return complex(self._raw_mean), self._mean_err


class ProductObservable(Observable):
    """Pointwise product of observables depending on pairwise distinct
    factors of a product space; the mean factorizes over independent
    coordinates under the product Haar measure."""

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise ParameterError("need at least one part")
        space = parts[0].space
        for p in parts[1:]:
            if p.space is not space:
                raise SpaceMismatchError("all parts must share one space")
        factors = [getattr(p, "factor", None) for p in parts]
        if len(set(factors)) != len(factors):
            raise ParameterError("parts must depend on distinct factors")
        self.space = space
        self.parts = parts
        self.sup_norm = float(np.prod([p.sup_norm for p in parts]))
        means = [p.mean() for p in parts]
        m = complex(np.prod([v for v, _ in means]))
        err = 0.0
        for i, (_, e) in enumerate(means):
            err += e * abs(np.prod([abs(v) + eo for j, (v, eo) in enumerate(means) if j != i]))
        lip = 0.0
        for i, p in enumerate(parts):
            others = np.prod([q.sup_norm for j, q in enumerate(parts) if j != i])
            lip += p.lipschitz_bound() * float(others)
        self._mean = m
        self._mean_err = float(err)
        self.regularity = Regularity(
            lipschitz_constant=lip, mean_zero=(abs(m) == 0.0)
        )

    def eval_batch(self, points):
        out = self.parts[0].eval_batch(points)
        for p in self.parts[1:]:
            out = out * p.eval_batch(points)
        return out

    def mean(self):
        return self._mean, self._mean_err


def _smoothstep(u):
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


class RadialBumpObservable(Observable):
    """Smoothed indicator of the metric ball {dist(y, center) <= radius} on
    a torus: 1 inside radius - width, 0 outside radius, cubic smoothstep in
    between.  Lipschitz constant 1.5/width; the near-indicator profile
    witnesses boundary-layer (sup-norm) error bounds that smooth observables
    provably cannot.
    """

    def __init__(self, space: TorusSpace, center, radius: float, width: float):
        if not isinstance(space, TorusSpace):
            raise SpaceMismatchError("RadialBumpObservable lives on a torus")
        if radius <= 0.0 or width <= 0.0 or width > radius:
            raise ParameterError("need 0 < width <= radius")
        self.space = space
        self.center = np.asarray(center, dtype=float) % 1.0
        if self.center.shape != (space.n,):
            raise ParameterError("center must have one coordinate per torus dim")
        self.radius = float(radius)
        self.width = float(width)
        self.sup_norm = 1.0
        self._mean, self._mean_err = self._compute_mean()
        self.regularity = Regularity(lipschitz_constant=1.5 / width)

    def _compute_mean(self):
        if self.space.n == 1:
            # exact 1-D quadrature over the circle distance
            s = np.linspace(0.0, 0.5, 20001)
            prof = _smoothstep((self.radius - s) / self.width)
            return complex(2.0 * np.trapezoid(prof, s)), 1e-12
        rng = np.random.default_rng(97)
        pts = rng.random((400_000, self.space.n))
        vals = self.eval_batch(pts)
        return complex(vals.mean()), float(vals.std(ddof=1) / math.sqrt(len(vals)))

    def eval_batch(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        dist = np.sqrt(np.sum(circle_dist(pts, self.center[None, :]) ** 2, axis=1))
        return _smoothstep((self.radius - dist) / self.width).astype(complex)

    def mean(self):
        return self._mean, self._mean_err


def centered(observable: Observable):
    """Wrap an observable as f - mean(f); exact for exact-mean observables."""

    class _Centered(Observable):
        def __init__(self, base):
            self.base = base
            self.space = base.space
            m, e = base.mean()
            self._shift = m
            self._err = e
            self.sup_norm = base.sup_norm + abs(m)
            self.regularity = Regularity(
                lipschitz_constant=base.lipschitz_bound(), mean_zero=True
            )

        def eval_batch(self, points):
            return self.base.eval_batch(points) - self._shift

        def mean(self):
            return 0.0 + 0.0j, self._err

    return _Centered(observable)
