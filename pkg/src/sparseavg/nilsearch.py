"""Horizontal-character obstruction machinery on Heisenberg products.

The dichotomy test: either orbit averages of Lipschitz observables
equidistribute at the scale requested, or some bounded-height horizontal
character pairs slowly with the projected orbit.  This module enumerates
candidate characters, computes their orbit frequencies, searches for
obstructions, estimates the measure of exceptional directions and performs
the van der Corput complexity reduction of nilcharacters.

Scan order: obstruction candidates are scanned shell by shell in the height
|z|_inf, restricted to canonical representatives (first nonzero coordinate
positive; z and -z define conjugate characters), lexicographically inside a
shell.  The reported obstruction is the first hit in that order, which makes
the search deterministic and tie-breaks testable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ParameterError, SpaceMismatchError
from .observables import NilCharacter, Observable, Regularity
from .spaces import HeisenbergProductSpace

ENUMERATION_CAP = 5_000_000


def enumerate_characters(p: int, height_bound: float, cap: int = ENUMERATION_CAP):
    """All nonzero z in Z^p with |z|_inf <= height_bound, lexicographic."""
    if height_bound < 1:
        raise ParameterError(f"height bound must be >= 1, got {height_bound}")
    h = int(math.floor(height_bound))
    total = (2 * h + 1) ** p - 1
    if total > cap:
        raise CapacityError(
            f"enumeration of {total} characters exceeds the cap of {cap}"
        )
    rng = range(-h, h + 1)
    return [z for z in itertools.product(rng, repeat=p) if any(z)]


def canonical_characters(p: int, height_bound: float, cap: int = ENUMERATION_CAP):
    """Obstruction scan order: shells of growing |z|_inf, canonical
    representatives only (first nonzero coordinate positive), lexicographic
    within a shell."""
    if height_bound < 1:
        raise ParameterError(f"height bound must be >= 1, got {height_bound}")
    h = int(math.floor(height_bound))
    if ((2 * h + 1) ** p - 1) // 2 > cap:
        raise CapacityError(f"canonical enumeration exceeds the cap of {cap}")
    for shell in range(1, h + 1):
        rng = range(-shell, shell + 1)
        for z in itertools.product(rng, repeat=p):
            if max(abs(c) for c in z) != shell:
                continue
            lead = next((c for c in z if c), 0)
            if lead <= 0:
                continue
            yield z


def orbit_frequency(space: HeisenbergProductSpace, z, direction) -> float:
    """Linear frequency of t -> <z, psi(u_{t direction}.x)>: the pairing of z
    with the horizontal shift rate; independent of the base point."""
    if not isinstance(space, HeisenbergProductSpace):
        raise SpaceMismatchError("orbit frequencies live on Heisenberg products")
    z = np.asarray(z, dtype=float)
    if z.shape != (2 * space.d,):
        raise ParameterError(f"character must lie in Z^{2 * space.d}")
    direction = np.asarray(direction, dtype=float)
    rates = space.horizontal_derivative()  # (d, 2d)
    return float(direction @ (rates @ z))


def coordinate_frequencies(space: HeisenbergProductSpace, z) -> np.ndarray:
    """Orbit frequencies along the coordinate flow directions e_1..e_d."""
    z = np.asarray(z, dtype=float)
    return space.horizontal_derivative() @ z


@dataclass(frozen=True)
class ObstructionReport:
    """Outcome of the obstruction search.

    tau is the scanned character's largest coordinate-direction frequency;
    an obstruction requires tau * R <= delta^(-C2), i.e. the phase of the
    character barely moves across the whole length-R orbit.
    """

    found: bool
    character: tuple | None
    tau: float | None
    height_bound: float
    threshold: float
    n_scanned: int

    def to_jsonable(self):
        return {
            "found": self.found,
            "character": None if self.character is None else list(self.character),
            "tau": self.tau,
            "height_bound": self.height_bound,
            "threshold": self.threshold,
            "n_scanned": self.n_scanned,
        }


def default_delta(R: float, beta: float, C1: float, C2: float, p: int) -> float:
    """Grid scale R^(-beta/(C1 p + C2)) balancing the exceptional-direction
    mass against the discretization error.

    At desk-scale radii this exceeds the 1/2 hypothesis bound (for example
    R = 200, beta = 1/2, C1 = C2 = 1, p = 4 gives 0.59), so experiment
    configs carry an explicit delta and this rule is advisory.
    """
    if R <= 1.0:
        raise ParameterError(f"need R > 1, got {R}")
    if beta <= 0.0 or C1 <= 0.0 or C2 <= 0.0 or p < 1:
        raise ParameterError("need positive beta, C1, C2 and p >= 1")
    return R ** (-beta / (C1 * p + C2))


def obstruction_search(
    space: HeisenbergProductSpace,
    x,
    delta: float,
    C1: float,
    C2: float,
    R: float,
    cap: int = ENUMERATION_CAP,
) -> ObstructionReport:
    """Scan characters of height at most delta^(-C1) for one whose rescaled
    orbit frequency max_i |<z, Dpsi(e_i)>| * R stays below delta^(-C2)."""
    if not 0.0 < delta < 0.5:
        raise ParameterError(f"delta must lie in (0, 1/2), got {delta}")
    if R <= 0.0:
        raise ParameterError(f"R must be positive, got {R}")
    height = delta**-C1
    threshold = delta**-C2 / R
    n = 0
    for z in canonical_characters(2 * space.d, height, cap):
        n += 1
        tau = float(np.max(np.abs(coordinate_frequencies(space, z))))
        if tau <= threshold:
            return ObstructionReport(True, z, tau, height, threshold, n)
    return ObstructionReport(False, None, None, height, threshold, n)


@dataclass(frozen=True)
class DirectionMeasure:
    measure: float
    bound_ratio: float
    n_samples: int


def exceptional_directions(
    space: HeisenbergProductSpace, z, tau: float, angular_resolution: int = 4096
) -> DirectionMeasure:
    """Angular measure of unit directions v with |<z, Dpsi(v)>| <= tau,
    estimated on a direction grid; bound_ratio compares it to tau/|z|."""
    if tau <= 0.0:
        raise ParameterError(f"tau must be positive, got {tau}")
    z = np.asarray(z, dtype=float)
    if not np.any(z):
        raise ParameterError("character must be nonzero")
    w = space.horizontal_derivative() @ z  # frequency vector in R^d
    d = space.d
    if d == 1:
        measure = 1.0 if abs(w[0]) <= tau else 0.0
        n = 2
    elif d == 2:
        theta = 2.0 * math.pi * np.arange(angular_resolution) / angular_resolution
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        measure = float(np.mean(np.abs(dirs @ w) <= tau))
        n = angular_resolution
    else:
        rng = np.random.default_rng(angular_resolution)
        g = rng.standard_normal((angular_resolution * 8, d))
        dirs = g / np.linalg.norm(g, axis=1, keepdims=True)
        measure = float(np.mean(np.abs(dirs @ w) <= tau))
        n = angular_resolution * 8
    bound = tau / float(np.linalg.norm(z))
    return DirectionMeasure(measure, measure / bound if bound > 0 else math.inf, n)


class HorizontalPhase(Observable):
    """constant * e(<w, horizontal coordinates>) with real frequency w.

    For non-integer w this is defined through canonical Mal'cev coordinates
    (it is discontinuous across the gluing, like central characters).
    """

    def __init__(self, space: HeisenbergProductSpace, w, phase: complex = 1.0):
        self.space = space
        self.w = np.asarray(w, dtype=float)
        if self.w.shape != (2 * space.d,):
            raise ParameterError("frequency must lie in R^{2d}")
        self.phase = complex(phase)
        self.sup_norm = abs(self.phase)
        trivial = not np.any(self.w)
        self.regularity = Regularity(
            lipschitz_constant=2.0 * math.pi * float(np.linalg.norm(self.w)) * abs(phase),
            mean_zero=not trivial,
        )

    def eval_batch(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 2:
            pts = pts[None]
        horiz = pts[..., :, :2].reshape(pts.shape[:-2] + (2 * self.space.d,))
        return self.phase * np.exp(2j * math.pi * horiz @ self.w)

    def mean(self):
        if np.any(self.w):
            return 0.0 + 0.0j, 0.0
        return self.phase, 0.0


class VdcDifference(Observable):
    """The van der Corput derived observable x -> f(u_h.x) * conj(f(x))."""

    def __init__(self, base: NilCharacter, h):
        if not isinstance(base, NilCharacter):
            raise SpaceMismatchError("van der Corput differencing needs a nilcharacter")
        self.base = base
        self.space = base.space
        self.h = np.asarray(h, dtype=float).reshape(self.space.d)
        self.sup_norm = base.sup_norm**2
        self.regularity = Regularity(
            lipschitz_constant=2.0 * base.lipschitz_bound() * base.sup_norm,
            mean_zero=False,
        )

    def eval_batch(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 2:
            pts = pts[None]
        from .spaces import heisenberg_mul

        u = self.space.flow_coords(self.h)  # (d, 3)
        shifted = self.space.reduce_batch(heisenberg_mul(u[None], pts))
        return self.base.eval_batch(shifted) * np.conj(self.base.eval_batch(pts))

    def mean(self):
        rng = np.random.default_rng(811)
        pts = rng.random((200_000, self.space.d, 3))
        vals = self.eval_batch(pts)
        return complex(vals.mean()), float(np.abs(vals).std() / math.sqrt(len(pts)))

    def closed_form(self):
        """Predicted reduction: (observable, exact).

        Abelian input: a constant phase (exact always).  Central input with
        per-factor shift coordinates (p_i, q_i, s_i): constant
        e(sum m_i (s_i - p_i q0_i)) times the horizontal phase with
        frequency (-m_i q0_i) in x_i and (m_i p_i) in y_i, where
        q0_i = floor(q_i); exact whenever every q_i is an integer (the
        y-shift does not wrap), e.g. whenever beta_i h_i is an integer.
        """
        space = self.space
        u = space.flow_coords(self.h)  # (d, 3) shift coordinates
        if self.base.kind == "abelian":
            z = self.base.frequency
            shift = u[:, :2].reshape(2 * space.d)
            return complex(np.exp(2j * math.pi * float(z @ shift))), True
        m = self.base.frequency
        p, q, s = u[:, 0], u[:, 1], u[:, 2]
        q0 = np.floor(q)
        w = np.zeros(2 * space.d)
        w[0::2] = -m * q0
        w[1::2] = m * p
        phase = np.exp(2j * math.pi * float(np.sum(m * (s - p * q0))))
        exact = bool(np.all(q == q0))
        return HorizontalPhase(space, w, phase), exact


def vdc_difference(observable: NilCharacter, h) -> VdcDifference:
    """Derived observable of the van der Corput trick; its closed_form()
    exposes the complexity reduction (central -> horizontal phase)."""
    return VdcDifference(observable, h)
