"""Concrete homogeneous spaces carrying an abelian R^d translation action.

Three families:

* TorusSpace -- T^n with the flow v |-> x + A v (mod 1) for an n x d action
  matrix A of full column rank.
* HeisenbergProductSpace -- products of 3-dimensional Heisenberg nilmanifolds
  H/H(Z) in Mal'cev coordinates, factor i flowing along
  u_i(t) = exp(t * [[0, a_i, g_i], [0, 0, b_i], [0, 0, 0]]).
* ModularProductSpace -- products of SL(2,R)/SL(2,Z), each factor carrying
  its own horocycle flow; points are stored as Lagrange-reduced determinant-1
  matrices (the basis of the lattice g Z^2).

Conventions (documented because the group laws do not fix them):
the Heisenberg group law is (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x*y'),
the lattice is the integer points, flows act by left multiplication and
reduction multiplies lattice elements on the right, so translation descends
to the coset space exactly.  Points are immutable numpy arrays; every
operation returns the reduced canonical representative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidPointError, ParameterError

MODULAR_DET_TOL = 1e-9


def _check_finite(v):
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ParameterError("flow vector must be finite")
    return v


def circle_dist(a, b):
    """Distance on R/Z, elementwise."""
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % 1.0
    return np.minimum(d, 1.0 - d)


# ---------------------------------------------------------------------------
# torus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusSpace:
    """T^n with translation directions given by the columns of action_matrix."""

    n: int
    action_matrix: np.ndarray = None  # (n, d); identity when omitted

    def __post_init__(self):
        a = self.action_matrix
        if a is None:
            a = np.eye(self.n)
        a = np.asarray(a, dtype=float)
        if a.shape[0] != self.n:
            raise ParameterError("action matrix must have n rows")
        if np.linalg.matrix_rank(a) < a.shape[1]:
            raise ParameterError("action matrix must have full column rank")
        object.__setattr__(self, "action_matrix", a)

    @property
    def flow_dim(self) -> int:
        return self.action_matrix.shape[1]

    def reduce(self, raw):
        return np.asarray(raw, dtype=float) % 1.0

    def translate(self, point, v):
        v = _check_finite(v)
        return (np.asarray(point, dtype=float) + self.action_matrix @ v) % 1.0

    def translate_batch(self, point, vs):
        vs = _check_finite(vs)
        return (np.asarray(point, dtype=float)[None, :] + vs @ self.action_matrix.T) % 1.0

    def haar_sample(self, rng):
        return rng.random(self.n)

    def distance(self, p, q):
        return float(np.sqrt(np.sum(circle_dist(p, q) ** 2)))

    def pullback_frequency(self, n_bar):
        """Flow-space frequency A^T n_bar of the character e(<n_bar, x>)."""
        return self.action_matrix.T @ np.asarray(n_bar, dtype=float)


# ---------------------------------------------------------------------------
# Heisenberg products
# ---------------------------------------------------------------------------


def heisenberg_mul(g, h):
    """Group law (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x y'), batched."""
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    out = g + h
    out[..., 2] += g[..., 0] * h[..., 1]
    return out

def heisenberg_inv(g):
    g = np.asarray(g, dtype=float)
    out = -g.copy()
    out[..., 2] += g[..., 0] * g[..., 1]
    return out


def heisenberg_flow_matrix(alpha, beta, gamma, t):
    """exp(t * upper-triangular generator): exact, the generator is nilpotent."""
    return np.array(
        [
            [1.0, t * alpha, t * gamma + 0.5 * t * t * alpha * beta],
            [0.0, 1.0, t * beta],
            [0.0, 0.0, 1.0],
        ]
    )


def _rational_dependent(alpha, beta) -> bool:
    from fractions import Fraction
    from numbers import Rational

    return isinstance(alpha, (int, Fraction, Rational)) and isinstance(
        beta, (int, Fraction, Rational)
    )


@dataclass(frozen=True)
class HeisenbergProductSpace:
    """Product of d Heisenberg nilmanifolds with per-factor flow (a_i, b_i, g_i).

    Points are (d, 3) arrays of Mal'cev coordinates in [0,1)^3 per factor.
    minimality requires 1, a_i, b_i rationally independent per factor; the
    check fires only for explicitly rational inputs (int / Fraction), where
    independence is impossible.
    """

    flows: tuple
    minimal: bool = False

    def __post_init__(self):
        flows = tuple(tuple(float(c) for c in f) for f in self.flows)
        if not flows:
            raise ParameterError("need at least one Heisenberg factor")
        for f in self.flows:
            if len(f) != 3:
                raise ParameterError("each flow needs (alpha, beta, gamma)")
            if self.minimal and _rational_dependent(f[0], f[1]):
                raise ParameterError(
                    "minimality requires 1, alpha, beta rationally independent; "
                    f"rational pair {f[:2]} cannot be"
                )
        object.__setattr__(self, "flows", flows)

    @property
    def d(self) -> int:
        return len(self.flows)

    @property
    def flow_dim(self) -> int:
        return self.d

    @property
    def horizontal_dim(self) -> int:
        return 2 * self.d

    def flow_coords(self, v):
        """Mal'cev coordinates of u_v = (u_1(v_1), ..., u_d(v_d)); shape like v + (3,)."""
        v = _check_finite(v)
        ab = np.array(self.flows)  # (d, 3)
        t = np.asarray(v, dtype=float)[..., None]
        coords = np.empty(t.shape[:-1] + (3,))
        coords[..., 0] = t[..., 0] * ab[..., 0]
        coords[..., 1] = t[..., 0] * ab[..., 1]
        coords[..., 2] = t[..., 0] * ab[..., 2] + 0.5 * t[..., 0] ** 2 * ab[..., 0] * ab[..., 1]
        return coords

    def reduce(self, raw):
        """Canonical representative of g H(Z)^d in [0,1)^3 per factor.

        Right-multiplying by (a,b,c) in Z^3 sends (x,y,z) to
        (x+a, y+b, z+c+x*b); reducing y shifts z by -x*floor(y).
        """
        return self.reduce_batch(np.asarray(raw, dtype=float).reshape(self.d, 3))

    def reduce_batch(self, raw):
        """reduce() over any leading batch shape (..., d, 3)."""
        g = np.asarray(raw, dtype=float)
        x, y, z = g[..., 0], g[..., 1], g[..., 2]
        out = np.empty_like(g)
        out[..., 0] = x % 1.0
        out[..., 1] = y % 1.0
        out[..., 2] = (z - x * np.floor(y)) % 1.0
        return out

    def translate(self, point, v):
        u = self.flow_coords(np.asarray(v, dtype=float).reshape(self.d))
        return self.reduce(heisenberg_mul(u, np.asarray(point, dtype=float)))

    def translate_batch(self, point, vs):
        vs = np.asarray(vs, dtype=float)  # (m, d)
        u = self.flow_coords(vs)  # (m, d, 3)
        return self.reduce_batch(heisenberg_mul(u, np.asarray(point, dtype=float)[None, :, :]))

    def horizontal_proj(self, point):
        """Projection to the horizontal torus T^{2d}: per factor (x_i, y_i)."""
        p = np.asarray(point, dtype=float)
        return p[..., :, :2].reshape(p.shape[:-2] + (2 * self.d,)) % 1.0

    def horizontal_derivative(self):
        """(d, 2d) matrix D with horizontal_proj(u_v.x) = proj(x) + D^T-row v.

        Row i holds the horizontal shift rate (alpha_i, beta_i) in factor i's
        block; zero elsewhere (factors act independently).
        """
        out = np.zeros((self.d, 2 * self.d))
        for i, (a, b, _) in enumerate(self.flows):
            out[i, 2 * i] = a
            out[i, 2 * i + 1] = b
        return out

    def haar_sample(self, rng):
        return rng.random((self.d, 3))

    def distance(self, p, q):
        return float(np.sqrt(np.sum(circle_dist(p, q) ** 2)))


# ---------------------------------------------------------------------------
# modular products
# ---------------------------------------------------------------------------


def lagrange_reduce_batch(gs):
    """Lagrange/Gauss reduction of an (m, 2, 2) stack of lattice bases.

    Column operations are in SL(2,Z) (translation and swap-with-negation),
    so determinants are preserved.  The result is canonicalized by -I so the
    first basis vector's largest-magnitude entry is positive.
    """
    gs = np.asarray(gs, dtype=float)
    b1 = gs[:, :, 0].copy()
    b2 = gs[:, :, 1].copy()
    for _ in range(256):
        n1 = np.sum(b1 * b1, axis=1)
        n2 = np.sum(b2 * b2, axis=1)
        swap = n1 > n2
        if np.any(swap):
            tmp = b1[swap].copy()
            b1[swap] = b2[swap]
            b2[swap] = -tmp
            n1 = np.sum(b1 * b1, axis=1)
        mu = np.round(np.sum(b1 * b2, axis=1) / n1)
        changed = bool(np.any(swap)) or bool(np.any(mu != 0.0))
        if np.any(mu != 0.0):
            b2 = b2 - mu[:, None] * b1
        if not changed:
            break
    else:
        raise InvalidPointError("lattice reduction failed to converge")
    lead = np.take_along_axis(
        b1, np.argmax(np.abs(b1), axis=1)[:, None], axis=1
    )[:, 0]
    flip = lead < 0.0
    b1[flip] = -b1[flip]
    b2[flip] = -b2[flip]
    return np.stack([b1, b2], axis=2)


def lagrange_reduce(g):
    """Reduced basis of the single lattice with basis columns of g."""
    return lagrange_reduce_batch(np.asarray(g, dtype=float)[None])[0]


def shortest_vector(g) -> float:
    """Length of the shortest nonzero vector of the lattice g Z^2."""
    r = lagrange_reduce(np.asarray(g, dtype=float))
    return float(np.linalg.norm(r[:, 0]))


def shortest_vector_batch(gs):
    """Vectorized shortest-vector lengths for an (m, 2, 2) stack of bases."""
    r = lagrange_reduce_batch(gs)
    return np.linalg.norm(r[:, :, 0], axis=1)


@dataclass(frozen=True)
class ModularProductSpace:
    """Product of d copies of SL(2,R)/SL(2,Z) with independent horocycle flows."""

    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ParameterError("need at least one modular factor")

    @property
    def flow_dim(self) -> int:
        return self.d

    def reduce(self, raw):
        g = np.asarray(raw, dtype=float).reshape(self.d, 2, 2)
        det = g[:, 0, 0] * g[:, 1, 1] - g[:, 0, 1] * g[:, 1, 0]
        if np.any(np.abs(det - 1.0) > MODULAR_DET_TOL):
            raise InvalidPointError(f"determinants {det} stray from 1")
        return lagrange_reduce_batch(g / np.sqrt(det)[:, None, None])

    def translate(self, point, v):
        v = _check_finite(np.asarray(v, dtype=float).reshape(self.d))
        g = np.asarray(point, dtype=float).copy()
        # left multiplication by [[1, t], [0, 1]] adds t * (second row)
        g[:, 0, :] += v[:, None] * g[:, 1, :]
        return self.reduce(g)

    def translate_batch(self, point, vs):
        vs = _check_finite(np.asarray(vs, dtype=float))  # (m, d)
        g = np.asarray(point, dtype=float)
        out = np.broadcast_to(g[None], (vs.shape[0],) + g.shape).copy()
        out[:, :, 0, :] += vs[:, :, None] * out[:, :, 1, :]
        m = vs.shape[0]
        flat = lagrange_reduce_batch(out.reshape(m * self.d, 2, 2))
        return flat.reshape(m, self.d, 2, 2)

    def haar_sample(self, rng):
        return self.haar_sample_batch(1, rng)[0]

    def haar_sample_batch(self, m, rng):
        """Haar-distributed points, sampled exactly on a fundamental domain.

        On the auxiliary right-coset space the standard parametrization
        h = n(x) a(y) k(theta) with x + iy in the modular fundamental domain
        carries the measure dx dy/y^2 dtheta; x has density 1/sqrt(1-x^2)
        (inverse-sampled through arcsin), y given x follows 1/y^2 above
        sqrt(1-x^2) (inverse-sampled in closed form) and theta is uniform.
        Inversion h -> h^{-1} maps that law to Haar on this coset space.
        """
        out = np.empty((m, self.d, 2, 2))
        for i in range(self.d):
            x = np.sin(rng.uniform(-math.pi / 6.0, math.pi / 6.0, size=m))
            y = np.sqrt(1.0 - x * x) / (1.0 - rng.random(m))
            theta = rng.uniform(0.0, 2.0 * math.pi, size=m)
            sq = np.sqrt(y)
            ct, st = np.cos(theta), np.sin(theta)
            # h^{-1} = k(-theta) a(1/y) n(-x)
            hinv = np.empty((m, 2, 2))
            hinv[:, 0, 0] = ct / sq
            hinv[:, 0, 1] = -ct * x / sq + st * sq
            hinv[:, 1, 0] = -st / sq
            hinv[:, 1, 1] = st * x / sq + ct * sq
            out[:, i] = hinv
        flat = lagrange_reduce_batch(out.reshape(m * self.d, 2, 2))
        return flat.reshape(m, self.d, 2, 2)

    def shortest_vectors(self, point):
        p = np.asarray(point, dtype=float)
        return shortest_vector_batch(p.reshape(self.d, 2, 2))

    def shortest_vectors_batch(self, points):
        pts = np.asarray(points, dtype=float)  # (m, d, 2, 2)
        m = pts.shape[0]
        flat = pts.reshape(m * self.d, 2, 2)
        return shortest_vector_batch(flat).reshape(m, self.d)

    def distance(self, p, q):
        return float(np.sqrt(np.sum((np.asarray(p) - np.asarray(q)) ** 2)))


# ---------------------------------------------------------------------------
# spec-style module-level operations and serialization
# ---------------------------------------------------------------------------


def translate(space, point, v):
    return space.translate(point, v)


def reduce(space, raw):
    return space.reduce(raw)


def haar_sample(space, seed):
    """Deterministic Haar-ish sample from an integer seed."""
    return space.haar_sample(np.random.default_rng(seed))


def horizontal_proj(space: HeisenbergProductSpace, point):
    return space.horizontal_proj(point)


def point_to_jsonable(point):
    return np.asarray(point, dtype=float).tolist()


def point_from_jsonable(space, data):
    p = np.asarray(data, dtype=float)
    if isinstance(space, TorusSpace):
        return p.reshape(space.n)
    if isinstance(space, HeisenbergProductSpace):
        return p.reshape(space.d, 3)
    return p.reshape(space.d, 2, 2)
