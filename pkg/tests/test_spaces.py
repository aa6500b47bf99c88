"""Space actions, reduction, sampling and the lattice shortest vector."""

import math

import numpy as np
import pytest

from sparseavg import spaces
from sparseavg.errors import InvalidPointError, ParameterError
from sparseavg.spaces import (
    HeisenbergProductSpace,
    ModularProductSpace,
    TorusSpace,
    heisenberg_flow_matrix,
    heisenberg_inv,
    heisenberg_mul,
    lagrange_reduce,
    shortest_vector,
)

TORUS = TorusSpace(2)
HEIS1 = HeisenbergProductSpace(((1.0, 1.0, 0.0),))
HEIS2 = HeisenbergProductSpace(((math.sqrt(2), math.sqrt(3), 0.0), (math.sqrt(5), math.sqrt(7), 0.25)))
MOD1 = ModularProductSpace(1)
MOD2 = ModularProductSpace(2)


def test_torus_translate_example():
    x = np.array([0.5, 0.5])
    got = TORUS.translate(x, np.array([0.7, 0.8]))
    np.testing.assert_allclose(got, [0.2, 0.3], atol=1e-12)


def test_torus_reduce_example():
    got = TORUS.reduce(np.array([1.25, -0.5]))
    np.testing.assert_allclose(got, [0.25, 0.5], atol=1e-15)


def test_heisenberg_flow_matrix_examples():
    np.testing.assert_allclose(heisenberg_flow_matrix(1.0, 1.0, 0.0, 0.0), np.eye(3))
    got = heisenberg_flow_matrix(1.0, 1.0, 0.0, 2.0)
    np.testing.assert_allclose(got, [[1, 2, 2], [0, 1, 2], [0, 0, 1]])


def test_heisenberg_flow_one_parameter_property():
    rng = np.random.default_rng(5)
    for _ in range(25):
        a, b, g = rng.normal(size=3)
        t, s = rng.normal(size=2)
        lhs = heisenberg_flow_matrix(a, b, g, t) @ heisenberg_flow_matrix(a, b, g, s)
        rhs = heisenberg_flow_matrix(a, b, g, t + s)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_heisenberg_translate_example():
    # (alpha,beta,gamma)=(1,1,0), t=2 from the identity reduces to the identity
    got = HEIS1.translate(np.zeros((1, 3)), np.array([2.0]))
    np.testing.assert_allclose(got, np.zeros((1, 3)), atol=1e-12)


def test_heisenberg_reduce_right_coset_invariance():
    # reduce(g * lambda) == reduce(g) for explicit lattice elements
    rng = np.random.default_rng(11)
    for _ in range(50):
        g = rng.uniform(-3, 3, size=3)
        lam = rng.integers(-4, 5, size=3).astype(float)
        prod = heisenberg_mul(g, lam)
        a = HEIS1.reduce(g.reshape(1, 3))
        b = HEIS1.reduce(prod.reshape(1, 3))
        np.testing.assert_allclose(a, b, atol=1e-10)


def test_heisenberg_reduce_idempotent():
    rng = np.random.default_rng(12)
    raw = rng.uniform(-5, 5, size=(100, 2, 3))
    for g in raw:
        once = HEIS2.reduce(g)
        twice = HEIS2.reduce(once)
        np.testing.assert_allclose(once, twice, atol=1e-12)


def test_heisenberg_central_commutator_is_symplectic_form():
    # u v u^-1 v^-1 = (0, 0, x_u y_v - y_u x_v) exactly
    rng = np.random.default_rng(13)
    for _ in range(50):
        u = rng.uniform(-2, 2, size=3)
        v = rng.uniform(-2, 2, size=3)
        comm = heisenberg_mul(
            heisenberg_mul(u, v), heisenberg_mul(heisenberg_inv(u), heisenberg_inv(v))
        )
        assert abs(comm[0]) < 1e-12 and abs(comm[1]) < 1e-12
        sympl = u[0] * v[1] - u[1] * v[0]
        assert comm[2] == pytest.approx(sympl, abs=1e-12)


def test_horizontal_projection():
    p = np.array([[0.2, 0.3, 0.9]])
    np.testing.assert_allclose(HEIS1.horizontal_proj(p), [0.2, 0.3])
    # z-coordinate independence
    q = np.array([[0.2, 0.3, 0.1]])
    np.testing.assert_allclose(HEIS1.horizontal_proj(p), HEIS1.horizontal_proj(q))


def test_horizontal_projection_intertwines():
    space = HeisenbergProductSpace(((0.3, 0.4, 0.0),))
    base = np.zeros((1, 3))
    moved = space.translate(base, np.array([1.0]))
    np.testing.assert_allclose(space.horizontal_proj(moved), [0.3, 0.4], atol=1e-12)
    # generic point and time
    rng = np.random.default_rng(3)
    x = space.haar_sample(rng)
    t = 0.73
    lhs = space.horizontal_proj(space.translate(x, np.array([t])))
    rhs = (space.horizontal_proj(x) + t * np.array([0.3, 0.4])) % 1.0
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_action_axiom_all_spaces():
    rng = np.random.default_rng(17)
    for space, shape in ((TORUS, None), (HEIS2, None), (MOD2, None)):
        for _ in range(100):
            x = space.haar_sample(rng)
            v = rng.uniform(-3, 3, size=space.flow_dim)
            w = rng.uniform(-3, 3, size=space.flow_dim)
            a = space.translate(space.translate(x, v), w)
            b = space.translate(x, v + w)
            tol = 1e-10 if isinstance(space, ModularProductSpace) else 1e-12
            np.testing.assert_allclose(a, b, atol=tol)


def test_translate_batch_matches_single():
    rng = np.random.default_rng(23)
    for space in (TORUS, HEIS2, MOD2):
        x = space.haar_sample(rng)
        vs = rng.uniform(-2, 2, size=(7, space.flow_dim))
        batch = space.translate_batch(x, vs)
        for j in range(7):
            np.testing.assert_allclose(batch[j], space.translate(x, vs[j]), atol=1e-10)


def test_translate_rejects_nonfinite():
    with pytest.raises(ParameterError):
        TORUS.translate(np.zeros(2), np.array([np.nan, 0.0]))


def test_modular_translate_identity_at_zero():
    x = MOD1.reduce(np.eye(2).reshape(1, 2, 2))
    got = MOD1.translate(x, np.zeros(1))
    np.testing.assert_allclose(got, x, atol=1e-14)


def test_modular_reduce_rejects_bad_determinant():
    with pytest.raises(InvalidPointError):
        MOD1.reduce(np.array([[[2.0, 0.0], [0.0, 1.0]]]))


def test_shortest_vector_examples():
    assert shortest_vector(np.eye(2)) == pytest.approx(1.0, abs=1e-14)
    assert shortest_vector(np.diag([2.0, 0.5])) == pytest.approx(0.5, abs=1e-14)
    assert shortest_vector(np.array([[1.0, 0.5], [0.0, 1.0]])) == pytest.approx(
        1.0, abs=1e-14
    )


def test_lagrange_reduce_example():
    red = lagrange_reduce(np.diag([2.0, 0.5]))
    assert np.linalg.norm(red[:, 0]) == pytest.approx(0.5)
    det = red[0, 0] * red[1, 1] - red[0, 1] * red[1, 0]
    assert det == pytest.approx(1.0, abs=1e-12)


def _sl2z_words(rng, n, max_len=5):
    S = np.array([[0.0, -1.0], [1.0, 0.0]])
    T = np.array([[1.0, 1.0], [0.0, 1.0]])
    Ti = np.array([[1.0, -1.0], [0.0, 1.0]])
    gens = [S, T, Ti]
    out = []
    for _ in range(n):
        g = np.eye(2)
        for _ in range(rng.integers(1, max_len + 1)):
            g = g @ gens[rng.integers(0, 3)]
        out.append(g)
    return out


def test_shortest_vector_lattice_invariance():
    rng = np.random.default_rng(31)
    x = MOD1.haar_sample(rng)[0]
    for gamma in _sl2z_words(rng, 20):
        assert shortest_vector(x @ gamma) == pytest.approx(
            shortest_vector(x), rel=1e-10
        )


def test_modular_reduce_invariant_under_lattice():
    rng = np.random.default_rng(37)
    x = MOD1.haar_sample(rng)[0]
    for gamma in _sl2z_words(rng, 10):
        a = MOD1.reduce((x @ gamma).reshape(1, 2, 2))
        b = MOD1.reduce(x.reshape(1, 2, 2))
        np.testing.assert_allclose(a, b, atol=1e-9)


def test_haar_sample_deterministic():
    for space in (TORUS, HEIS2, MOD2):
        a = spaces.haar_sample(space, 123)
        b = spaces.haar_sample(space, 123)
        np.testing.assert_array_equal(a, b)


def test_torus_haar_character_mean():
    rng = np.random.default_rng(41)
    pts = rng.random((100_000, 2))
    vals = np.exp(2j * math.pi * pts[:, 0])
    assert abs(vals.mean()) < 3.0 / math.sqrt(100_000) * 1.5


def test_heisenberg_haar_central_mean():
    rng = np.random.default_rng(43)
    pts = rng.random((100_000, 1, 3))
    vals = np.exp(2j * math.pi * pts[:, 0, 2])
    assert abs(vals.mean()) < 3.0 / math.sqrt(100_000) * 1.5


def test_modular_haar_determinants_and_reduction():
    rng = np.random.default_rng(47)
    pts = MOD1.haar_sample_batch(500, rng)
    dets = pts[:, 0, 0, 0] * pts[:, 0, 1, 1] - pts[:, 0, 0, 1] * pts[:, 0, 1, 0]
    np.testing.assert_allclose(dets, 1.0, atol=1e-12)
    # Lagrange-reduced: |b1| <= |b2| and |<b1,b2>| <= |b1|^2 / 2
    b1 = pts[:, 0, :, 0]
    b2 = pts[:, 0, :, 1]
    n1 = np.sum(b1 * b1, axis=1)
    n2 = np.sum(b2 * b2, axis=1)
    assert np.all(n1 <= n2 + 1e-12)
    assert np.all(np.abs(np.sum(b1 * b2, axis=1)) <= 0.5 * n1 + 1e-12)


def test_modular_haar_shortest_vector_statistics():
    # shortest vectors of Haar-random lattices are at most (4/3)^(1/4) = Hermite bound
    rng = np.random.default_rng(53)
    pts = MOD1.haar_sample_batch(2000, rng)
    sv = spaces.shortest_vector_batch(pts[:, 0])
    assert np.all(sv <= (4.0 / 3.0) ** 0.25 + 1e-9)
    assert sv.min() > 0.0


def test_minimality_check_rejects_rational_flows():
    with pytest.raises(ParameterError):
        HeisenbergProductSpace(((1, 2, 0.0),), minimal=True)
    # floats are accepted (check applies only to explicitly rational input)
    HeisenbergProductSpace(((math.sqrt(2), math.sqrt(3), 0.0),), minimal=True)


def test_point_serialization_roundtrip():
    rng = np.random.default_rng(59)
    for space in (TORUS, HEIS2, MOD2):
        x = space.haar_sample(rng)
        data = spaces.point_to_jsonable(x)
        back = spaces.point_from_jsonable(space, data)
        np.testing.assert_array_equal(back, x)


def test_reduction_idempotent_all_spaces():
    rng = np.random.default_rng(61)
    for _ in range(100):
        raw_t = rng.uniform(-5, 5, size=2)
        once = TORUS.reduce(raw_t)
        np.testing.assert_allclose(TORUS.reduce(once), once, atol=1e-15)
    for _ in range(100):
        raw_h = rng.uniform(-5, 5, size=(2, 3))
        once = HEIS2.reduce(raw_h)
        np.testing.assert_allclose(HEIS2.reduce(once), once, atol=1e-12)
    base = MOD2.haar_sample_batch(100, rng)
    for x in base:
        once = MOD2.reduce(x)
        np.testing.assert_allclose(MOD2.reduce(once), once, atol=1e-12)


def test_modular_determinant_stable_under_many_translations():
    rng = np.random.default_rng(67)
    x = MOD2.haar_sample(rng)
    for _ in range(50):
        x = MOD2.translate(x, rng.uniform(-20, 20, size=2))
    dets = x[:, 0, 0] * x[:, 1, 1] - x[:, 0, 1] * x[:, 1, 0]
    np.testing.assert_allclose(dets, 1.0, atol=1e-12)


def test_modular_haar_matches_siegel_shortest_vector_law():
    # Siegel's mean-value formula: a Haar-random unimodular planar lattice
    # has E[# primitive nonzero points in a radius-s ball] = pi s^2/zeta(2);
    # points pair as +-v, so P(shortest <= s) ~ pi s^2/(2 zeta(2)) small-s.
    rng = np.random.default_rng(101)
    pts = MOD1.haar_sample_batch(200_000, rng)
    sv = spaces.shortest_vector_batch(pts[:, 0])
    zeta2 = math.pi**2 / 6.0
    for s in (0.2, 0.3):
        emp = float(np.mean(sv <= s))
        pred = math.pi * s * s / (2.0 * zeta2)
        assert abs(emp - pred) <= 0.08 * pred, (s, emp, pred)
