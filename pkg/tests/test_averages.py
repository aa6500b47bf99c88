"""Averaging operators: normalization, linearity, kernel factorization on
the torus, oracle comparisons, twisted averages and model coefficients."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from sparseavg import averages, kernels
from sparseavg.averages import (
    AverageResult,
    AverageSpec,
    annulus_average,
    ball_average,
    br_average,
    evaluate,
    mollified_average,
    model_fourier_coefficient,
    patched_sphere_average,
    sphere_average,
    tangent_patch_average,
    twisted_ball_average,
    unit_ball_volume,
)
from sparseavg.errors import ParameterError
from sparseavg.observables import (
    NilCharacter,
    RadialBumpObservable,
    TrigPolynomial,
    character,
)
from sparseavg.quadrature import QuadratureScheme
from sparseavg.spaces import HeisenbergProductSpace, TorusSpace

T1 = TorusSpace(1)
T2 = TorusSpace(2)
SCHEME = QuadratureScheme(resolution=96)


def one(space):
    return TrigPolynomial(space, {(0,) * space.n: 1.0})


def test_average_of_constant_is_one():
    x = np.array([0.3, 0.7])
    f = one(T2)
    assert ball_average(T2, f, x, 2.0).value == pytest.approx(1.0, abs=1e-14)
    assert sphere_average(T2, f, x, 2.0).value == pytest.approx(1.0, abs=1e-14)
    assert annulus_average(T2, f, x, 4.0, 0.5).value == pytest.approx(1.0, abs=1e-14)
    assert br_average(T2, f, x, 2.0, -0.5).value == pytest.approx(1.0, abs=1e-14)
    assert tangent_patch_average(T2, f, x, 2.0, 0.5, [1.0, 0.0]).value == pytest.approx(
        1.0, abs=1e-14
    )
    assert twisted_ball_average(T2, f, x, 3.0, [0.0, 0.0]).value == pytest.approx(
        1.0, abs=1e-14
    )
    res = mollified_average(T2, f, x, AverageSpec("ball", 2.0), 0.1)
    assert res.value == pytest.approx(1.0, abs=1e-12)


def test_ball_average_interval_example():
    # T^1, f = e(x), x0 = 0, R = 1: the average is sin(2 pi)/(2 pi) = 0
    f = character(T1, (1,))
    res = ball_average(T1, f, np.zeros(1), 1.0)
    assert abs(res.value) < 1e-12


def test_ball_average_kernel_factorization_example():
    f = character(T2, (1, 0))
    res = ball_average(T2, f, np.zeros(2), 2.0, SCHEME)
    assert res.value == pytest.approx(kernels.ball_kernel(2, 2.0), abs=1e-10)


def test_kernel_factorization_all_families():
    # average(e_n)(x0) = kernel(R * |n|) * e_n(x0) for each family
    x0 = np.array([0.15, 0.4])
    f = character(T2, (1, 1))
    w = math.sqrt(2.0)
    phase = f.eval(x0)
    R = 3.0
    cases = [
        (ball_average(T2, f, x0, R, SCHEME), kernels.ball_kernel(2, R * w)),
        (sphere_average(T2, f, x0, R, SCHEME), kernels.sphere_kernel(2, R * w)),
        (
            annulus_average(T2, f, x0, R, 0.7, SCHEME),
            kernels.annulus_kernel(2, R, 0.7, w),
        ),
        (
            br_average(T2, f, x0, R, -0.3, SCHEME),
            kernels.br_kernel(2, -0.3, R * w),
        ),
    ]
    for res, kval in cases:
        assert res.value == pytest.approx(kval * phase, abs=5e-9)


def test_heisenberg_sphere_average_factorizes_through_kernel():
    space = HeisenbergProductSpace(
        ((math.sqrt(2), math.sqrt(3), 0.0), (math.sqrt(5), math.sqrt(7), 0.0))
    )
    f = NilCharacter(space, "abelian", [1, 0, 1, 0])
    x0 = space.haar_sample(np.random.default_rng(2))
    w = math.hypot(math.sqrt(2), math.sqrt(5))
    R = 4.0
    res = sphere_average(space, f, x0, R, SCHEME)
    expect = kernels.sphere_kernel(2, R * w)
    assert abs(res.value) == pytest.approx(abs(expect), abs=1e-9)
    phase = f.eval(x0)
    assert res.value == pytest.approx(expect * phase, abs=1e-9)


def test_sphere_average_d1_flagged_degenerate():
    f = character(T1, (1,))
    res = sphere_average(T1, f, np.zeros(1), 0.25)
    assert "degenerate-two-point" in res.flags
    assert res.value == pytest.approx(math.cos(2 * math.pi * 0.25), abs=1e-12)


def test_annulus_average_against_double_quadrature():
    # independent nested scipy quadrature of the character integrand
    for (n1, n2), R, omega in [((1, 0), 4.0, 0.5), ((1, 1), 3.0, 1.0)]:
        f = TrigPolynomial(T2, {(n1, n2): 1.0})
        x0 = np.array([0.2, 0.6])
        res = annulus_average(T2, f, x0, R, omega, SCHEME)
        w = math.hypot(n1, n2)
        width = R**omega

        def circle_avg(r):
            re, _ = quad(
                lambda th: math.cos(2 * math.pi * r * w * math.cos(th)),
                0.0,
                2.0 * math.pi,
                limit=600,
            )
            return re / (2.0 * math.pi)

        t_int, _ = quad(lambda t: circle_avg(R / 2.0 + t), 0.0, width, limit=600)
        oracle = (t_int / width) * f.eval(x0)
        assert abs(res.value - oracle) <= 1e-6 * max(abs(oracle), 1e-2)


def test_br_equals_ball_at_alpha_zero():
    rng = np.random.default_rng(10)
    for _ in range(10):
        n = rng.integers(1, 4, size=2)
        f = TrigPolynomial(T2, {tuple(n): 1.0})
        x0 = rng.random(2)
        R = float(rng.uniform(0.5, 5.0))
        a = br_average(T2, f, x0, R, 0.0, SCHEME)
        b = ball_average(T2, f, x0, R, SCHEME)
        assert abs(a.value - b.value) <= max(1e-6 * abs(b.value), 1e-9)


def test_br_average_kernel_example():
    f = character(T2, (1, 0))
    x0 = np.array([0.1, 0.9])
    res = br_average(T2, f, x0, 2.5, 0.5, SCHEME)
    expect = kernels.br_kernel(2, 0.5, 2.5) * f.eval(x0)
    assert res.value == pytest.approx(expect, abs=1e-9)


def test_mollified_average_delta_limit():
    # |mollified - unmollified| -> 0 for Lipschitz f as delta -> 0
    f = RadialBumpObservable(T2, [0.5, 0.5], radius=0.3, width=0.1)
    x0 = np.array([0.05, 0.35])
    spec = AverageSpec("ball", 1.5, scheme=QuadratureScheme(resolution=64))
    base = evaluate(T2, f, x0, spec).value
    gaps = []
    for delta in (0.1, 0.01):
        mol = mollified_average(T2, f, x0, spec, delta).value
        gaps.append(abs(mol - base))
    assert gaps[1] < gaps[0]
    assert gaps[1] < f.lipschitz_bound() * 0.01


def test_tangent_patch_level_set_is_exact():
    # patch orthogonal to the frequency: integrand constant on the patch
    f = character(T2, (2, 0))
    x0 = np.array([0.3, 0.8])
    R, beta = 5.0, 0.5
    v_hat = np.array([1.0, 0.0])  # parallel to n, so the patch is a level set
    res = tangent_patch_average(T2, f, x0, R, beta, v_hat)
    expect = f.eval(T2.translate(x0, R * v_hat))
    assert res.value == pytest.approx(expect, abs=1e-12)
    assert abs(res.value) == pytest.approx(1.0, abs=1e-12)


def test_patched_sphere_comparison_decays_in_R():
    # |sphere_average - angular combination of patches| shrinks as R grows
    f = character(T2, (1, 0))
    x0 = np.array([0.0, 0.0])
    beta = 0.5
    gaps = []
    for R in (4.0, 16.0, 64.0):
        scheme = QuadratureScheme(resolution=max(96, int(8 * R)))
        s = sphere_average(T2, f, x0, R, scheme)
        p = patched_sphere_average(T2, f, x0, R, beta, scheme, n_directions=256)
        gaps.append(abs(s.value - p.value))
    assert gaps[2] < gaps[0]
    slope = np.polyfit(np.log([4.0, 16.0, 64.0]), np.log(gaps), 1)[0]
    assert slope < -0.2


def test_twisted_null_model_no_decay():
    # matching frequency: constant-modulus integrand, modulus exactly 1
    f = character(T2, (2, 1))
    x0 = np.array([0.31, 0.77])
    for R in (1.0, 10.0, 100.0):
        res = twisted_ball_average(T2, f, x0, R, [-2.0, -1.0])
        assert abs(res.value) == pytest.approx(1.0, abs=1e-10)


def test_twisted_average_decays_off_resonance():
    f = character(T2, (1, 0))
    x0 = np.array([0.1, 0.2])
    vals = []
    for R in (2.0, 8.0, 32.0):
        scheme = QuadratureScheme(resolution=max(64, int(10 * R)))
        vals.append(abs(twisted_ball_average(T2, f, x0, R, [0.3, 0.0], scheme).value))
    assert vals[2] < vals[0]


def test_model_fourier_coefficient_mass_ratio():
    # f = 1, n = 0: the model's mean is vol(B_R)/(2R)^d = pi/4 in d = 2
    f = one(T2)
    res = model_fourier_coefficient(T2, f, np.zeros(2), 3.0, [0, 0])
    assert res.value == pytest.approx(math.pi / 4.0, abs=1e-12)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0)


def test_model_coefficient_decay_matches_ball_kernel():
    # mean-zero character: a_{0,R} = (pi/4) ball_kernel(2, R |n|)
    f = character(T2, (1, 0))
    x0 = np.array([0.0, 0.0])
    for R in (2.0, 5.0):
        scheme = QuadratureScheme(resolution=128)
        res = model_fourier_coefficient(T2, f, x0, R, [0, 0], scheme)
        expect = math.pi / 4.0 * kernels.ball_kernel(2, R)
        assert res.value == pytest.approx(expect, abs=1e-9)


def test_linearity_in_observable():
    rng = np.random.default_rng(21)
    x0 = rng.random(2)
    f1 = character(T2, (1, 0))
    f2 = character(T2, (0, 2))
    for _ in range(5):
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        combo = TrigPolynomial(T2, {(1, 0): a, (0, 2): b})
        for avg in (
            lambda g: ball_average(T2, g, x0, 1.7),
            lambda g: sphere_average(T2, g, x0, 1.7),
            lambda g: br_average(T2, g, x0, 1.7, 0.5),
        ):
            lhs = avg(combo).value
            rhs = a * avg(f1).value + b * avg(f2).value
            assert lhs == pytest.approx(rhs, abs=1e-10)


def test_positivity_of_nonnegative_observables():
    f = RadialBumpObservable(T2, [0.5, 0.5], radius=0.25, width=0.1)
    rng = np.random.default_rng(23)
    for _ in range(5):
        x0 = rng.random(2)
        res = ball_average(T2, f, x0, float(rng.uniform(0.5, 3.0)))
        assert res.value.real >= -1e-12


def test_quadrature_convergence_battery():
    # doubling the resolution moves the value by less than the reported
    # error, on the standard battery (a kinky Lipschitz observable, all
    # families, resolutions from the default 64 up)
    f = RadialBumpObservable(T2, [0.5, 0.5], radius=0.3, width=0.1)
    x0 = np.array([0.1, 0.8])
    battery = [
        lambda s: ball_average(T2, f, x0, 1.3, s),
        lambda s: sphere_average(T2, f, x0, 1.3, s),
        lambda s: br_average(T2, f, x0, 1.3, -0.4, s),
        lambda s: annulus_average(T2, f, x0, 2.0, 0.8, s),
    ]
    for make in battery:
        for resolution in (64, 96, 128, 192):
            res = make(QuadratureScheme(resolution=resolution))
            res2 = make(QuadratureScheme(resolution=2 * resolution))
            assert abs(res2.value - res.value) <= res.error + 1e-12


def test_spec_validation():
    with pytest.raises(ParameterError):
        AverageSpec("cube", 1.0)
    with pytest.raises(ParameterError):
        AverageSpec("ball", -1.0)
    with pytest.raises(ParameterError):
        AverageSpec("annulus", 1.0, omega=1.5)
    with pytest.raises(ParameterError):
        AverageSpec("bochner_riesz", 1.0, alpha=-1.0)
    with pytest.raises(ParameterError):
        AverageSpec("tangent_patch", 1.0, beta=0.5)
    with pytest.raises(ParameterError):
        ball_average(T2, one(T2), np.zeros(2), -2.0)


def test_model_coefficients_uniform_disjointness_bound():
    # modular product: max over |n|_inf <= 20 of |a_{n,R}| decays with a
    # single fitted gamma' and constant (uniformity of the coefficient
    # bound); twists share orbit evaluations through the batched path
    import itertools

    from sparseavg.averages import twisted_ball_averages, unit_ball_volume
    from sparseavg.spaces import ModularProductSpace
    from sparseavg.observables import BumpObservable

    space = ModularProductSpace(2)
    f = BumpObservable(space, 1.0, 0.3, factor=0, centered=True,
                       mc_samples=100_000, seed=11)
    x0 = space.haar_sample(np.random.default_rng(20260810))
    n_bars = np.array(list(itertools.product(range(-20, 21), repeat=2)), dtype=float)
    factor = unit_ball_volume(2) / 4.0
    Rs = np.array([5.0, 10.0, 20.0, 40.0])
    maxima = []
    for R in Rs:
        outs = twisted_ball_averages(
            space, f, x0, float(R), -n_bars / (2.0 * R),
            QuadratureScheme(kind="lowdisc", resolution=1024, seed=3),
        )
        maxima.append(factor * max(abs(o.value) for o in outs))
    maxima = np.array(maxima)
    slope = np.polyfit(np.log(Rs), np.log(maxima), 1)[0]
    assert slope < -0.2  # strictly decaying worst case; rate is empirical
    gamma_prime = -slope
    C = float(np.max(maxima * Rs**gamma_prime))
    assert np.all(maxima <= C * Rs**-gamma_prime * (1 + 1e-9))
