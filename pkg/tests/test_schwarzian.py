import math

import numpy as np
import pytest
import sympy as sp

from conemetric.errors import ConeMetricError, SingularityError
from conemetric.pullback import PullbackMetric
from conemetric.schwarzian import (angle_to_weight, contour_coefficients, laurent_tail, schwarzian,
                                   weight_to_angle)
from conemetric.sphere import INF, Polynomial, RationalMap, compose, moebius

Z = sp.symbols("z")


def sympy_schwarzian(expr):
    d1, d2, d3 = (sp.diff(expr, Z, k) for k in (1, 2, 3))
    return sp.lambdify(Z, d3 / d1 - sp.Rational(3, 2) * (d2 / d1) ** 2, "numpy")


MAPS = [
    (Z ** 2, [0, 0, 1], [1]),
    (Z ** 3, [0, 0, 0, 1], [1]),
    (Z ** 2 / (Z ** 2 - 1), [0, 0, 1], [-1, 0, 1]),
    ((Z ** 3 - 3 * Z) / 2, [0, -1.5, 0, 0.5], [1]),
    ((Z ** 3 + 2 * Z - 1) / (Z ** 2 + Z + 3), [-1, 2, 0, 1], [3, 1, 1]),
    (Z ** 4 / (1 + Z + Z ** 4 * sp.Rational(3, 10)), [0, 0, 0, 0, 1], [1, 1, 0, 0, 0.3]),
]


@pytest.mark.parametrize("expr,num,den", MAPS)
def test_schwarzian_against_sympy(expr, num, den):
    oracle = sympy_schwarzian(expr)
    S = schwarzian(RationalMap(num, den))
    for z in (0.37 + 0.21j, -1.3 + 0.8j, 2.1 - 0.4j):
        assert S(z) == pytest.approx(complex(oracle(z)), rel=1e-9)


def test_examples():
    S2 = schwarzian(RationalMap([0, 0, 1]))
    assert S2(2.0) == pytest.approx(-1.5 / 4)
    S3 = schwarzian(RationalMap([0, 0, 0, 1]))
    assert S3(0.5) == pytest.approx(-4 / 0.25)
    assert schwarzian(moebius(1, 2, 3, 4)).num.is_zero
    with pytest.raises(ConeMetricError):
        schwarzian(RationalMap([5.0]))


def test_pgl_invariance():
    rng = np.random.default_rng(2)
    f = RationalMap([0, 0, 1], [-1, 0, 1])
    S = schwarzian(f)
    for _ in range(10):
        a, b, c, d = rng.normal(size=4) + 1j * rng.normal(size=4)
        SL = schwarzian(compose(moebius(a, b, c, d), f))
        n = max(len(S.num.coeffs), len(SL.num.coeffs))
        assert np.allclose(np.pad(SL.num.array, (0, n - len(SL.num.array))),
                           np.pad(S.num.array, (0, n - len(S.num.array))), atol=1e-10)
        assert np.allclose(SL.den.array, S.den.array, atol=1e-10)


def test_chain_rule_for_moebius_precomposition():
    rng = np.random.default_rng(4)
    f = RationalMap([0, -1.5, 0, 0.5])
    S = schwarzian(f)
    for _ in range(5):
        a, b, c, d = rng.normal(size=4) + 1j * rng.normal(size=4)
        h = moebius(a, b, c, d)
        Sfh = schwarzian(compose(f, h))
        z = complex(*rng.normal(size=2))
        hp = (a * d - b * c) / (c * z + d) ** 2
        assert Sfh(z) == pytest.approx(S(h(z)) * hp ** 2, rel=1e-8)


def test_laurent_tail_examples():
    S = RationalMap([-1.5], [0, 0, 1])
    t = laurent_tail(S, 0j)
    assert (t.c, t.d) == (-1.5, 0)
    reg = laurent_tail(S, 1 + 0j)
    assert (reg.c, reg.d) == (0, 0)
    t = laurent_tail(schwarzian(RationalMap([0, 0, 1], [-1, 0, 1])), 0j)
    assert t.c == pytest.approx(-1.5, abs=1e-12)
    assert t.alpha == pytest.approx(2)


def test_irregular_singularity_error():
    with pytest.raises(SingularityError, match="irregular singularity"):
        laurent_tail(RationalMap([1], [0, 0, 0, 1]), 0j)


@pytest.mark.parametrize("expr,num,den", MAPS)
def test_weight_identity_at_every_cone_point(expr, num, den):
    f = RationalMap(num, den)
    S = schwarzian(f)
    for p, alpha in PullbackMetric(f).divisor:
        t = laurent_tail(S, p)
        assert t.c == pytest.approx(angle_to_weight(alpha), abs=1e-9)
        if p is not INF:
            c, d = contour_coefficients(S, p, t.radius)
            assert c == pytest.approx(t.c, abs=1e-9)
            assert d == pytest.approx(t.d, abs=1e-9)


def test_infinity_tail_is_in_inverted_coordinate():
    t = laurent_tail(schwarzian(RationalMap([0, 0, 0, 1])), INF)
    assert t.center is INF and t.c == pytest.approx(-4)


def test_regular_samples_reconstruct_regular_part():
    f = RationalMap([-1, 2, 0, 1], [3, 1, 1])
    S = schwarzian(f)
    p, _ = PullbackMetric(f).divisor.entries[0]
    t = laurent_tail(S, p)
    assert len(t.regular_samples) == 64
    x, v = t.regular_samples[5]
    assert v == pytest.approx(S(p + x) - t.c / x ** 2 - t.d / x)


def test_weight_angle_conversion():
    assert weight_to_angle(-1.5) == pytest.approx(2)
    assert weight_to_angle(3 / 8) == pytest.approx(0.5)
    assert weight_to_angle(0) == 1
    for c in (0.5, 0.7):
        with pytest.raises(ConeMetricError, match="no positive angle"):
            weight_to_angle(c)
    for a in (0.3, 1.7, 4.0):
        assert weight_to_angle(angle_to_weight(a)) == pytest.approx(a)


def test_noise_in_reduced_denominator_is_chopped():
    f = RationalMap([0, 0, 0, 0, 1], [1, 1, 0, 0, 0.3])
    S = schwarzian(f)
    assert S.den(0) == 0 or abs(S.den.taylor(0)[0]) == 0
    assert laurent_tail(S, 0j).c == pytest.approx(angle_to_weight(4))
    assert math.isfinite(Polynomial(S.num).norm())
