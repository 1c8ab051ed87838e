import math

import numpy as np
import pytest

from conemetric.errors import ConeMetricError
from conemetric.pullback import (ConicalDivisor, PullbackMetric, area_numeric, curvature_numeric,
                                 density_grid, metric_density, singular_divisor)
from conemetric.sphere import INF, RationalMap, SU2Moebius, moebius, su2_compose
from conemetric.verify import sample_regular_points

ZSQ = RationalMap([0, 0, 1])
RATIO = RationalMap([0, 0, 1], [-1, 0, 1])


def test_density_examples():
    assert metric_density(PullbackMetric(RationalMap([0, 1])), 0j) == pytest.approx(4)
    assert metric_density(PullbackMetric(ZSQ), 0j) == 0
    assert metric_density(PullbackMetric(ZSQ), 1 + 0j) == pytest.approx(4)


def test_density_direct_formula_oracle():
    f = RATIO
    m = PullbackMetric(f)
    for z in (0.3 + 0.7j, 2 - 1j, -0.5j):
        fz = z * z / (z * z - 1)
        fp = -2 * z / (z * z - 1) ** 2
        assert metric_density(m, z) == pytest.approx(4 * abs(fp) ** 2 / (1 + abs(fz) ** 2) ** 2)


def test_density_finite_at_poles_of_f():
    m = PullbackMetric(RATIO)
    assert math.isfinite(metric_density(m, 1 + 0j))
    assert metric_density(m, 1 + 0j) > 0


def test_density_at_infinity_uses_inverted_chart():
    m = PullbackMetric(RationalMap([0, 1]))
    assert metric_density(m, INF) == pytest.approx(4)
    assert metric_density(PullbackMetric(ZSQ), INF) == 0


@pytest.mark.parametrize("f,expected", [
    (RationalMap([0, 1]), []),
    (ZSQ, [(0j, 2), (INF, 2)]),
    (RATIO, [(0j, 2), (INF, 2)]),
    (RationalMap([0, 0, 0, 1]), [(0j, 3), (INF, 3)]),
    (RationalMap([0, -1.5, 0, 0.5]), [(-1 + 0j, 2), (1 + 0j, 2), (INF, 3)]),
])
def test_singular_divisor_examples(f, expected):
    assert singular_divisor(PullbackMetric(f)).isclose(ConicalDivisor(tuple(expected)))


def test_divisor_obeys_riemann_hurwitz_on_random_maps():
    rng = np.random.default_rng(3)
    for deg in (2, 3, 4):
        for _ in range(5):
            f = RationalMap(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1),
                            rng.normal(size=deg))
            d = PullbackMetric(f).divisor
            assert d.degree == pytest.approx(2 * f.degree - 2)


def test_conical_divisor_validation():
    with pytest.raises(ConeMetricError):
        ConicalDivisor(((0j, 1.0),))
    with pytest.raises(ConeMetricError):
        ConicalDivisor(((0j, -2.0),))
    with pytest.raises(ConeMetricError):
        ConicalDivisor(((0j, 2.0), (0j, 3.0)))
    d = ConicalDivisor(((INF, 2.0), (1j, 0.5)))
    assert d.points[-1] is INF and d.degree == pytest.approx(0.5)


def test_constant_map_rejected():
    with pytest.raises(ConeMetricError):
        PullbackMetric(RationalMap([3.0]))


@pytest.mark.parametrize("f", [RationalMap([0, 1]), ZSQ, RATIO, RationalMap([0, 0, 0, 0, 1])])
def test_area_is_four_pi_degree(f):
    m = PullbackMetric(f)
    area = area_numeric(m, 1e-10)
    assert area == pytest.approx(4 * math.pi * f.degree, rel=1e-6)
    assert area == pytest.approx(2 * math.pi * (2 + m.divisor.degree), rel=1e-6)


def test_area_rejects_bad_tolerance():
    with pytest.raises(ConeMetricError):
        area_numeric(PullbackMetric(ZSQ), 0)


@pytest.mark.parametrize("f,z", [(RationalMap([0, 1]), 0.3 + 0.1j), (ZSQ, 1 + 0j), (RATIO, 2j)])
def test_curvature_examples(f, z):
    assert curvature_numeric(PullbackMetric(f), z) == pytest.approx(1, abs=1e-4)


def test_curvature_error_is_second_order():
    m = PullbackMetric(RATIO)
    z = 0.8 + 0.9j
    e1 = abs(curvature_numeric(m, z, 2e-3) - 1)
    e2 = abs(curvature_numeric(m, z, 1e-3) - 1)
    assert e2 < e1 and e1 / e2 == pytest.approx(4, rel=0.2)


def test_curvature_refuses_critical_neighbourhood():
    with pytest.raises(ConeMetricError):
        curvature_numeric(PullbackMetric(ZSQ), 0.005 + 0j)
    with pytest.raises(ConeMetricError):
        curvature_numeric(PullbackMetric(ZSQ), 1, h=0)


def test_curvature_on_random_regular_points():
    rng = np.random.default_rng(0)
    m = PullbackMetric(RationalMap([0, -1.5, 0, 0.5]))
    for z in sample_regular_points(m, rng, 20):
        assert curvature_numeric(m, z) == pytest.approx(1, abs=1e-4)


def test_su2_invariance_of_density():
    rng = np.random.default_rng(9)
    m = PullbackMetric(RATIO)
    for _ in range(30):
        mL = PullbackMetric(su2_compose(SU2Moebius.random(rng), RATIO))
        z = complex(*rng.normal(size=2))
        assert metric_density(mL, z) == pytest.approx(metric_density(m, z), rel=1e-10)


def test_non_unitary_moebius_changes_density():
    m = PullbackMetric(ZSQ)
    scaled = PullbackMetric(RationalMap([0, 0, 2]))
    assert metric_density(scaled, 0.5 + 0j) != pytest.approx(metric_density(m, 0.5 + 0j))
    assert moebius(2, 0, 0, 1).degree == 1


def test_density_grid_layout():
    g = density_grid(PullbackMetric(ZSQ), res=3, extent=1.0)
    assert g.shape == (9, 3)
    assert list(g[:3, 0]) == [-1, 0, 1] and list(g[:3, 1]) == [-1, -1, -1]
    assert g[4, 2] == 0
    with pytest.raises(ConeMetricError):
        density_grid(PullbackMetric(ZSQ), res=1)
