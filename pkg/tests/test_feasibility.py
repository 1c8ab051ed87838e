import itertools
from fractions import Fraction

import numpy as np
import pytest

from conemetric.character import build_metric
from conemetric.errors import ConeMetricError
from conemetric.feasibility import feasibility_search, realize, two_point_check
from conemetric.pullback import ConicalDivisor, PullbackMetric
from conemetric.sphere import INF, RationalMap

P, Q, R = 0j, INF, 1 + 0j


def div(*alphas):
    pts = [P, Q, R, 2 + 1j][: len(alphas)]
    return ConicalDivisor(tuple(zip(pts, alphas)))


def test_football_is_feasible():
    found = feasibility_search(div(1.5, 1.5))
    assert found
    assert any(sorted(float(r) for r in a.residues) == [-1.5, 1.5] and a.smooth_count == 0
               for a in found)


def test_unequal_two_point_is_infeasible():
    assert feasibility_search(div(1.5, 2.5)) == []


@pytest.mark.parametrize("alphas", [(0.5, 0.5, 0.5), (2.0, 2.0, 2.0), (0.25, 0.75),
                                    (0.5, 0.5, 0.5, 0.5)])
def test_infeasible_divisors(alphas):
    assert feasibility_search(div(*alphas)) == []


@pytest.mark.parametrize("a,b,expected", [(1.5, 1.5, True), (1.5, 2.5, False), (2, 2, True)])
def test_two_point_examples(a, b, expected):
    assert two_point_check(a, b) is expected


def test_two_two_matches_pullback_of_zsq():
    assert PullbackMetric(RationalMap([0, 0, 1])).divisor.isclose(div(2.0, 2.0))
    omega = realize(feasibility_search(div(2.0, 2.0))[0])
    assert sorted(build_metric(omega).divisor.alphas) == pytest.approx([2, 2])


@pytest.mark.parametrize("bad", [(0.0, 2.0), (1.0, 2.0), (-1.0, -1.0)])
def test_two_point_rejects(bad):
    with pytest.raises(ConeMetricError):
        two_point_check(*bad)


def test_random_non_integer_pairs():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a, b = rng.uniform(0.05, 6.0, size=2)
        if min(abs(a - round(a)), abs(b - round(b))) < 1e-3:
            continue
        assert two_point_check(a, b) is False
        assert two_point_check(a, a) is True


def test_assignment_identities():
    for d in (div(1.5, 1.5), div(2.0, 3.0, 0.5), div(3.0, 0.5, 1.5, 2.0)):
        for a in feasibility_search(d):
            assert sum(a.residues) == 0
            assert sum(k for _, k in a.saddles) - (len(a.extrema) + a.smooth_count) == -2


def brute_force(alphas, s_max=6):
    """Naive enumeration of roles, signs and smooth-pole sign patterns."""
    fr = [Fraction(a).limit_denominator(1000) for a in alphas]
    out = set()
    roles = [("saddle", "+", "-") if f.denominator == 1 else ("+", "-") for f in fr]
    for combo in itertools.product(*roles):
        zeros = sum(int(f) - 1 for f, r in zip(fr, combo) if r == "saddle")
        res = [f if r == "+" else -f for f, r in zip(fr, combo) if r != "saddle"]
        for s in range(s_max + 1):
            for plus in range(s + 1):
                if zeros - (len(res) + s) != -2:
                    continue
                if sum(res) + plus - (s - plus) != 0:
                    continue
                out.add((combo, plus, s - plus))
    return out


def canonical(alphas, found):
    pts = [P, Q, R][: len(alphas)]
    out = set()
    for a in found:
        if a.smooth_count > 6:
            continue
        sad = {p for p, _ in a.saddles}
        res = dict(a.extrema)
        combo = tuple("saddle" if p in sad else ("+" if res[p] > 0 else "-") for p in pts)
        out.add((combo, a.smooth_plus, a.smooth_minus))
    return out


def test_brute_force_equivalence():
    values = [0.5, 1.5, 2.0, 3.0, 0.25, 2.5, 4.0]
    for n in (1, 2, 3):
        for alphas in itertools.product(values, repeat=n):
            found = feasibility_search(div(*alphas))
            assert canonical(alphas, found) == brute_force(alphas)


@pytest.mark.parametrize("alphas", [
    (1.5, 1.5), (2.0, 2.0), (0.5, 0.5), (2.0, 0.5, 0.5), (3.0, 1.5, 0.5),
    (2.0, 1.5, 0.5), (3.0, 2.0, 0.5, 0.5), (0.25, 0.25),
])
def test_assignments_are_realizable(alphas):
    found = feasibility_search(div(*alphas))
    assert found
    for a in found:
        omega = realize(a)
        got = sorted(build_metric(omega).divisor.alphas)
        want = sorted([k + 1 for _, k in a.saddles] + [abs(float(r)) for _, r in a.extrema])
        assert got == pytest.approx(want, abs=1e-6)


def test_as_dict_is_plain():
    a = feasibility_search(div(1.5, 1.5))[0]
    d = a.as_dict()
    assert set(d) == {"saddles", "extrema", "smooth_poles"}
    assert isinstance(d["extrema"][0]["residue"], float)
