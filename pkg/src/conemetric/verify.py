"""Invariant suite run by ``conemetric verify`` over the shipped corpus.

Each check returns a :class:`CheckResult`; a check that raises is
recorded as failed with the exception text, so one broken property never
hides the others.  Randomness is seeded, so reports are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .character import (PathPolyline, build_metric, differential_divisor, is_trivial,
                        make_differential, monodromy_multiplier, reconstruct_rational)
from .codec import load_json, parse_map, parse_omega
from .errors import ConeMetricError
from .feasibility import feasibility_search, two_point_check
from .frobenius import (PowerSeries, local_solutions, ode_from_schwarzian,
                        resonance_obstruction)
from .pullback import (ConicalDivisor, PullbackMetric, area_numeric, curvature_numeric,
                       metric_density)
from .schwarzian import angle_to_weight, laurent_tail, schwarzian
from .sphere import INF, SU2Moebius, su2_compose


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def as_dict(self):
        return {"property": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class Corpus:
    maps: dict
    omegas: dict


def corpus_dir() -> Path:
    return Path(str(resources.files("conemetric") / "corpus"))


def load_corpus(directory=None) -> Corpus:
    directory = Path(directory) if directory is not None else corpus_dir()
    maps, omegas = {}, {}
    for path in sorted(directory.glob("*.json")):
        stem = path.stem
        if stem.startswith("map_"):
            maps[stem[4:]] = parse_map(load_json(str(path)))
        elif stem.startswith("omega_"):
            omegas[stem[6:]] = parse_omega(load_json(str(path)))
    return Corpus(maps, omegas)


def random_differential(rng: np.random.Generator, max_poles: int = 6, integer: bool = False):
    """Random third-kind form with 2..max_poles poles, one of them possibly at infinity."""
    n = int(rng.integers(2, max_poles + 1))
    if integer:
        res = rng.integers(1, 4, size=n - 1) * rng.choice([-1, 1], size=n - 1)
        res = [float(r) for r in res]
        last = -sum(res)
        if last == 0:
            step = math.copysign(1.0, res[0])
            res[0] += step
            last -= step
        res.append(last)
    else:
        res = list(rng.uniform(0.3, 2.5, size=n - 1) * rng.choice([-1, 1], size=n - 1))
        last = -math.fsum(res)
        if abs(last) < 0.2:
            res[0] += 0.5
            last -= 0.5
        res.append(last)
    pts = []
    with_inf = bool(rng.integers(0, 2))
    while len(pts) < n - int(with_inf):
        z = complex(*rng.uniform(-2, 2, size=2))
        if all(abs(z - p) > 0.3 for p in pts):
            pts.append(z)
    if with_inf:
        pts.append(INF)
    return make_differential(list(zip(pts, res)))


def sample_regular_points(m: PullbackMetric, rng, count: int = 20, radius: float = 2.5,
                          clearance: float = 0.75):
    """Random points in ``|z| <= radius`` at distance >= ``clearance`` from critical points."""
    crit = [p for p in m.divisor.points if p is not INF]
    out = []
    while len(out) < count:
        z = complex(*rng.uniform(-radius, radius, size=2))
        if abs(z) <= radius and all(abs(z - p) >= clearance for p in crit):
            out.append(z)
    return out


# --------------------------------------------------------------- checks

def check_residue_theorem(corpus: Corpus, rng) -> CheckResult:
    worst = max(abs(math.fsum(r for _, r in w.poles)) for w in corpus.omegas.values())
    rejected = False
    try:
        make_differential([(0j, 1.0), (1 + 0j, -0.5)])
    except ConeMetricError:
        rejected = True
    return CheckResult("residue theorem", worst <= 1e-12 and rejected,
                       {"max_residue_sum": worst, "unbalanced_rejected": rejected})


def check_form_degree(corpus: Corpus, rng) -> CheckResult:
    forms = list(corpus.omegas.values()) + [random_differential(rng) for _ in range(100)]
    degrees = [differential_divisor(w).degree for w in forms]
    bad = sum(d != -2 for d in degrees)
    return CheckResult("deg(omega) = -2", bad == 0, {"forms": len(forms), "failures": bad})


def check_su2_invariance(corpus: Corpus, rng) -> CheckResult:
    worst = 0.0
    for f in corpus.maps.values():
        m = PullbackMetric(f)
        for _ in range(12):
            mL = PullbackMetric(su2_compose(SU2Moebius.random(rng), f))
            for _ in range(4):
                z = complex(*rng.normal(size=2))
                a, b = metric_density(m, z), metric_density(mL, z)
                worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    return CheckResult("SU(2) invariance", worst <= 1e-10, {"max_relative_error": worst})


def check_gauss_bonnet(corpus: Corpus, rng) -> CheckResult:
    worst = 0.0
    for f in corpus.maps.values():
        m = PullbackMetric(f)
        area = area_numeric(m)
        worst = max(worst, abs(area / (4 * math.pi * f.degree) - 1),
                    abs(area / (2 * math.pi * (2 + m.divisor.degree)) - 1))
    trivial_worst = 0.0
    for w in corpus.omegas.values():
        if is_trivial(w):
            area = area_numeric(PullbackMetric(reconstruct_rational(w)))
            trivial_worst = max(trivial_worst, abs(area / build_metric(w).area - 1))
    ok = worst <= 1e-6 and trivial_worst <= 1e-6
    return CheckResult("Gauss-Bonnet", ok, {"max_relative_error_maps": worst,
                                             "max_relative_error_trivial_forms": trivial_worst})


def check_curvature(corpus: Corpus, rng) -> CheckResult:
    worst = 0.0
    for f in corpus.maps.values():
        m = PullbackMetric(f)
        for z in sample_regular_points(m, rng):
            worst = max(worst, abs(curvature_numeric(m, z) - 1))
    return CheckResult("curvature = 1", worst <= 1e-4, {"max_abs_error": worst})


def check_schwarzian_weight(corpus: Corpus, rng) -> CheckResult:
    worst = 0.0
    mobius_zero = True
    for f in corpus.maps.values():
        S = schwarzian(f)
        if f.degree == 1:
            mobius_zero = mobius_zero and S.num.is_zero
            continue
        for p, alpha in PullbackMetric(f).divisor:
            worst = max(worst, abs(laurent_tail(S, p).c - angle_to_weight(alpha)))
    return CheckResult("Schwarzian weight identity", worst <= 1e-9 and mobius_zero,
                       {"max_abs_error": worst, "moebius_schwarzian_zero": mobius_zero})


def check_frobenius(corpus: Corpus, rng) -> CheckResult:
    worst = 0.0
    for alpha in (0.3, 0.5, 1.5, 2.7):
        for _ in range(5):
            tail = rng.normal(scale=0.5, size=(32, 2)) @ np.array([1, 1j])
            q = PowerSeries((angle_to_weight(alpha) / 2,) + tuple(tail), 32)
            for sol in local_solutions(q, alpha, 32):
                worst = max(worst, float(np.max(np.abs(sol.residuals(q)))))
    q = PowerSeries((-0.75, 0.5), 32)
    r2 = resonance_obstruction(q, 2)
    lower, _ = local_solutions(q, 2.0, 32)
    log_ok = abs(r2 - 0.25) <= 1e-12 and lower.logarithmic
    apparent = 0.0
    for f in corpus.maps.values():
        if f.degree == 1:
            continue
        S = schwarzian(f)
        for p, alpha in PullbackMetric(f).divisor:
            qp = ode_from_schwarzian(laurent_tail(S, p), 32)
            apparent = max(apparent, abs(resonance_obstruction(qp, int(round(alpha)))))
    ok = worst <= 1e-9 and log_ok and apparent <= 1e-8
    return CheckResult("Frobenius residuals", ok, {"max_residual": worst, "R_2": r2,
                                                   "logarithmic_case_ok": log_ok,
                                                   "max_R_m_on_maps": apparent})


def check_feasibility(corpus: Corpus, rng) -> CheckResult:
    pairs_ok = True
    for _ in range(20):
        a, b = rng.uniform(0.1, 5.0, size=2)
        if abs(a - round(a)) < 1e-3 or abs(b - round(b)) < 1e-3:
            continue
        pairs_ok &= two_point_check(a, b) is False
        pairs_ok &= two_point_check(a, a) is True
    three = ConicalDivisor(((0j, 0.5), (1 + 0j, 0.5), (INF, 0.5)))
    empty_ok = feasibility_search(three) == []
    two = two_point_check(2.0, 2.0)
    ok = pairs_ok and empty_ok and two
    return CheckResult("feasibility cases", ok, {"two_point_pairs": pairs_ok,
                                                 "three_half_angles_empty": empty_ok,
                                                 "two_two_feasible": two})


def check_monodromy(corpus: Corpus, rng) -> CheckResult:
    worst_mod, worst_match = 0.0, 0.0
    for w in corpus.omegas.values():
        for q, r in w.finite:
            others = [abs(q - p) for p, _ in w.finite if p != q]
            rad = 0.4 * min(others + [1.0])
            mult = monodromy_multiplier(w, PathPolyline.circle(q, rad, 256))
            worst_mod = max(worst_mod, abs(abs(mult) - 1))
            worst_match = max(worst_match, abs(mult - np.exp(2j * math.pi * r)))
    ok = worst_mod <= 1e-9 and worst_match <= 1e-9
    return CheckResult("U(1) monodromy", ok, {"max_modulus_error": worst_mod,
                                              "max_multiplier_error": worst_match})


CHECKS = (check_residue_theorem, check_form_degree, check_su2_invariance, check_gauss_bonnet,
          check_curvature, check_schwarzian_weight, check_frobenius, check_feasibility,
          check_monodromy)


def run_suite(directory=None, seed: int = 0) -> list:
    corpus = load_corpus(directory)
    out = []
    for check in CHECKS:
        rng = np.random.default_rng(seed)
        try:
            out.append(check(corpus, rng))
        except ConeMetricError as exc:
            out.append(CheckResult(check.__name__[6:].replace("_", " "), False,
                                   {"error": str(exc)}))
    return out


__all__ = ["CheckResult", "Corpus", "load_corpus", "corpus_dir", "random_differential",
           "sample_regular_points", "run_suite", "CHECKS"]
