"""Which cone divisors on the sphere can carry a character 1-form.

A non-integer cone point must be a simple pole of the character form
with residue +-alpha.  An integer cone point is either a zero of order
alpha - 1 (a saddle) or such a pole.  Any further poles are smooth
extrema with residue +-1.  The form has degree -2 and its residues sum
to zero; those two identities are all the search enforces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import least_squares

from .character import ThirdKindDifferential, build_metric, make_differential
from .errors import ConeMetricError
from .pullback import ConicalDivisor
from .sphere import INF

RATIONAL_MAX_DEN = 10 ** 6
FLOAT_ATOL = 1e-9


@dataclass(frozen=True)
class FeasibilityAssignment:
    """Roles for every cone point plus the count and signs of smooth poles."""

    saddles: tuple       # ((point, zero_order), ...)
    extrema: tuple       # ((point, residue), ...)
    smooth_plus: int = 0
    smooth_minus: int = 0

    @property
    def smooth_count(self) -> int:
        return self.smooth_plus + self.smooth_minus

    @property
    def residues(self):
        out = [r for _, r in self.extrema]
        return out + [1] * self.smooth_plus + [-1] * self.smooth_minus

    def as_dict(self):
        return {
            "saddles": [{"point": p, "zero_order": int(k)} for p, k in self.saddles],
            "extrema": [{"point": p, "residue": float(r)} for p, r in self.extrema],
            "smooth_poles": {"plus": self.smooth_plus, "minus": self.smooth_minus},
        }


def _exact(alpha: float):
    frac = Fraction(alpha).limit_denominator(RATIONAL_MAX_DEN)
    if abs(float(frac) - alpha) <= 1e-12 * max(1.0, abs(alpha)):
        return frac
    return alpha


def _is_int(x) -> bool:
    if isinstance(x, Fraction):
        return x.denominator == 1
    return abs(x - round(x)) <= FLOAT_ATOL


def feasibility_search(d: ConicalDivisor) -> list:
    """All role/sign assignments satisfying the degree and residue identities."""
    pts = [(p, _exact(a)) for p, a in d.entries]
    choices = []
    for p, a in pts:
        if _is_int(a):
            choices.append([("saddle", p, a), ("pole", p, a), ("pole", p, -a)])
        else:
            choices.append([("pole", p, a), ("pole", p, -a)])
    out = []
    for combo in itertools.product(*choices):
        saddles = tuple((p, int(round(a)) - 1) for role, p, a in combo if role == "saddle")
        extrema = tuple((p, r) for role, p, r in combo if role == "pole")
        zero_deg = sum(k for _, k in saddles)
        smooth = zero_deg + 2 - len(extrema)
        if smooth < 0:
            continue
        total = sum(r for _, r in extrema)
        # plus - minus = -total and plus + minus = smooth
        twice_plus = smooth - total
        if not _is_int(twice_plus):
            continue
        twice_plus = int(round(twice_plus))
        if twice_plus % 2 or not 0 <= twice_plus // 2 <= smooth:
            continue
        plus = twice_plus // 2
        out.append(FeasibilityAssignment(saddles, extrema, plus, smooth - plus))
    return out


def two_point_check(alpha: float, beta: float) -> bool:
    """Whether two cone points with these angle parameters admit a character form."""
    for a in (alpha, beta):
        if not a > 0 or abs(a - 1) <= FLOAT_ATOL:
            raise ConeMetricError("angle parameters must be positive and different from 1")
    return bool(feasibility_search(ConicalDivisor(((0j, alpha), (INF, beta)))))


def _expected_alphas(a: FeasibilityAssignment):
    out = [k + 1 for _, k in a.saddles]
    out += [abs(float(r)) for _, r in a.extrema]
    return sorted(float(x) for x in out)


def realize(a: FeasibilityAssignment, seed: int = 0, attempts: int = 40) -> ThirdKindDifferential:
    """Concrete third-kind differential with the assignment's residues and zero orders.

    Solves for pole and zero positions of
    ``C prod (z - z_j)^{n_j} / prod (z - q_k) dz`` (first two poles pinned
    at 0 and 1, infinity a regular point) so the residues match; then
    checks the resulting cone divisor.  Zero positions are free.
    """
    targets = [float(r) for r in a.residues]
    orders = [k for _, k in a.saddles]
    n_p = len(targets)
    n_z = len(orders)
    n_unknown = 1 + n_z + (n_p - 2)
    rng = np.random.default_rng(seed)
    expected = _expected_alphas(a)

    def unpack(x):
        v = x[: n_unknown] + 1j * x[n_unknown:]
        C = v[0]
        zeros = v[1: 1 + n_z]
        poles = np.concatenate([[0.0, 1.0], v[1 + n_z:]])
        return C, zeros, poles

    def residuals(x):
        C, zeros, poles = unpack(x)
        res = []
        for k in range(n_p - 1):
            qk = poles[k]
            val = C
            for zj, nj in zip(zeros, orders):
                val = val * (qk - zj) ** nj
            for l in range(n_p):
                if l != k:
                    val = val / (qk - poles[l])
            res.append(val - targets[k])
        res = np.array(res)
        return np.concatenate([res.real, res.imag])

    last_err = None
    for _ in range(attempts):
        x0 = rng.normal(scale=1.5, size=2 * n_unknown)
        try:
            sol = least_squares(residuals, x0, method="trf", xtol=1e-15, ftol=1e-15,
                                gtol=1e-15, max_nfev=2000)
        except (ValueError, FloatingPointError) as exc:
            last_err = exc
            continue
        if not np.all(np.isfinite(sol.x)) or np.max(np.abs(sol.fun)) > 1e-12:
            continue
        C, zeros, poles = unpack(sol.x)
        pts = list(zeros) + list(poles)
        gaps = [abs(p - q) for p, q in itertools.combinations(pts, 2)]
        if (gaps and min(gaps) < 1e-2) or max(abs(p) for p in pts) > 1e3:
            continue
        try:
            omega = make_differential(list(zip(poles, targets)))
            got = sorted(build_metric(omega).divisor.alphas)
        except ConeMetricError as exc:
            last_err = exc
            continue
        if len(got) == len(expected) and np.allclose(got, expected, atol=1e-6):
            return omega
    raise ConeMetricError(f"could not realize assignment after {attempts} attempts"
                          + (f" ({last_err})" if last_err else ""))


__all__ = ["FeasibilityAssignment", "feasibility_search", "two_point_check", "realize"]
