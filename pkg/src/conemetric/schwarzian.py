"""Schwarzian derivative of rational maps and its double-pole weights.

With ``W = P'Q - PQ'`` the Schwarzian of ``f = P/Q`` is

    {f, z} = (2 W W'' - 3 W'^2 + 4 W (P''Q' - P'Q'')) / (2 W^2),

which is exact polynomial arithmetic and vanishes identically when ``f``
is fractional linear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConeMetricError, SingularityError
from .sphere import (EPS, INF, Polynomial, RationalMap, SpherePoint, as_point, poly_roots,
                     vanishing_order)

DEFAULT_SAMPLES = 64


@dataclass(frozen=True)
class SchwarzianTail:
    """Laurent data of a Schwarzian at ``center``.

    ``S = c/x^2 + d/x + psi(x)`` in the local coordinate ``x = z - center``
    (``x = 1/z`` at infinity, where ``S`` transforms as a quadratic
    differential).  ``psi`` is kept only as samples on the circle
    ``|x| = radius``.
    """

    center: SpherePoint
    c: float
    d: complex
    radius: float = 0.0
    regular_samples: tuple = ()

    @property
    def alpha(self) -> float:
        return weight_to_angle(self.c)


def schwarzian(f: RationalMap) -> RationalMap:
    """The Schwarzian ``f'''/f' - 3/2 (f''/f')^2`` as a reduced rational map."""
    if f.is_constant:
        raise ConeMetricError("the Schwarzian of a constant map is undefined")
    p, q = f.num, f.den
    w = f.wronskian()
    w1, w2 = w.deriv(), w.deriv(2)
    cross = [p.deriv(2) * q.deriv(), p.deriv() * q.deriv(2)]
    terms = [w * w2 * 2.0, w1 * w1 * 3.0, w * (cross[0] - cross[1]) * 4.0]
    num = terms[0] - terms[1] + terms[2]
    scale = max(t.norm() for t in terms + [w * cross[0] * 4.0, w * cross[1] * 4.0])
    num = num.chop(64 * EPS * scale)
    return RationalMap(num, w * w * 2.0)


def _at_infinity(S: RationalMap) -> RationalMap:
    """``S(1/w) / w^4``: the same quadratic differential in the ``w = 1/z`` chart."""
    if S.num.is_zero:
        return S
    n, m = S.num.degree, S.den.degree
    shift = m - n - 4
    num, den = S.num.reversed(), S.den.reversed()
    mono = Polynomial([0.0] * abs(shift) + [1.0])
    if shift >= 0:
        return RationalMap(num * mono, den)
    return RationalMap(num, den * mono)


def laurent_tail(S: RationalMap, p: SpherePoint, n_samples: int = DEFAULT_SAMPLES) -> SchwarzianTail:
    """Coefficients of ``x^-2`` and ``x^-1`` of ``S`` at ``p``, plus samples of the regular part.

    The coefficients come from exact series division of the numerator by
    the deflated denominator.  A regular point gives ``c = d = 0``; a pole
    of order three or more raises :class:`SingularityError`.
    """
    p = as_point(p)
    if p is INF:
        tail = laurent_tail(_at_infinity(S), 0j, n_samples)
        return SchwarzianTail(INF, tail.c, tail.d, tail.radius, tail.regular_samples)
    if S.num.is_zero:
        order = 0
    else:
        order = vanishing_order(S.den, p)
    if order > 2:
        raise SingularityError(f"pole of order {order} at {p}: irregular singularity")
    nt = S.num.taylor(p) if not S.num.is_zero else np.zeros(1, dtype=complex)
    dt = S.den.taylor(p)[order:]
    series = np.zeros(order + 1, dtype=complex)
    for k in range(order + 1):
        acc = nt[k] if k < len(nt) else 0j
        for j in range(1, k + 1):
            if j < len(dt):
                acc -= series[k - j] * dt[j]
        series[k] = acc / dt[0]
    c = complex(series[order - 2]) if order >= 2 else 0j
    d = complex(series[order - 1]) if order >= 1 else 0j
    if abs(c.imag) > 1e-9 * (1 + abs(c)):
        raise SingularityError(f"double-pole weight {c} is not real")

    others = [r for r, _ in poly_roots(S.den)] if S.den.degree > 0 else []
    dists = [abs(r - p) for r in others if abs(r - p) > 1e-7 * (1 + abs(p))]
    radius = 0.5 * min([1.0] + dists)
    theta = 2 * math.pi * np.arange(n_samples) / n_samples
    x = radius * np.exp(1j * theta)
    psi = S(p + x) - c / x ** 2 - d / x
    samples = tuple((complex(xi), complex(v)) for xi, v in zip(x, psi))
    return SchwarzianTail(p, float(c.real), d, radius, samples)


def weight_to_angle(c: float) -> float:
    """Invert ``c = (1 - alpha^2)/2`` for ``alpha > 0``."""
    if c >= 0.5:
        raise ConeMetricError(f"weight {c} >= 1/2 has no positive angle")
    return math.sqrt(1.0 - 2.0 * c)


def angle_to_weight(alpha: float) -> float:
    return (1.0 - alpha * alpha) / 2.0


def contour_coefficients(S: RationalMap, p: complex, radius: float, n: int = 256):
    """Coefficients of ``x^-2`` and ``x^-1`` by trapezoidal contour integration.

    Independent of :func:`laurent_tail`; used to cross-check it.
    """
    theta = 2 * math.pi * np.arange(n) / n
    x = radius * np.exp(1j * theta)
    vals = S(p + x)
    c = complex(np.mean(vals * x ** 2))
    d = complex(np.mean(vals * x))
    return c, d
