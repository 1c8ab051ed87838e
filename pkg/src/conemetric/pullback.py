"""Pullback of the round metric under a rational developing map.

For ``f = P/Q`` the pulled-back density is

    4 |f'|^2 / (1 + |f|^2)^2 = 4 |P'Q - PQ'|^2 / (|P|^2 + |Q|^2)^2,

and the right-hand form is finite at the poles of ``f`` as well, so it is
used everywhere; the chart at infinity uses the reversed polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConeMetricError, RootClusteringError
from .quadrature import integrate_rectangle
from .sphere import (INF, RationalMap, SpherePoint, as_point, chordal_distance, point_sort_key,
                     poly_roots, rational_eval, vanishing_order)

SMOOTH_ATOL = 1e-9


@dataclass(frozen=True)
class ConicalDivisor:
    """Cone points ``(point, alpha)``; the divisor is sum (alpha - 1) P.

    Entries with ``alpha == 1`` are rejected: an angle of 2*pi is a
    smooth point of a curvature-one metric.
    """

    entries: tuple = ()

    def __post_init__(self):
        cleaned = []
        for point, alpha in self.entries:
            point, alpha = as_point(point), float(alpha)
            if not alpha > 0:
                raise ConeMetricError(f"cone angle parameter must be positive, got {alpha}")
            if abs(alpha - 1.0) <= SMOOTH_ATOL:
                raise ConeMetricError("alpha = 1 is a smooth point and cannot be a divisor entry")
            cleaned.append((point, alpha))
        for i in range(len(cleaned)):
            for j in range(i + 1, len(cleaned)):
                if chordal_distance(cleaned[i][0], cleaned[j][0]) <= 1e-12:
                    raise ConeMetricError("divisor points must be pairwise distinct")
        cleaned.sort(key=lambda e: point_sort_key(e[0]))
        object.__setattr__(self, "entries", tuple(cleaned))

    @property
    def degree(self) -> float:
        return sum(a - 1.0 for _, a in self.entries)

    @property
    def points(self):
        return [p for p, _ in self.entries]

    @property
    def alphas(self):
        return [a for _, a in self.entries]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def isclose(self, other: "ConicalDivisor", tol: float = 1e-9) -> bool:
        if len(self) != len(other):
            return False
        unused = list(other.entries)
        for p, a in self.entries:
            hit = None
            for k, (q, b) in enumerate(unused):
                if chordal_distance(p, q) <= tol and abs(a - b) <= tol:
                    hit = k
                    break
            if hit is None:
                return False
            unused.pop(hit)
        return True


@dataclass(frozen=True)
class PullbackMetric:
    """The metric ``f^* g_st`` for a nonconstant rational map ``f``."""

    f: RationalMap

    def __post_init__(self):
        if self.f.degree < 1:
            raise ConeMetricError("a developing map must have degree >= 1")

    @cached_property
    def _charts(self):
        out = {}
        for at_inf in (False, True):
            p, q = self.f.chart_pair(at_inf)
            out[at_inf] = (p, q, self.f.wronskian(at_inf))
        return out

    def density(self, z, at_infinity: bool = False):
        """Vectorised density in the ``z`` chart (or the ``w = 1/z`` chart)."""
        p, q, w = self._charts[at_infinity]
        z = np.asarray(z, dtype=complex)
        wz = w(z) if not w.is_zero else np.zeros_like(z)
        return 4.0 * np.abs(wz) ** 2 / (np.abs(p(z)) ** 2 + np.abs(q(z)) ** 2) ** 2

    @cached_property
    def divisor(self) -> ConicalDivisor:
        return singular_divisor(self)


def metric_density(m: PullbackMetric, z: SpherePoint) -> float:
    """``4|f'(z)|^2/(1+|f(z)|^2)^2``; at infinity, evaluated in the ``1/z`` chart."""
    z = as_point(z)
    if z is INF:
        return float(m.density(0j, at_infinity=True))
    return float(m.density(z))


def _local_degree(f: RationalMap, point: complex, at_infinity: bool) -> int:
    p, q = f.chart_pair(at_infinity)
    value = rational_eval(RationalMap(p, q, reduce=False), point)
    g = q if value is INF else p - q * value
    return vanishing_order(g, point, rtol=1e-8)


def singular_divisor(m: PullbackMetric) -> ConicalDivisor:
    """Branch points of ``f`` with alpha equal to the local degree.

    Finite critical points are the roots of the Wronskian ``P'Q - PQ'``;
    the order at infinity is read off the degree drop of that Wronskian.
    Each multiplicity is cross-checked against the order of vanishing of
    ``f - f(p)`` and the total against Riemann-Hurwitz.
    """
    f = m.f
    d = f.degree
    w = f.wronskian()
    entries = []
    residuals = []
    if not w.is_zero:
        for r, k in poly_roots(w):
            alpha = k + 1
            local = _local_degree(f, r, False)
            if local != alpha:
                residuals.append(abs(w(r)) / float(w.eval_scale(r)))
                raise RootClusteringError(
                    f"critical point {r} has Wronskian order {k} but local degree {local}",
                    residuals=residuals)
            entries.append((r, alpha))
    deg_w = w.degree if not w.is_zero else -1
    k_inf = 2 * d - 2 - deg_w
    if k_inf > 0:
        local = _local_degree(f, 0j, True)
        if local != k_inf + 1:
            raise RootClusteringError(
                f"order at infinity {k_inf} disagrees with local degree {local}")
        entries.append((INF, k_inf + 1))
    total = sum(a - 1 for _, a in entries)
    if total != 2 * d - 2:
        raise RootClusteringError(
            f"Riemann-Hurwitz violated: ramification {total} != {2 * d - 2}",
            residuals=[abs(w(r)) for r, _ in entries if r is not INF])
    return ConicalDivisor(tuple(entries))


def area_numeric(m: PullbackMetric, tol: float = 1e-10) -> float:
    """Total area: unit disk in the ``z`` chart plus unit disk in the ``1/z`` chart."""
    if tol <= 0:
        raise ConeMetricError("tolerance must be positive")
    total = 0.0
    for at_inf in (False, True):
        def integrand(r, t, at_inf=at_inf):
            return m.density(r * np.exp(1j * t), at_infinity=at_inf) * r
        value, _ = integrate_rectangle(integrand, 0.0, 1.0, 0.0, 2 * math.pi,
                                       rtol=tol / 4, atol=0.0)
        total += value
    return total


def curvature_numeric(m: PullbackMetric, z: complex, h: float = 1e-3) -> float:
    """Five-point-Laplacian estimate of ``K = -exp(-2u) Lap u`` where ``g = exp(2u)|dz|^2``."""
    if h <= 0:
        raise ConeMetricError("step h must be positive")
    z = complex(z)
    for p in m.divisor.points:
        if chordal_distance(z, p) < 10 * h:
            raise ConeMetricError(f"stencil at {z} is within 10h of critical point {p}")
    stencil = np.array([z, z + h, z - h, z + 1j * h, z - 1j * h])
    dens = m.density(stencil)
    if np.any(dens <= 0) or not np.all(np.isfinite(dens)):
        raise ConeMetricError("curvature stencil hits a critical point of the metric")
    u = 0.5 * np.log(dens)
    lap = (u[1] + u[2] + u[3] + u[4] - 4 * u[0]) / h ** 2
    return float(-lap / dens[0])


def density_grid(m: PullbackMetric, res: int = 256, extent: float = 2.0) -> np.ndarray:
    """Rows ``(x, y, density)`` on a ``res x res`` grid over ``[-extent, extent]^2``, x fastest."""
    if res < 2:
        raise ConeMetricError("grid resolution must be at least 2")
    xs = np.linspace(-extent, extent, res)
    X, Y = np.meshgrid(xs, xs, indexing="xy")
    D = m.density(X + 1j * Y)
    return np.column_stack([X.ravel(), Y.ravel(), D.ravel()])
