"""Character 1-forms: abelian differentials of the third kind on the sphere.

A form ``omega = sum_k r_k dz/(z - q_k)`` with real nonzero residues
determines an abelian curvature-one cone metric through the multivalued
developing map ``f = exp(integral omega)``.  On the sphere every loop
period is ``2*pi*i`` times a sum of residues, so exactness of
``Re(omega)`` and triviality of the metric are residue conditions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from .errors import ConeMetricError, PathError, SingularityError
from .pullback import SMOOTH_ATOL, ConicalDivisor
from .quadrature import integrate_segment
from .sphere import (INF, Polynomial, RationalMap, SpherePoint, as_point, chordal_distance,
                     point_sort_key, poly_roots)

INTEGER_ATOL = 1e-9
DEFAULT_CLEARANCE = 1e-3

Kind = Literal["saddle", "min", "max", "smooth-min", "smooth-max"]


@dataclass(frozen=True)
class ThirdKindDifferential:
    """Meromorphic 1-form with simple poles and real residues.

    Build instances through :func:`make_differential`, which validates the
    residue theorem.  ``poles`` is sorted with infinity last.
    """

    poles: tuple

    @property
    def finite(self):
        return [(q, r) for q, r in self.poles if q is not INF]

    @property
    def residue_at_infinity(self) -> float:
        for q, r in self.poles:
            if q is INF:
                return r
        return 0.0

    def __call__(self, z):
        """Coefficient of ``dz``: ``sum r_k / (z - q_k)`` over finite poles."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for q, r in self.finite:
            out = out + r / (z - q)
        return out

    def residue(self, p: SpherePoint, tol: float = 1e-9):
        for q, r in self.poles:
            if chordal_distance(p, q) <= tol:
                return r
        return None


@dataclass(frozen=True)
class FormDivisor:
    zeros: tuple
    poles: tuple

    @property
    def degree(self) -> int:
        return sum(k for _, k in self.zeros) - len(self.poles)


@dataclass(frozen=True)
class AbelianMetricDescriptor:
    omega: ThirdKindDifferential
    divisor: ConicalDivisor
    trivial: bool
    area: float
    classification: tuple


@dataclass(frozen=True)
class PathPolyline:
    """Polygonal path; a closed path has an implied closing edge."""

    vertices: tuple
    closed: bool = False

    def __post_init__(self):
        verts = tuple(complex(as_point(v)) for v in self.vertices)
        if len(verts) < 2:
            raise ConeMetricError("a path needs at least two vertices")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def segment(cls, a: complex, b: complex) -> "PathPolyline":
        return cls((a, b))

    @classmethod
    def arc(cls, center: complex, radius: float, theta0: float, theta1: float,
            n: int = 64) -> "PathPolyline":
        t = np.linspace(theta0, theta1, n + 1)
        return cls(tuple(center + radius * np.exp(1j * t)))

    @classmethod
    def circle(cls, center: complex, radius: float, n: int = 128,
               start: float = 0.0) -> "PathPolyline":
        t = start + 2 * math.pi * np.arange(n) / n
        return cls(tuple(center + radius * np.exp(1j * t)), closed=True)

    def segments(self):
        v = self.vertices
        out = list(zip(v[:-1], v[1:]))
        if self.closed and v[0] != v[-1]:
            out.append((v[-1], v[0]))
        return out

    @property
    def start(self) -> complex:
        return self.vertices[0]

    @property
    def end(self) -> complex:
        return self.vertices[0] if self.closed else self.vertices[-1]


# ----------------------------------------------------------- construction

def make_differential(poles: Iterable) -> ThirdKindDifferential:
    """Validate ``[(point, residue), ...]`` as a third-kind differential on the sphere."""
    cleaned = []
    for point, res in poles:
        point = as_point(point)
        res = complex(res)
        if abs(res.imag) > 1e-12 * (1 + abs(res)):
            raise ConeMetricError(f"residue {res} at {point} is not real")
        res = res.real
        if res == 0 or not math.isfinite(res):
            raise ConeMetricError(f"zero residue at {point}: pole is not 3rd-kind")
        cleaned.append((point, res))
    if len(cleaned) < 2:
        raise ConeMetricError("a third-kind differential on the sphere needs at least two poles")
    for i in range(len(cleaned)):
        for j in range(i + 1, len(cleaned)):
            if chordal_distance(cleaned[i][0], cleaned[j][0]) <= 1e-12:
                raise ConeMetricError("pole points must be distinct")
    total = math.fsum(r for _, r in cleaned)
    if abs(total) > 1e-12 * max(1.0, math.fsum(abs(r) for _, r in cleaned)):
        raise ConeMetricError(f"residues sum to {total}: violates residue theorem")
    cleaned.sort(key=lambda e: point_sort_key(e[0]))
    return ThirdKindDifferential(tuple(cleaned))


def logarithmic_differential(f: RationalMap) -> ThirdKindDifferential:
    """``df/f``: residue +k at a zero of order k, -k at a pole of order k."""
    if f.is_constant:
        raise ConeMetricError("df/f of a constant map is not a third-kind differential")
    poles = []
    if f.num.degree > 0:
        poles += [(r, float(k)) for r, k in poly_roots(f.num)]
    if f.den.degree > 0:
        poles += [(r, -float(k)) for r, k in poly_roots(f.den)]
    k_inf = f.num.degree - f.den.degree
    if k_inf != 0:
        poles.append((INF, -float(k_inf)))
    return make_differential(poles)


def numerator_polynomial(w: ThirdKindDifferential):
    """``(N, D)`` with ``omega = N(z)/D(z) dz``, ``D = prod (z - q_k)`` over finite poles."""
    fin = w.finite
    n = len(fin)
    num = Polynomial()
    scale = 0.0
    for k, (_, r) in enumerate(fin):
        others = Polynomial.from_roots([q for j, (q, _) in enumerate(fin) if j != k])
        num = num + others * r
        scale += abs(r) * others.norm()
    c = np.array(num.array, dtype=complex)
    if len(c) and w.residue_at_infinity == 0 and len(c) == n:
        c[n - 1] = 0  # finite residues sum to zero
    num = Polynomial(c).chop(1e-12 * scale)
    den = Polynomial.from_roots([q for q, _ in fin])
    return num, den


def differential_divisor(w: ThirdKindDifferential) -> FormDivisor:
    """Zeros (with orders) and poles of ``omega``; the degree must be -2."""
    num, _ = numerator_polynomial(w)
    n = len(w.finite)
    zeros = []
    if num.degree > 0:
        zeros += list(poly_roots(num))
    if w.residue_at_infinity == 0:
        k_inf = n - 2 - num.degree
        if k_inf < 0:
            raise ConeMetricError("internal error: negative order at a regular point at infinity")
        if k_inf > 0:
            zeros.append((INF, k_inf))
    elif num.degree != n - 1:
        raise ConeMetricError("internal error: numerator degree inconsistent with pole at infinity")
    poles = tuple((q, 1) for q, _ in w.poles)
    zeros.sort(key=lambda e: point_sort_key(e[0]))
    out = FormDivisor(tuple(zeros), poles)
    if out.degree != -2:
        raise ConeMetricError(f"internal error: divisor degree {out.degree} != -2 (root finding)")
    return out


# ------------------------------------------------------------ invariants

def is_real_part_exact(w: ThirdKindDifferential) -> bool:
    """Periods of Re(omega) vanish iff every residue is real (genus zero)."""
    return all(abs(complex(r).imag) <= 1e-12 for _, r in w.poles)


def is_trivial(w: ThirdKindDifferential) -> bool:
    """All periods in 2*pi*i*Z, i.e. every residue is an integer."""
    return all(abs(r - round(r)) <= INTEGER_ATOL for _, r in w.poles)


def _is_smooth_residue(r: float) -> bool:
    return abs(abs(r) - 1.0) <= SMOOTH_ATOL


def _pole_kind(r: float) -> Kind:
    kind = "min" if r > 0 else "max"
    return f"smooth-{kind}" if _is_smooth_residue(r) else kind


def build_metric(w: ThirdKindDifferential) -> AbelianMetricDescriptor:
    """Cone divisor, area, triviality and critical-point classification of ``omega``.

    Zeros of order k are saddles with angle parameter k+1; a pole with
    residue r is a minimum (r > 0) or maximum (r < 0) of ``4|f|^2/(1+|f|^2)``
    with angle parameter |r|, dropped from the divisor when |r| = 1.
    """
    fd = differential_divisor(w)
    entries = [(p, k + 1) for p, k in fd.zeros]
    entries += [(q, abs(r)) for q, r in w.poles if not _is_smooth_residue(r)]
    classes = [(p, "saddle") for p, _ in fd.zeros]
    classes += [(q, _pole_kind(r)) for q, r in w.poles]
    classes.sort(key=lambda e: point_sort_key(e[0]))
    area = 2 * math.pi * math.fsum(abs(r) for _, r in w.poles)
    return AbelianMetricDescriptor(w, ConicalDivisor(tuple(entries)), is_trivial(w), area,
                                   tuple(classes))


def dual_field_orders(w: ThirdKindDifferential):
    """Zeros and poles of the dual field ``Y`` with ``omega(Y) = 1``."""
    fd = differential_divisor(w)
    out = [(q, "zero", 1) for q, _ in w.poles]
    out += [(p, "pole", k) for p, k in fd.zeros]
    out.sort(key=lambda e: point_sort_key(e[0]))
    return out


def psi_classify(w: ThirdKindDifferential, p: SpherePoint) -> Kind:
    """Critical type of ``p`` for ``4|f|^2/(1+|f|^2)``: 'min', 'max' or 'saddle'."""
    p = as_point(p)
    r = w.residue(p)
    if r is not None:
        return "min" if r > 0 else "max"
    for z, _ in differential_divisor(w).zeros:
        if chordal_distance(z, p) <= 1e-7:
            return "saddle"
    raise SingularityError(f"{p} is an ordinary point of omega")


def reconstruct_rational(w: ThirdKindDifferential) -> RationalMap:
    """The monic rational map ``prod (z - q_k)^{r_k}`` whose ``df/f`` is ``omega``."""
    if not is_trivial(w):
        raise ConeMetricError("monodromy obstruction: residues not integers")
    num = Polynomial([1.0])
    den = Polynomial([1.0])
    for q, r in w.finite:
        k = int(round(r))
        factor = Polynomial([-q, 1.0]) ** abs(k)
        if k > 0:
            num = num * factor
        else:
            den = den * factor
    return RationalMap(num, den, reduce=False)   # distinct poles, already coprime


# ----------------------------------------------------------- integration

def _segment_clearance(a: complex, b: complex, q: SpherePoint) -> float:
    if q is INF:
        return min(chordal_distance(a, INF), chordal_distance(b, INF))
    ab = b - a
    t = 0.0 if ab == 0 else max(0.0, min(1.0, ((q - a) * ab.conjugate()).real / abs(ab) ** 2))
    return chordal_distance(a + t * ab, q)


def check_clearance(w: ThirdKindDifferential, path: PathPolyline,
                    clearance: float = DEFAULT_CLEARANCE) -> None:
    for a, b in path.segments():
        for q, _ in w.poles:
            dist = _segment_clearance(a, b, q)
            if dist < clearance:
                raise PathError(f"segment {a} -> {b} passes within chordal distance "
                                f"{dist:.3e} of pole {q}")


def integrate(w: ThirdKindDifferential, path: PathPolyline, tol: float = 1e-10,
              clearance: float = DEFAULT_CLEARANCE) -> complex:
    """Integral of ``omega`` along ``path`` by adaptive Gauss-Legendre per segment."""
    check_clearance(w, path, clearance)
    segs = path.segments()
    return sum(integrate_segment(w, a, b, tol / len(segs)) for a, b in segs)


def develop(w: ThirdKindDifferential, basepoint: complex, path: PathPolyline,
            f_base: complex = 1.0, tol: float = 1e-10) -> complex:
    """``f(end) = f_base * exp(integral of omega along path)``; the path starts at ``basepoint``."""
    if abs(path.start - complex(basepoint)) > 1e-12 * (1 + abs(path.start)):
        raise PathError(f"path starts at {path.start}, not at basepoint {basepoint}")
    return complex(f_base) * cmath.exp(integrate(w, path, tol))


def psi_value(w: ThirdKindDifferential, basepoint: complex, path: PathPolyline,
              f_base: complex = 1.0) -> float:
    """``4|f|^2/(1+|f|^2)`` at the end of ``path``; independent of the path."""
    f = develop(w, basepoint, path, f_base)
    a = abs(f) ** 2
    return 4 * a / (1 + a)


def winding_number(loop: PathPolyline, q: complex) -> int:
    """Exact winding number of a closed polyline around ``q`` by signed ray crossings.

    Crossings of the ray ``q + [0, inf)`` are counted with the half-open
    rule, equivalent to rotating the ray by an infinitesimal angle.
    """
    wn = 0
    for a, b in loop.segments():
        cross = (b.real - a.real) * (q.imag - a.imag) - (q.real - a.real) * (b.imag - a.imag)
        if cross == 0 and min(a.real, b.real) <= q.real <= max(a.real, b.real) \
                and min(a.imag, b.imag) <= q.imag <= max(a.imag, b.imag):
            raise PathError(f"winding number undefined: {q} lies on segment {a} -> {b}")
        if a.imag <= q.imag:
            if b.imag > q.imag and cross > 0:
                wn += 1
        elif b.imag <= q.imag and cross < 0:
            wn -= 1
    return wn


def enclosed_residue_sum(w: ThirdKindDifferential, loop: PathPolyline) -> float:
    return math.fsum(winding_number(loop, q) * r for q, r in w.finite)


def monodromy_multiplier(w: ThirdKindDifferential, loop: PathPolyline,
                         tol: float = 1e-9) -> complex:
    """``exp(loop integral of omega)``, confirmed against ``exp(2 pi i sum n_k r_k)``."""
    if not loop.closed:
        raise PathError("monodromy needs a closed loop")
    quad = cmath.exp(integrate(w, loop))
    wind = cmath.exp(2j * math.pi * enclosed_residue_sum(w, loop))
    if abs(quad - wind) > tol:
        raise ConeMetricError(f"quadrature multiplier {quad} disagrees with winding value {wind}")
    return quad
