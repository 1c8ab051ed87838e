"""Complex polynomials and rational maps on the Riemann sphere.

Points of the sphere are plain Python ``complex`` numbers, or the
singleton :data:`INF` for the point at infinity.  Polynomials store
ascending coefficients; a :class:`RationalMap` is kept in coprime form
with a monic denominator, so two maps that agree as functions also
agree coefficient-wise (up to rounding).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import ConeMetricError, RootClusteringError

EPS = np.finfo(float).eps

# merge radius for roots that are certainly the same point
CLUSTER_RTOL = 1e-7
# widest radius over which a multiple root may be smeared by rounding
CLUSTER_SEARCH_RTOL = 5e-2
# Taylor coefficients below this fraction of their evaluation scale count as zero
MULTIPLICITY_RTOL = 1e-10
GCD_SV_RTOL = 1e-10


class _Infinity:
    """The point at infinity of the Riemann sphere (singleton)."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
SpherePoint = Union[complex, _Infinity]


def is_inf(p) -> bool:
    return p is INF


def as_point(p) -> SpherePoint:
    """Coerce ``p`` to a sphere point, rejecting NaN and infinite parts."""
    if p is INF or (isinstance(p, str) and p.lower() == "inf"):
        return INF
    z = complex(p)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ConeMetricError(f"non-finite complex number {p!r}; use INF for infinity")
    return z


def chordal_distance(p: SpherePoint, q: SpherePoint) -> float:
    """Chordal distance on the sphere of diameter 2 (so INF to 0 is 2)."""
    if p is INF and q is INF:
        return 0.0
    if p is INF:
        p, q = q, p
    if q is INF:
        return 2.0 / math.sqrt(1.0 + abs(p) ** 2)
    return 2.0 * abs(p - q) / math.sqrt((1.0 + abs(p) ** 2) * (1.0 + abs(q) ** 2))


def point_sort_key(p: SpherePoint):
    """Deterministic ordering: finite points by (re, im), infinity last."""
    if p is INF:
        return (1, 0.0, 0.0)
    return (0, round(p.real, 9), round(p.imag, 9))


class Polynomial:
    """Polynomial with complex coefficients in ascending order."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable = ()):
        if isinstance(coeffs, Polynomial):
            self._c = coeffs._c
            return
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                     dtype=complex).ravel()
        if not np.all(np.isfinite(c)):
            raise ConeMetricError("polynomial coefficients must be finite")
        nz = np.flatnonzero(c)
        # adding 0.0 turns signed zeros into +0.0
        c = c[: nz[-1] + 1] + 0.0 if nz.size else np.zeros(0, dtype=complex)
        c.setflags(write=False)
        self._c = c

    @classmethod
    def from_roots(cls, roots: Iterable[complex], lead: complex = 1.0) -> "Polynomial":
        p = cls([lead])
        for r in roots:
            p = p * cls([-r, 1.0])
        return p

    @property
    def coeffs(self) -> tuple:
        return tuple(complex(x) for x in self._c)

    @property
    def array(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return len(self._c) - 1

    @property
    def is_zero(self) -> bool:
        return len(self._c) == 0

    @property
    def leading(self) -> complex:
        return complex(self._c[-1]) if len(self._c) else 0j

    def norm(self) -> float:
        return float(np.linalg.norm(self._c))

    def __call__(self, z):
        if self.is_zero:
            return np.zeros_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 0j
        out = np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self._c)
        return complex(out) if np.ndim(out) == 0 else out

    def eval_scale(self, z):
        """Backward-error scale sum |a_k| |z|^k of evaluation at ``z``."""
        return np.polynomial.polynomial.polyval(np.abs(np.asarray(z)), np.abs(self._c))

    def deriv(self, k: int = 1) -> "Polynomial":
        if self.degree < k:
            return Polynomial()
        return Polynomial(np.polynomial.polynomial.polyder(self._c, k))

    def taylor(self, center: complex) -> np.ndarray:
        """Coefficients of ``p(center + x)`` in ascending powers of ``x``."""
        return _taylor_shift(self._c, center)

    def reversed(self, n: int | None = None) -> "Polynomial":
        """``w**n * p(1/w)`` with ``n`` defaulting to the degree."""
        if n is None:
            n = self.degree
        if n < self.degree:
            raise ConeMetricError("reversal order below polynomial degree")
        c = np.zeros(n + 1, dtype=complex)
        c[: len(self._c)] = self._c
        return Polynomial(c[::-1])

    def chop(self, atol: float) -> "Polynomial":
        """Zero every coefficient with modulus at most ``atol``."""
        c = self._c.copy()
        c[np.abs(c) <= atol] = 0
        return Polynomial(c)

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other
        return Polynomial([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self._c), len(other._c))
        c = np.zeros(n, dtype=complex)
        c[: len(self._c)] += self._c
        c[: len(other._c)] += other._c
        return Polynomial(c)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self._c)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(self._c * complex(other))
        if self.is_zero or other.is_zero:
            return Polynomial()
        return Polynomial(np.convolve(self._c, other._c))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Polynomial([1.0])
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, Polynomial) and np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({[_fmt(c) for c in self._c]})"


def _fmt(c: complex):
    c = complex(c)
    return c.real if c.imag == 0 else c


def _taylor_shift(c: np.ndarray, center: complex) -> np.ndarray:
    out = np.array(c, dtype=complex)
    n = len(out)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] += center * out[j + 1]
    return out


def vanishing_order(p: Polynomial, center: complex, rtol: float = MULTIPLICITY_RTOL) -> int:
    """Order of vanishing of ``p`` at ``center`` judged against evaluation scale."""
    if p.is_zero:
        raise ConeMetricError("zero polynomial vanishes to infinite order")
    t = np.abs(_taylor_shift(p.array, center))
    scale = _taylor_shift(np.abs(p.array), abs(center)).real
    k = 0
    while k < len(t) - 1 and t[k] <= rtol * scale[k]:
        k += 1
    return k


# ----------------------------------------------------------------- roots

def _aberth(c: np.ndarray, maxiter: int = 500):
    n = len(c) - 1
    dc = np.polynomial.polynomial.polyder(c)
    # companion eigenvalues are accurate in absolute terms; Aberth makes them relative
    z = np.roots(c[::-1]).astype(complex)
    if len(z) != n or not np.all(np.isfinite(z)):
        radius = abs(c[0] / c[-1]) ** (1.0 / n)
        z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    # separate coincident starts, which would make the Aberth sum singular
    z = z + 1e-9 * (1 + np.abs(z)) * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    for _ in range(maxiter):
        pz = np.polynomial.polynomial.polyval(z, c)
        dpz = np.polynomial.polynomial.polyval(z, dc)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = np.sum(1.0 / diff, axis=1)
            w = ratio / (1.0 - ratio * s)
        bad = ~np.isfinite(w)
        if np.any(bad):
            w[bad] = 1e-8 * (1 + np.abs(z[bad]))
        z = z - w
        # relative test: tiny nonzero roots must converge too
        if np.all((np.abs(w) <= 4 * EPS * np.abs(z)) | (pz == 0)):
            return z, True
    return z, False


def _residuals(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    val = np.abs(np.polynomial.polynomial.polyval(z, c))
    scale = np.polynomial.polynomial.polyval(np.abs(z), np.abs(c))
    return val / scale


def _raw_roots(c: np.ndarray, tol: float):
    z, _ = _aberth(c)
    res = _residuals(c, z)
    if np.all(res <= tol):
        return z
    z = np.roots(c[::-1])
    res = _residuals(c, z)
    if np.all(res <= tol):
        return z
    raise RootClusteringError(
        f"root finder failed residual test (max relative residual {res.max():.3e})",
        residuals=res.tolist())


def _polish(c: np.ndarray, z0: complex, m: int) -> complex:
    """Newton on the (m-1)-th derivative, where an m-fold root is simple."""
    d = np.polynomial.polynomial.polyder(c, m - 1) if m > 1 else c
    dd = np.polynomial.polynomial.polyder(d)
    z = z0
    for _ in range(20):
        fp = np.polynomial.polynomial.polyval(z, dd)
        if fp == 0:
            break
        step = np.polynomial.polynomial.polyval(z, d) / fp
        z = z - step
        if abs(step) <= 4 * EPS * (1 + abs(z)):
            break
    if not np.isfinite(z) or abs(z - z0) > CLUSTER_SEARCH_RTOL * (1 + abs(z0)):
        return z0
    return complex(z)


def _multiplicity_ok(c: np.ndarray, center: complex, m: int) -> bool:
    t = np.abs(_taylor_shift(c, center))
    scale = _taylor_shift(np.abs(c), abs(center)).real
    return bool(np.all(t[:m] <= MULTIPLICITY_RTOL * scale[:m]))


def _cluster(c: np.ndarray, roots: np.ndarray):
    groups = [[complex(r)] for r in roots]

    def center(g):
        return _polish(c, sum(g) / len(g), len(g))

    # unconditional merge inside the tight radius
    merged = True
    while merged:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                ci, cj = center(groups[i]), center(groups[j])
                if abs(ci - cj) <= CLUSTER_RTOL * (1 + max(abs(ci), abs(cj))):
                    groups[i] += groups.pop(j)
                    merged = True
                    break
            if merged:
                break

    # smeared multiple roots: merge only if the Taylor test confirms it
    rejected = set()
    while True:
        cands = []
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                ci, cj = center(groups[i]), center(groups[j])
                d = abs(ci - cj)
                key = (tuple(sorted(groups[i], key=_ckey)), tuple(sorted(groups[j], key=_ckey)))
                if d <= CLUSTER_SEARCH_RTOL * (1 + max(abs(ci), abs(cj))) and key not in rejected:
                    cands.append((d, i, j, key))
        cands.sort(key=lambda x: x[0])
        done = True
        for d, i, j, key in cands:
            g = groups[i] + groups[j]
            if _multiplicity_ok(c, center(g), len(g)):
                groups[i] = g
                groups.pop(j)
                done = False
                break
            rejected.add(key)
        if done:
            break
    return [(center(g), len(g)) for g in groups]


def _ckey(z):
    return (z.real, z.imag)


def _snap(r: complex) -> complex:
    """Zero out a real or imaginary part that is pure rounding noise."""
    cut = 4 * EPS * abs(r)
    return complex(r.real if abs(r.real) > cut else 0.0, r.imag if abs(r.imag) > cut else 0.0)


def poly_roots(p: Polynomial, tol: float = 1e-10) -> list:
    """Roots of ``p`` with multiplicities, as ``[(root, multiplicity), ...]``.

    Simple roots come from Aberth iteration (companion-matrix eigenvalues
    as fallback).  Roots closer than ``1e-7*(1+|r|)`` are merged; wider
    clusters are merged only when the Taylor coefficients of ``p`` at the
    cluster centroid vanish to the cluster size.
    """
    p = Polynomial(p)
    if p.is_zero:
        raise ConeMetricError("zero polynomial has no root set")
    c = p.array
    k0 = int(np.flatnonzero(c)[0])
    out = [(0j, k0)] if k0 else []
    c = c[k0:]
    if len(c) > 1:
        roots = _raw_roots(c, tol)
        for r, m in _cluster(c, roots):
            if k0 and abs(r) <= CLUSTER_RTOL:
                out[0] = (0j, out[0][1] + m)    # numerically zero: join the exact zero root
            else:
                out.append((_snap(r), m))
    out.sort(key=lambda rm: point_sort_key(rm[0]))
    if sum(m for _, m in out) != p.degree:
        raise RootClusteringError("root multiplicities do not sum to the degree")
    return out


# ---------------------------------------------------------- rational maps

def _conv_matrix(c: np.ndarray, k: int) -> np.ndarray:
    n = len(c) - 1
    out = np.zeros((n + k, k), dtype=complex)
    for j in range(k):
        out[j: j + n + 1, j] = c
    return out


def _reduce(num: Polynomial, den: Polynomial):
    """Cancel the approximate GCD of ``num`` and ``den``."""
    if num.is_zero:
        return num, Polynomial([1.0])
    n, m = num.degree, den.degree
    if n == 0 or m == 0:
        return num, den
    pn, qn = num.norm(), den.norm()
    p, q = num.array / pn, den.array / qn
    syl = np.hstack([_conv_matrix(p, m), _conv_matrix(q, n)])
    sv = np.linalg.svd(syl, compute_uv=False)
    k = int(np.sum(sv < GCD_SV_RTOL * sv[0]))
    if k == 0:
        return num, den
    a = np.hstack([_conv_matrix(p, m - k + 1), -_conv_matrix(q, n - k + 1)])
    _, _, vh = np.linalg.svd(a)
    null = vh[-1].conj()
    v, u = null[: m - k + 1], null[m - k + 1:]
    # SVD noise in structurally zero coefficients would fake roots at 0
    u = Polynomial(u).chop(64 * EPS * np.linalg.norm(u)) * (pn / qn)
    v = Polynomial(v).chop(64 * EPS * np.linalg.norm(v))
    if u.degree != n - k or v.degree != m - k:
        raise ConeMetricError("approximate gcd produced inconsistent cofactor degrees")
    return u, v


class RationalMap:
    """A rational map ``num/den`` of the Riemann sphere.

    The constructor cancels common factors (singular values of the
    Sylvester matrix below ``1e-10`` relative) and scales so ``den`` is
    monic.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=(1.0,), *, reduce: bool = True):
        num, den = Polynomial(num), Polynomial(den)
        if den.is_zero:
            raise ConeMetricError("denominator is the zero polynomial")
        if reduce:
            num, den = _reduce(num, den)
        lead = den.leading
        self.num = num * (1 / lead)
        self.den = den * (1 / lead)

    @property
    def degree(self) -> int:
        if self.num.is_zero:
            return 0
        return max(self.num.degree, self.den.degree)

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    def __call__(self, z):
        return self.num(z) / self.den(z)

    def chart_pair(self, at_infinity: bool = False):
        """Numerator/denominator polynomials in the chart around 0 or infinity.

        At infinity both are reversed with the common formal degree, so
        their ratio is ``f(1/w)``.
        """
        if not at_infinity:
            return self.num, self.den
        d = self.degree
        return self.num.reversed(d) if not self.num.is_zero else self.num, self.den.reversed(d)

    def wronskian(self, at_infinity: bool = False) -> Polynomial:
        """``P'Q - PQ'``; vanishes exactly at the critical points of the map."""
        p, q = self.chart_pair(at_infinity)
        terms = [p.deriv() * q, p * q.deriv()]
        w = terms[0] - terms[1]
        scale = max((t.norm() for t in terms), default=0.0)
        return w.chop(16 * EPS * scale)

    def __repr__(self):
        return f"RationalMap(num={self.num!r}, den={self.den!r})"


def rational_eval(f: RationalMap, p: SpherePoint) -> SpherePoint:
    """Value of ``f`` at a sphere point, using the ``1/z`` chart at infinity."""
    p = as_point(p)
    if p is INF:
        dp = f.num.degree
        dq = f.den.degree
        if f.num.is_zero or dp < dq:
            return 0j
        if dp > dq:
            return INF
        return f.num.leading / f.den.leading
    pv, qv = f.num(p), f.den(p)
    q_scale = float(f.den.eval_scale(p))
    if abs(qv) <= 64 * EPS * q_scale:
        p_scale = float(f.num.eval_scale(p)) if not f.num.is_zero else 0.0
        if abs(pv) <= 64 * EPS * p_scale:
            raise ConeMetricError("internal error: 0/0 in a reduced rational map")
        return INF
    return pv / qv


def rational_derivative(f: RationalMap) -> RationalMap:
    """Quotient-rule derivative in reduced form."""
    return RationalMap(f.wronskian(), f.den * f.den)


def moebius(a: complex, b: complex, c: complex, d: complex) -> RationalMap:
    """The fractional linear map ``(a z + b)/(c z + d)``."""
    if abs(a * d - b * c) == 0:
        raise ConeMetricError("degenerate Moebius transformation (ad - bc = 0)")
    return RationalMap([b, a], [d, c])


def compose(f: RationalMap, g: RationalMap) -> RationalMap:
    """``f o g`` as a reduced rational map."""
    d = f.degree
    a, b = g.num, g.den
    pows_a = [Polynomial([1.0])]
    pows_b = [Polynomial([1.0])]
    for _ in range(d):
        pows_a.append(pows_a[-1] * a)
        pows_b.append(pows_b[-1] * b)
    fc_num = np.zeros(d + 1, dtype=complex)
    fc_den = np.zeros(d + 1, dtype=complex)
    fc_num[: len(f.num.array)] = f.num.array
    fc_den[: len(f.den.array)] = f.den.array
    num = Polynomial()
    den = Polynomial()
    for k in range(d + 1):
        term = pows_a[k] * pows_b[d - k]
        num = num + term * fc_num[k]
        den = den + term * fc_den[k]
    return RationalMap(num, den)


@dataclass(frozen=True)
class SU2Moebius:
    """Unitary Moebius map ``w -> (a w + b)/(-conj(b) w + conj(a))``."""

    a: complex
    b: complex

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        if abs(abs(self.a) ** 2 + abs(self.b) ** 2 - 1.0) > 1e-12:
            raise ConeMetricError("SU(2) element requires |a|^2 + |b|^2 = 1")

    @classmethod
    def random(cls, rng: np.random.Generator) -> "SU2Moebius":
        v = rng.normal(size=4)
        v /= np.linalg.norm(v)
        return cls(complex(v[0], v[1]), complex(v[2], v[3]))

    def as_map(self) -> RationalMap:
        return RationalMap([self.b, self.a], [self.a.conjugate(), -self.b.conjugate()])

    def apply(self, w: SpherePoint) -> SpherePoint:
        a, b = self.a, self.b
        w = as_point(w)
        if w is INF:
            return INF if b == 0 else a / (-b.conjugate())
        den = -b.conjugate() * w + a.conjugate()
        if den == 0:
            return INF
        return (a * w + b) / den


def su2_compose(L: SU2Moebius, f: RationalMap) -> RationalMap:
    """Post-compose ``f`` with a unitary Moebius map; the degree is unchanged."""
    p, q = f.num, f.den
    return RationalMap(p * L.a + q * L.b, p * (-L.b.conjugate()) + q * L.a.conjugate())


__all__ = [
    "INF", "SpherePoint", "is_inf", "as_point", "chordal_distance", "point_sort_key",
    "Polynomial", "poly_roots", "vanishing_order", "RationalMap", "rational_eval",
    "rational_derivative", "moebius", "compose", "SU2Moebius", "su2_compose",
]
