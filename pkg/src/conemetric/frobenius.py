"""Frobenius method for ``x^2 u'' + q(x) u = 0`` at a regular singular point.

The equation is ``u'' + (1/2)(c/x^2 + d/x + phi(x)) u = 0`` written with
``q = (c + d x + x^2 phi)/2 = sum b_k x^k``.  With
``u = x^s sum c_k x^k`` and indicial polynomial ``F(s) = s(s-1) + b_0``
the coefficients obey

    F(s + n) c_n + R_n = 0,    R_n = sum_{i<n} c_i b_{n-i}.

For ``b_0 = (1 - alpha^2)/4`` the exponents are ``(1 -+ alpha)/2``.  When
alpha is an integer m the branch at the smaller exponent meets
``F(s0 + m) = 0`` and survives only if ``R_m = 0``; otherwise the second
solution carries a ``log x`` term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ConeMetricError, ResonanceError
from .schwarzian import SchwarzianTail

DEFAULT_ORDER = 32
RESONANCE_ATOL = 1e-12
INTEGER_ATOL = 1e-9
APPARENT_RTOL = 1e-9


@dataclass(frozen=True)
class PowerSeries:
    """Truncated series ``sum_{k<=order} b_k x^k``."""

    coeffs: tuple
    order: int = DEFAULT_ORDER

    def __post_init__(self):
        if self.order < 1:
            raise ConeMetricError("series truncation order must be >= 1")
        c = [complex(v) for v in self.coeffs][: self.order + 1]
        c += [0j] * (self.order + 1 - len(c))
        object.__setattr__(self, "coeffs", tuple(c))

    def __getitem__(self, k: int) -> complex:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0j

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=complex), self.coeffs)


@dataclass(frozen=True)
class FrobeniusSolution:
    """``x^s sum c_k x^k  +  log(x) x^t sum l_k x^k`` (log part only if ``logarithmic``)."""

    exponent: complex
    coeffs: tuple
    logarithmic: bool = False
    companion_coeffs: tuple = ()
    log_exponent: complex = 0j

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def evaluate(self, x, log_x=None):
        """Value at ``x``; ``log_x`` selects the branch (principal by default)."""
        x = np.asarray(x, dtype=complex)
        lx = np.log(x) if log_x is None else np.asarray(log_x, dtype=complex)
        out = np.exp(self.exponent * lx) * np.polynomial.polynomial.polyval(x, self.coeffs)
        if self.logarithmic:
            out = out + lx * np.exp(self.log_exponent * lx) * \
                np.polynomial.polynomial.polyval(x, self.companion_coeffs)
        return out

    def residuals(self, q: PowerSeries) -> np.ndarray:
        """Coefficients of ``L u`` at ``x^{s+n}`` (then at ``log x * x^{t+n}``), n <= order."""
        s = self.exponent
        b0 = q[0]
        c = self.coeffs
        n_max = self.order
        res = np.zeros(n_max + 1, dtype=complex)
        for n in range(n_max + 1):
            res[n] = ((s + n) * (s + n - 1) + b0) * c[n] + sum(c[i] * q[n - i] for i in range(n))
        if not self.logarithmic:
            return res
        shift = int(round((self.log_exponent - s).real))
        lc = self.companion_coeffs
        log_res = np.zeros(len(lc), dtype=complex)
        t = self.log_exponent
        for n in range(len(lc)):
            log_res[n] = ((t + n) * (t + n - 1) + b0) * lc[n] + sum(lc[i] * q[n - i] for i in range(n))
            # d/dx of log x produces (2(t+n) - 1) l_n x^{t+n}
            if shift + n <= n_max:
                res[shift + n] += (2 * (t + n) - 1) * lc[n]
        return np.concatenate([res, log_res])


@dataclass(frozen=True)
class LocalNormalForm:
    """``f = u1/u0 = mu x^alpha * unit`` (or ``lambda x^-alpha * unit``)."""

    alpha: float
    form: Literal["mu_zs", "lambda_z_negs"]
    mu_or_lambda: complex
    unit: tuple = ()


def indicial(q: PowerSeries, s: complex) -> complex:
    return s * (s - 1) + q[0]


def indicial_roots(alpha: float):
    """Roots ``((1 - alpha)/2, (1 + alpha)/2)`` of ``s(s-1) + (1 - alpha^2)/4``."""
    if not alpha > 0:
        raise ConeMetricError("alpha must be positive")
    return (1.0 - alpha) / 2.0, (1.0 + alpha) / 2.0


def _coefficients(q: PowerSeries, s: complex, n_max: int, forced=None):
    """c_0..c_n_max from the recurrence; ``forced`` maps index -> fixed value."""
    c = [1.0 + 0j]
    for n in range(1, n_max + 1):
        if forced and n in forced:
            c.append(complex(forced[n]))
            continue
        fn = indicial(q, s + n)
        if abs(fn) < RESONANCE_ATOL:
            raise ResonanceError(f"resonant index {n}; use local_solutions", n)
        rn = sum(c[i] * q[n - i] for i in range(n))
        c.append(-rn / fn)
    return c


def _coefficients_ds(q: PowerSeries, s: complex, n_max: int):
    """c_k(s) and dc_k/ds by differentiating the recurrence."""
    c, dc = [1.0 + 0j], [0j]
    for n in range(1, n_max + 1):
        fn = indicial(q, s + n)
        dfn = 2 * (s + n) - 1
        if abs(fn) < RESONANCE_ATOL:
            raise ResonanceError(f"resonant index {n}; use local_solutions", n)
        rn = sum(c[i] * q[n - i] for i in range(n))
        drn = sum(dc[i] * q[n - i] for i in range(n))
        c.append(-rn / fn)
        dc.append(-(drn * fn - rn * dfn) / fn ** 2)
    return c, dc


def frobenius_series(q: PowerSeries, s: complex, N: int = DEFAULT_ORDER) -> FrobeniusSolution:
    """Series solution on the branch with exponent ``s`` (an indicial root)."""
    s = complex(s)
    if abs(indicial(q, s)) > 1e-9 * (1 + abs(s) ** 2):
        raise ConeMetricError(f"{s} is not a root of the indicial equation")
    return FrobeniusSolution(s, tuple(_coefficients(q, s, N)))


def _integer_part(alpha: float):
    m = round(alpha)
    if m >= 1 and abs(alpha - m) < INTEGER_ATOL:
        return int(m)
    return None


def _check_weight(q: PowerSeries, alpha: float):
    expected = (1.0 - alpha * alpha) / 4.0
    if abs(q[0] - expected) > 1e-9 * (1 + abs(expected)):
        raise ConeMetricError(f"q(0) = {q[0]} does not match alpha = {alpha} "
                              f"(expected {(1 - alpha * alpha) / 4})")


def resonance_obstruction(q: PowerSeries, alpha: int) -> complex:
    """``R_m`` at the smaller exponent for integer ``alpha = m``; zero iff apparent."""
    m = _integer_part(float(alpha))
    if m is None:
        raise ConeMetricError(f"resonance obstruction needs an integer alpha, got {alpha}")
    _check_weight(q, float(m))
    s0, _ = indicial_roots(float(m))
    c = _coefficients(q, s0, m - 1)
    return complex(sum(c[i] * q[m - i] for i in range(m)))


def local_solutions(q: PowerSeries, alpha: float, N: int = DEFAULT_ORDER):
    """Two independent local solutions ``(u at s0, u at s1)``.

    Non-integer alpha: both Frobenius branches.  Integer ``alpha = m`` with
    ``R_m = 0``: both branches log-free, with ``c_m`` fixed to 0.  Otherwise
    the first solution is ``u* - (R_m/F'(s1)) du/ds|_{s1}``, which carries
    ``-(R_m/F'(s1)) log(x) u(s1, x)``.
    """
    alpha = float(alpha)
    _check_weight(q, alpha)
    s0, s1 = indicial_roots(alpha)
    m = _integer_part(alpha)
    if m is None:
        return frobenius_series(q, s0, N), frobenius_series(q, s1, N)
    s0, s1 = (1 - m) / 2, (1 + m) / 2
    c1, dc1 = _coefficients_ds(q, s1, N)
    upper = FrobeniusSolution(complex(s1), tuple(c1))
    head = _coefficients(q, s0, m - 1)
    terms = [head[i] * q[m - i] for i in range(m)]
    r_m = sum(terms)
    scale = max([1.0] + [abs(t) for t in terms])
    if m > N:
        return FrobeniusSolution(complex(s0), tuple(head[: N + 1])), upper
    c0 = _coefficients(q, s0, N, forced={m: 0.0})
    if abs(r_m) <= APPARENT_RTOL * scale:
        return FrobeniusSolution(complex(s0), tuple(c0)), upper
    k = r_m / (2 * s1 - 1)
    coeffs = [c0[n] - (k * dc1[n - m] if n >= m else 0) for n in range(N + 1)]
    log_part = tuple(-k * c for c in c1[: N - m + 1])
    lower = FrobeniusSolution(complex(s0), tuple(coeffs), True, log_part, complex(s1))
    return lower, upper


def ode_from_schwarzian(tail: SchwarzianTail, order: int = DEFAULT_ORDER) -> PowerSeries:
    """``q = (c + d x + x^2 phi(x))/2`` with ``phi`` recovered from the tail's samples by DFT."""
    if tail.c >= 0.5:
        raise ConeMetricError(f"weight c = {tail.c} >= 1/2")
    samples = tail.regular_samples
    n_phi = order - 1
    if n_phi > len(samples):
        raise ConeMetricError(f"order {order} needs at least {n_phi} samples, "
                              f"tail has {len(samples)}")
    coeffs = [tail.c / 2, tail.d / 2]
    if n_phi > 0:
        x = np.array([s[0] for s in samples])
        v = np.array([s[1] for s in samples])
        for n in range(n_phi):
            coeffs.append(complex(np.mean(v * x ** (-n))) / 2)
    return PowerSeries(tuple(coeffs), order)


def tail_from_coefficients(center, c: float, d: complex = 0j, phi=(),
                           radius: float = 0.5, n_samples: int = 64) -> SchwarzianTail:
    """A tail whose regular part is the polynomial ``phi`` (ascending coefficients)."""
    theta = 2 * math.pi * np.arange(n_samples) / n_samples
    x = radius * np.exp(1j * theta)
    vals = np.polynomial.polynomial.polyval(x, phi) if len(phi) else np.zeros_like(x)
    return SchwarzianTail(center, float(c), complex(d), radius,
                          tuple((complex(a), complex(b)) for a, b in zip(x, vals)))


def ratio_normal_form(sol0: FrobeniusSolution, sol1: FrobeniusSolution) -> LocalNormalForm:
    """Write ``u1/u0`` as ``x^(+-alpha)`` times a unit power series."""
    if sol0.logarithmic or sol1.logarithmic:
        raise ConeMetricError("no z^alpha normal form; non-compact local monodromy")
    diff = (sol1.exponent - sol0.exponent).real
    n = min(sol0.order, sol1.order)
    num, den = sol1.coeffs, sol0.coeffs
    unit = []
    for k in range(n + 1):
        acc = num[k] - sum(unit[j] * den[k - j] for j in range(k))
        unit.append(acc / den[0])
    if abs(unit[0]) == 0:
        raise ConeMetricError("ratio has no unit leading coefficient")
    form = "mu_zs" if diff > 0 else "lambda_z_negs"
    return LocalNormalForm(abs(diff), form, complex(unit[0]), tuple(unit))


def loop_multiplier(sol0: FrobeniusSolution, sol1: FrobeniusSolution,
                    radius: float = 0.1, steps: int = 256) -> complex:
    """Factor picked up by ``u1/u0`` when ``x`` circles once around 0."""
    theta = np.linspace(0.0, 2 * math.pi, steps + 1)
    x = radius * np.exp(1j * theta)
    log_x = math.log(radius) + 1j * theta
    ratio = sol1.evaluate(x, log_x) / sol0.evaluate(x, log_x)
    return complex(ratio[-1] / ratio[0])


def wronskian(sol0: FrobeniusSolution, sol1: FrobeniusSolution, x: complex,
              h: float = 1e-6) -> complex:
    """``u0 u1' - u0' u1`` at ``x`` by central differences on the principal branch."""
    def d(sol):
        return (sol.evaluate(x + h) - sol.evaluate(x - h)) / (2 * h)
    return complex(sol0.evaluate(x) * d(sol1) - d(sol0) * sol1.evaluate(x))


__all__ = ["PowerSeries", "FrobeniusSolution", "LocalNormalForm", "indicial_roots",
           "frobenius_series", "resonance_obstruction", "local_solutions",
           "ode_from_schwarzian", "tail_from_coefficients", "ratio_normal_form",
           "loop_multiplier", "wronskian"]
