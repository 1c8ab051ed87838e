"""Adaptive Gauss-Legendre quadrature on segments and rectangles."""

from __future__ import annotations

import heapq
import math
from functools import lru_cache

import numpy as np

from .errors import QuadratureError


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _fsum_complex(values) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def integrate_segment(func, a: complex, b: complex, tol: float = 1e-10,
                      order: int = 16, max_intervals: int = 20000) -> complex:
    """Integral of a vectorised complex ``func`` along the straight segment a -> b.

    Each interval is accepted once its GL estimate agrees with the sum over
    its two halves to within its share of ``tol`` (absolute).
    """
    x, w = gauss_legendre(order)
    dz = b - a

    def rule(t0, t1):
        t = t0 + (t1 - t0) * x
        return complex(np.sum(w * func(a + t * dz)) * (t1 - t0) * dz)

    done = []
    stack = [(0.0, 1.0, rule(0.0, 1.0))]
    count = 0
    while stack:
        t0, t1, whole = stack.pop()
        mid = 0.5 * (t0 + t1)
        left, right = rule(t0, mid), rule(mid, t1)
        err = abs(left + right - whole)
        if err <= tol * (t1 - t0) or (t1 - t0) < 1e-14:
            done.append((t0, left + right))
            continue
        count += 1
        if count > max_intervals:
            est = _fsum_complex([v for _, v in done] + [s[2] for s in stack] + [left + right])
            raise QuadratureError("segment quadrature exceeded interval budget",
                                  estimate=est, error=err)
        stack.append((mid, t1, right))
        stack.append((t0, mid, left))
    done.sort(key=lambda tv: tv[0])
    return _fsum_complex(v for _, v in done)


def integrate_rectangle(func, x0: float, x1: float, y0: float, y1: float,
                        rtol: float = 1e-8, atol: float = 0.0, order: int = 10,
                        max_cells: int = 40000):
    """Adaptive tensor Gauss-Legendre integral of a real vectorised ``func(x, y)``.

    The cell with the largest local error is split into four until the
    summed error estimate drops below ``max(atol, rtol*|I|)``.  Returns
    ``(value, error_estimate)``.
    """
    gx, gw = gauss_legendre(order)
    ww = np.outer(gw, gw)

    def rule(ax, bx, ay, by):
        xs = ax + (bx - ax) * gx
        ys = ay + (by - ay) * gx
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return float(np.sum(ww * func(X, Y)) * (bx - ax) * (by - ay))

    def split(cell):
        ax, bx, ay, by = cell
        mx, my = 0.5 * (ax + bx), 0.5 * (ay + by)
        kids = [(ax, mx, ay, my), (mx, bx, ay, my), (ax, mx, my, by), (mx, bx, my, by)]
        return kids, [rule(*k) for k in kids]

    def make(cell, value):
        kids, vals = split(cell)
        fine = math.fsum(vals)
        return (-abs(fine - value), cell, fine, kids, vals)

    root = (x0, x1, y0, y1)
    heap = [make(root, rule(*root))]
    ncells = 1
    while True:
        total = math.fsum(h[2] for h in heap)
        err = math.fsum(-h[0] for h in heap)
        if err <= max(atol, rtol * abs(total)):
            # ordered summation keeps the result independent of heap layout
            ordered = sorted(heap, key=lambda h: h[1])
            return math.fsum(h[2] for h in ordered), err
        if ncells > max_cells:
            raise QuadratureError(
                f"area quadrature did not converge: estimate {total!r}, error {err:.3e}",
                estimate=total, error=err)
        _, cell, fine, kids, vals = heapq.heappop(heap)
        for k, v in zip(kids, vals):
            heapq.heappush(heap, make(k, v))
            ncells += 1
