"""Globally adaptive Gauss-Legendre quadrature for smooth, sharply peaked integrands."""
import heapq
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError


@lru_cache(maxsize=None)
def _nodes(order):
    return np.polynomial.legendre.leggauss(order)


def _panel(f, a, b, order):
    x, w = _nodes(order)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * np.dot(w, f(mid + half * x))


def adaptive_gauss_legendre(f, a, b, tol=1e-9, order=16, breakpoints=(), max_panels=4000):
    """Integrate a vectorized ``f`` over ``[a, b]``.

    Each panel is estimated twice, whole and as two halves; the panel with
    the largest discrepancy is bisected until the summed discrepancy is
    below ``tol``.

    Returns
    -------
    value : float
    error : float
        sum of panel discrepancies (a conservative estimate)
    """
    edges = sorted({a, b, *(p for p in breakpoints if a < p < b)})
    heap = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        heap.append(_make(f, lo, hi, order))
    heapq.heapify(heap)
    total_err = sum(-item[0] for item in heap)
    n_panels = len(heap)
    while total_err > tol:
        if n_panels >= max_panels:
            raise ConvergenceError(
                f"quadrature did not converge: error {total_err:.3e} > tol {tol:.1e}",
                achieved=total_err,
            )
        neg_err, lo, hi, _ = heapq.heappop(heap)
        total_err += neg_err
        mid = 0.5 * (lo + hi)
        for item in (_make(f, lo, mid, order), _make(f, mid, hi, order)):
            heapq.heappush(heap, item)
            total_err -= item[0]
        n_panels += 1
    value = sum(item[3] for item in heap)
    return value, total_err


def _make(f, lo, hi, order):
    coarse = _panel(f, lo, hi, order)
    mid = 0.5 * (lo + hi)
    fine = _panel(f, lo, mid, order) + _panel(f, mid, hi, order)
    return (-abs(fine - coarse), lo, hi, fine)
