"""Adaptive Gauss-Legendre quadrature on intervals and rectangles.

A panel is accepted when its n-point rule agrees with the sum of the n-point
rules on its halves (quadrants in 2-D); otherwise the halves are refined.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

DEFAULT_ORDER = 20


class QuadratureError(RuntimeError):
    pass


def _rule(order):
    nodes, weights = leggauss(order)
    return nodes, weights


def _panel_1d(f, a, b, nodes, weights):
    # a, b: arrays of panel edges; returns one estimate per panel
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * nodes[None, :]
    return half * (f(x) @ weights)


def integrate_1d(f, a: float, b: float, rtol: float = 1e-13, atol: float = 0.0,
                 order: int = DEFAULT_ORDER, max_panels: int = 200_000) -> float:
    """Integrate vectorised ``f`` over ``[a, b]``."""
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    nodes, weights = _rule(order)
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    coarse = _panel_1d(f, lo, hi, nodes, weights)
    scale = abs(coarse.sum())
    total = 0.0
    while lo.size:
        mid = 0.5 * (lo + hi)
        left = _panel_1d(f, lo, mid, nodes, weights)
        right = _panel_1d(f, mid, hi, nodes, weights)
        fine = left + right
        scale = max(scale, abs(total + fine.sum()))
        tol = np.maximum(atol, rtol * scale) * (hi - lo) / (b - a)
        ok = np.abs(fine - coarse) <= tol
        total += fine[ok].sum()
        keep = ~ok
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        coarse = np.concatenate([left[keep], right[keep]])
        if lo.size > max_panels:
            raise QuadratureError("1-D quadrature did not converge")
    return sign * float(total)


def _panel_2d(f, ax, bx, ay, by, nodes, weights):
    hx = 0.5 * (bx - ax)
    hy = 0.5 * (by - ay)
    x = (0.5 * (ax + bx))[:, None, None] + hx[:, None, None] * nodes[None, :, None]
    y = (0.5 * (ay + by))[:, None, None] + hy[:, None, None] * nodes[None, None, :]
    vals = f(x, y)
    return hx * hy * np.einsum("pij,i,j->p", vals, weights, weights)


def integrate_2d(f, ax: float, bx: float, ay: float, by: float, rtol: float = 1e-13,
                 atol: float = 0.0, order: int = DEFAULT_ORDER,
                 max_panels: int = 200_000) -> float:
    """Integrate vectorised ``f(x, y)`` over the rectangle ``[ax, bx] x [ay, by]``."""
    if ax == bx or ay == by:
        return 0.0
    if bx < ax or by < ay:
        raise ValueError("rectangle bounds must be ordered")
    nodes, weights = _rule(order)
    area = (bx - ax) * (by - ay)
    ax_ = np.array([ax], dtype=float)
    bx_ = np.array([bx], dtype=float)
    ay_ = np.array([ay], dtype=float)
    by_ = np.array([by], dtype=float)
    coarse = _panel_2d(f, ax_, bx_, ay_, by_, nodes, weights)
    scale = abs(coarse.sum())
    total = 0.0
    while ax_.size:
        mx = 0.5 * (ax_ + bx_)
        my = 0.5 * (ay_ + by_)
        quads = [
            (ax_, mx, ay_, my), (mx, bx_, ay_, my),
            (ax_, mx, my, by_), (mx, bx_, my, by_),
        ]
        parts = [_panel_2d(f, *q, nodes, weights) for q in quads]
        fine = sum(parts)
        scale = max(scale, abs(total + fine.sum()))
        tol = np.maximum(atol, rtol * scale) * (bx_ - ax_) * (by_ - ay_) / area
        ok = np.abs(fine - coarse) <= tol
        total += fine[ok].sum()
        keep = ~ok
        ax_ = np.concatenate([q[0][keep] for q in quads])
        bx_ = np.concatenate([q[1][keep] for q in quads])
        ay_ = np.concatenate([q[2][keep] for q in quads])
        by_ = np.concatenate([q[3][keep] for q in quads])
        coarse = np.concatenate([part[keep] for part in parts])
        if ax_.size > max_panels:
            raise QuadratureError("2-D quadrature did not converge")
    return float(total)
