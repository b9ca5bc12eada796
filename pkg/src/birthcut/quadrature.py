"""Gauss-Legendre quadrature at working precision.

Nodes and weights are computed by Newton iteration on the Legendre recurrence,
seeded with the double-precision rule, and cached per (order, precision).
Composite rules double the panel count until the value stabilizes; integrands
with square-root endpoint behavior should be fed through a substitution first
(the callers in this package do).
"""

from __future__ import annotations

import numpy as np
from mpmath import mp, mpf

_CACHE = {}


def gauss_legendre(n: int):
    """Nodes and weights on [-1, 1] at the current precision."""
    key = (n, mp.prec)
    got = _CACHE.get(key)
    if got is not None:
        return got
    seeds, _ = np.polynomial.legendre.leggauss(n)
    xs, ws = [], []
    one = mpf(1)
    for s in seeds:
        x = mpf(float(s))
        for _ in range(60):
            p0, p1 = one, x
            for k in range(1, n):
                p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
            dp = n * (x * p1 - p0) / (x * x - 1)
            dx = p1 / dp
            x -= dx
            if abs(dx) < mpf(2) ** (-mp.prec + 4) * (abs(x) + 1):
                break
        p0, p1 = one, x
        for k in range(1, n):
            p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
        dp = n * (x * p1 - p0) / (x * x - 1)
        xs.append(x)
        ws.append(2 / ((1 - x * x) * dp * dp))
    _CACHE[key] = (xs, ws)
    return xs, ws


def panel_nodes(a, b, panels: int, n: int = 64):
    """Nodes and weights of a composite rule on [a, b]."""
    xs, ws = gauss_legendre(n)
    a, b = mpf(a), mpf(b)
    h = (b - a) / panels
    nodes, weights = [], []
    for i in range(panels):
        lo = a + i * h
        mid = lo + h / 2
        half = h / 2
        for x, w in zip(xs, ws):
            nodes.append(mid + half * x)
            weights.append(half * w)
    return nodes, weights


def integrate_gl(f, a, b, panels=1, n=64):
    nodes, weights = panel_nodes(a, b, panels, n)
    acc = mpf(0)
    for x, w in zip(nodes, weights):
        acc += w * f(x)
    return acc


def integrate_doubling(f, a, b, n=64, rel_tol=None, max_panels=64):
    """Composite GL, doubling panels until the relative change is below tol."""
    if rel_tol is None:
        rel_tol = mpf(10) ** (-mp.dps + 6)
    panels = 1
    prev = integrate_gl(f, a, b, panels, n)
    while panels < max_panels:
        panels *= 2
        cur = integrate_gl(f, a, b, panels, n)
        scale = max(abs(cur), abs(prev), mpf(1) * 0 + abs(cur - prev))
        if scale == 0 or abs(cur - prev) <= rel_tol * max(abs(cur), mpf(1e-300)):
            return cur
        prev = cur
    return prev


def integrate_bracket(f, a, b, n_start=32, rel_tol=None, max_n=4096):
    """integral_a^b f(x) / sqrt((x-a)(b-x)) dx by the cosine substitution.

    x = (a+b)/2 + ((b-a)/2) cos(theta) turns the weight into d(theta); the
    midpoint rule in theta is then spectrally accurate for smooth f.
    """
    if rel_tol is None:
        rel_tol = mpf(10) ** (-mp.dps + 6)
    a, b = mpf(a), mpf(b)
    mid, half = (a + b) / 2, (b - a) / 2
    pi = mp.pi

    def value(nn):
        h = pi / nn
        acc = mpf(0)
        for i in range(nn):
            th = (i + mpf(1) / 2) * h
            acc += f(mid + half * mp.cos(th))
        return acc * h

    n = n_start
    prev = value(n)
    while n < max_n:
        n *= 2
        cur = value(n)
        if abs(cur - prev) <= rel_tol * max(abs(cur), mpf(1e-300)):
            return cur
        prev = cur
    return prev
