"""Golden-section maximization, scalar and bracket-batched."""

from __future__ import annotations

import math

import numpy as np

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(fn, lo: float, hi: float, iters: int = 80):
    """Maximize a scalar function on [lo, hi]; returns (argmax, max)."""
    a, b = float(lo), float(hi)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
    if fc >= fd:
        return c, fc
    return d, fd


def golden_max_vec(fn, lo: np.ndarray, hi: np.ndarray, iters: int = 60):
    """Batched golden-section max over independent brackets; fn maps arrays to arrays.

    Both probe ordinates are recomputed every sweep, trading one extra batched
    eval per iteration for branch-free control flow.
    """
    a = np.asarray(lo, dtype=float).copy()
    b = np.asarray(hi, dtype=float).copy()
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c = b - _INVPHI * (b - a)
        d = a + _INVPHI * (b - a)
        fc, fd = fn(c), fn(d)
    best = np.maximum(fc, fd)
    arg = np.where(fc >= fd, c, d)
    return arg, best
