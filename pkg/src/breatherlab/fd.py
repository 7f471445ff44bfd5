"""Finite-difference derivatives of analytic evaluators.

Everything here works on callables ``f(x, t)`` rather than on sampled arrays:
the callable is re-sampled at shifted points, so the stencil never touches a
boundary. Central differences at steps ``h``, ``h/2``, ... are combined by
Richardson extrapolation; two levels cancel the ``h**2`` term and leave an
``O(h**4)`` error. These routines are the independent oracle for every
residual check and share nothing with the closed forms they test.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

Evaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]

# Default stencil step = grid spacing / REFINEMENT for the Lax-pair residuals.
REFINEMENT = 192


def _central(f: Evaluator, x, t, h: float, axis: str, order: int):
    if axis == "x":
        fp, fm = f(x + h, t), f(x - h, t)
    elif axis == "t":
        fp, fm = f(x, t + h), f(x, t - h)
    else:
        raise ValueError(f"axis must be 'x' or 't', got {axis!r}")
    if order == 1:
        return (fp - fm) / (2.0 * h)
    if order == 2:
        return (fp - 2.0 * f(x, t) + fm) / (h * h)
    raise ValueError("only first and second derivatives are supported")


def derivative(f: Evaluator, x, t, h: float, axis: str = "x", order: int = 1,
               levels: int = 2):
    """Richardson-extrapolated central difference of ``f`` along ``axis``.

    ``levels`` central differences at h, h/2, ... are combined into an
    ``O(h**(2*levels))`` estimate; the default two levels give fourth order.
    """
    table = [_central(f, x, t, h / 2 ** j, axis, order) for j in range(levels)]
    for m in range(1, levels):
        w = 4.0 ** m
        table = [(w * table[j + 1] - table[j]) / (w - 1.0) for j in range(len(table) - 1)]
    return table[0]


def parameter_derivative(g: Callable[[float], np.ndarray], p: float, h: float,
                         levels: int = 2) -> np.ndarray:
    """d g / d p by central differences at h, h/2, ... with Richardson extrapolation."""
    table = [(g(p + h / 2 ** j) - g(p - h / 2 ** j)) / (2.0 * h / 2 ** j) for j in range(levels)]
    for m in range(1, levels):
        w = 4.0 ** m
        table = [(w * table[j + 1] - table[j]) / (w - 1.0) for j in range(len(table) - 1)]
    return table[0]


def observed_order(errors, steps) -> float:
    """Least-squares slope of ``log(error)`` against ``log(step)``."""
    e = np.log(np.asarray(errors, dtype=float))
    s = np.log(np.asarray(steps, dtype=float))
    return float(np.polyfit(s, e, 1)[0])
