"""Small trajectory diagnostics shared by the CLI and the test suite."""

from __future__ import annotations

import numpy as np


def first_local_minimum(times, values, skip: int = 1) -> float:
    """Time of the first interior local minimum, refined by a parabola.

    Returns ``nan`` when the series has no interior minimum.
    """
    t = np.asarray(times, dtype=float)
    p = np.asarray(values, dtype=float)
    for k in range(max(skip, 1), p.size - 1):
        if p[k] < p[k - 1] and p[k] <= p[k + 1]:
            y0, y1, y2 = p[k - 1], p[k], p[k + 1]
            denom = y0 - 2 * y1 + y2
            h = t[k + 1] - t[k]
            shift = 0.5 * (y0 - y2) / denom if denom > 0 else 0.0
            return float(t[k] + shift * h)
    return float("nan")


def phase_shift(t_exact: float, t_fca: float) -> float:
    """Positive when the flat-continuum curve reaches its minimum first."""
    return t_exact - t_fca


def early_anticorrelation(times, p1, p2, t_end: float = 50.0) -> float:
    """Correlation of the increments of p1 and p2 over ``t <= t_end``.

    Negative values mean population flows from one state to the other
    rather than both rising or falling together.
    """
    t = np.asarray(times)
    sel = t <= t_end
    d1 = np.diff(np.asarray(p1)[sel])
    d2 = np.diff(np.asarray(p2)[sel])
    if d1.size < 3 or np.std(d1) == 0 or np.std(d2) == 0:
        return float("nan")
    return float(np.corrcoef(d1, d2)[0, 1])
