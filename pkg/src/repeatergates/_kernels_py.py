"""Numpy fallback for the grid sweep in ``_kernels.pyx``."""
from __future__ import annotations

import numpy as np


def _objective(coeffs: np.ndarray, expr_id: np.ndarray, n_expr: int, pts: np.ndarray) -> np.ndarray:
    vals = coeffs[:, :1].T + pts @ coeffs[:, 1:].T  # (points, pieces)
    per_expr = np.full((pts.shape[0], n_expr), -np.inf)
    for e in range(n_expr):
        per_expr[:, e] = vals[:, expr_id == e].max(axis=1)
    return per_expr.min(axis=1)


def grid_minimize(coeffs, expr_id, n_expr: int, q: int, nvars: int):
    """Same contract as the compiled sweep: lexicographically first minimiser."""
    coeffs = np.ascontiguousarray(coeffs, dtype=float)
    expr_id = np.ascontiguousarray(expr_id, dtype=np.int64)
    if nvars < 1:
        raise ValueError("need at least one variable")
    best, best_idx = np.inf, None
    ticks = np.arange(1, q)
    if nvars == 1:
        vals = _objective(coeffs, expr_id, n_expr, (ticks / q)[:, None])
        k = int(np.argmin(vals))
        return float(vals[k]), (int(ticks[k]),)
    # sweep the first coordinate in a python loop and vectorise the rest
    for i in range(1, q):
        rest = _increasing_tuples(i + 1, q, nvars - 1)
        if rest.shape[0] == 0:
            continue
        pts = np.hstack([np.full((rest.shape[0], 1), i), rest]) / q
        vals = _objective(coeffs, expr_id, n_expr, pts)
        k = int(np.argmin(vals))
        if vals[k] < best:
            best = float(vals[k])
            best_idx = (i,) + tuple(int(v) for v in rest[k])
    return best, best_idx


def _increasing_tuples(lo: int, q: int, m: int) -> np.ndarray:
    """All strictly increasing m-tuples from range(lo, q), in lexicographic order."""
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if m == 1:
        return np.arange(lo, q)[:, None]
    blocks = []
    for a in range(lo, q):
        tail = _increasing_tuples(a + 1, q, m - 1)
        if tail.shape[0]:
            blocks.append(np.hstack([np.full((tail.shape[0], 1), a), tail]))
    return np.vstack(blocks) if blocks else np.zeros((0, m), dtype=np.int64)
