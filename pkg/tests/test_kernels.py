import importlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from repeatergates import _kernels_py, bounds, kernels

try:
    from repeatergates import _kernels as compiled
except ImportError:
    compiled = None

needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernel not built")


def _problem(family):
    _, exprs = bounds.objective(family)
    coeffs, ids = bounds._piece_matrix(exprs)
    return coeffs, ids, len(exprs)


@needs_compiled
@pytest.mark.parametrize("family,q", [("P3.2", 200), ("P2.2", 300), ("P5.2", 150), ("P1.3", 40)])
def test_backends_agree_on_placement_objectives(family, q):
    coeffs, ids, n_expr = _problem(family)
    nvars = coeffs.shape[1] - 1
    a = _kernels_py.grid_minimize(coeffs, ids, n_expr, q, nvars)
    b = compiled.grid_minimize(coeffs, ids, n_expr, q, nvars)
    assert a[1] == b[1]
    assert a[0] == pytest.approx(b[0], abs=1e-12)


@needs_compiled
@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_backends_agree_on_random_pieces(nvars, pieces, seed):
    rng = np.random.default_rng(seed)
    # integer coefficients keep ties exact in both backends
    coeffs = np.ascontiguousarray(rng.integers(-5, 6, size=(2 * pieces, nvars + 1)).astype(float))
    ids = np.ascontiguousarray(np.repeat([0, 1], pieces).astype(np.int64))
    q = 16  # k/16 and small integers are exact in binary floating point
    a = _kernels_py.grid_minimize(coeffs, ids, 2, q, nvars)
    b = compiled.grid_minimize(coeffs, ids, 2, q, nvars)
    assert a[1] == b[1]
    assert a[0] == pytest.approx(b[0])


def test_pure_switch(monkeypatch):
    monkeypatch.setenv("REPEATERGATES_PURE", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "numpy"
        assert mod.grid_minimize is _kernels_py.grid_minimize
    finally:
        monkeypatch.delenv("REPEATERGATES_PURE")
        importlib.reload(kernels)


def test_grid_optimizer_under_fallback(monkeypatch):
    monkeypatch.setattr(bounds.kernels, "grid_minimize", _kernels_py.grid_minimize)
    p = bounds.optimize_grid("P3.2", q=100)
    assert float(p.time) == pytest.approx(1.4, abs=1e-3)
