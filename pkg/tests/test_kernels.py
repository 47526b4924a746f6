import importlib
import math

import numpy as np
import pytest

import qsearch._kernels as kernels
from qsearch._kernels._waterfill_py import waterfill as waterfill_py


def binding_case(seed, t):
    """Random weights on a register large enough that the budget binds."""
    k = 2 * t + 1
    cap = math.sin(math.pi / (2.0 * k)) ** 2
    n = int(1.0 / cap) + 3 + seed % 10
    rng = np.random.Generator(np.random.PCG64(seed))
    w = rng.random(n) + 1e-3
    w /= w.sum()
    return w, float(k), cap


def test_backend_reports_known_value():
    assert kernels.kernel_backend() in ("c", "python")


def test_python_backend_can_be_forced(monkeypatch):
    monkeypatch.setenv("QSEARCH_BACKEND", "python")
    reloaded = importlib.reload(kernels)
    try:
        assert reloaded.kernel_backend() == "python"
        assert reloaded.waterfill is waterfill_py
    finally:
        monkeypatch.delenv("QSEARCH_BACKEND")
        importlib.reload(kernels)


@pytest.mark.parametrize("seed, t", [(1, 1), (2, 2), (3, 3), (4, 4), (5, 1), (6, 2)])
def test_backends_agree(seed, t):
    compiled = pytest.importorskip("qsearch._kernels._waterfill")
    w, k, cap = binding_case(seed, t)
    q_c, lam_c, _, ok_c = compiled.waterfill(w, k, cap, 1e-12, 200)
    q_py, lam_py, _, ok_py = waterfill_py(w, k, cap, 1e-12, 200)
    assert ok_c and ok_py
    assert float(np.abs(np.asarray(q_c) - q_py).max()) <= 1e-10
    assert abs(lam_c - lam_py) <= 1e-9 * k * k * float(w.max())


@pytest.mark.parametrize("t", [1, 2, 3])
def test_solution_is_feasible_and_stationary(t):
    w, k, cap = binding_case(11 + t, t)
    q, lam, _, converged = waterfill_py(w, k, cap, 1e-12, 200)
    assert converged
    assert 1.0 - 1e-9 <= float(np.sum(q)) <= 1.0
    assert float(np.min(q)) >= 0.0
    assert float(np.max(q)) <= cap
    # interior coordinates all sit on the common multiplier
    interior = (q > 1e-9) & (q < cap - 1e-9)
    marg = w[interior] * k * np.sin(2.0 * k * np.arcsin(np.sqrt(q[interior]))) / (
        2.0 * np.sqrt(q[interior] * (1.0 - q[interior]))
    )
    assert float(np.abs(marg - lam).max()) <= 1e-6 * lam


def test_iteration_cap_reports_nonconvergence():
    w, k, cap = binding_case(99, 1)
    q, lam, iterations, converged = waterfill_py(w, k, cap, 1e-12, 1)
    assert not converged
    assert iterations == 1
    assert float(np.sum(q)) <= 1.0


def test_zero_tolerance_never_accepted():
    # a too-tight tolerance must surface as converged=False, not a bad plan
    w, k, cap = binding_case(7, 1)
    q, _, _, converged = waterfill_py(w, k, cap, 1e-300, 5)
    assert not converged
    assert float(np.sum(q)) <= 1.0
