"""NumPy fallback for the water-filling kernel.

Same contract as the compiled version in ``_waterfill.pyx``; kept in pure
NumPy so the package runs anywhere a wheel or compiler is unavailable.
"""

import numpy as np

# Inner bisection depth.  cap / 2**54 is below one ulp of any q in (0, 1/4],
# so each coordinate is resolved to full double precision.
_INNER_ITERS = 54


def _coords_for_lambda(p, lam, k, cap):
    """Per-item inner solve: q_i with p_i * g'(q_i) = lam, clipped to [0, cap].

    g'(q) = k * sin(2k * arcsin(sqrt(q))) / (2 * sqrt(q(1-q))) is strictly
    decreasing on (0, cap) from g'(0+) = k^2 down to g'(cap-) = 0, so a plain
    bisection per coordinate is monotone and exact to the iteration depth.
    """
    q = np.zeros_like(p)
    active = p * (k * k) > lam
    if not np.any(active):
        return q
    pa = p[active]
    lo = np.zeros(pa.size)
    hi = np.full(pa.size, cap)
    for _ in range(_INNER_ITERS):
        mid = 0.5 * (lo + hi)
        marg = pa * k * np.sin(2.0 * k * np.arcsin(np.sqrt(mid))) / (
            2.0 * np.sqrt(mid * (1.0 - mid))
        )
        take = marg > lam
        lo = np.where(take, mid, lo)
        hi = np.where(take, hi, mid)
    q[active] = 0.5 * (lo + hi)
    return q


def waterfill(p, k, cap, tol, max_iter):
    """Budget-binding water-fill over strictly positive weights.

    Arguments:
        p: 1-D float64 array of strictly positive weights (need not sum to 1).
        k: 2t + 1 for query budget t >= 1.
        cap: per-coordinate upper bound sin^2(pi / (2k)).
        tol: relative tolerance on the multiplier bracket; a midpoint with
            1 - tol <= sum(q) <= 1 is accepted early.
        max_iter: outer bisection iteration cap.

    Returns (q, lam, iterations, converged).  Caller guarantees
    len(p) * cap > 1, i.e. the budget constraint is active, so the multiplier
    lam lies in (0, k^2 * max(p)).  sum(q(lam)) is non-increasing in lam; the
    returned bracket endpoint is the one with sum(q) <= 1 so the result is
    always feasible.
    """
    p = np.ascontiguousarray(p, dtype=np.float64)
    lam_hi = float(p.max()) * k * k
    lam_lo = 0.0
    scale = lam_hi
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        if lam_hi - lam_lo <= tol * scale:
            converged = True
            break
        lam = 0.5 * (lam_lo + lam_hi)
        q = _coords_for_lambda(p, lam, k, cap)
        total = float(q.sum())
        # Accept only from the feasible side so sum(q) <= 1 always holds.
        if 1.0 - tol <= total <= 1.0:
            return q, lam, iterations, True
        if total > 1.0:
            lam_lo = lam
        else:
            lam_hi = lam
    q = _coords_for_lambda(p, lam_hi, k, cap)
    return q, lam_hi, iterations, converged
