"""Optimal amplitude plans by concave water-filling.

For a fixed budget t the objective sum_i p_i g(q_i) with
g(q) = sin^2((2t+1) arcsin sqrt(q)) is separable and strictly concave on the
box 0 <= q_i <= cap(t), where cap(t) = sin^2(pi/(2(2t+1))) is the point at
which one item's success probability saturates at 1.  The optimum therefore
has water-filling structure: every coordinate strictly inside the box
equalizes its marginal gain p_i g'(q_i) at a common multiplier, coordinates
at 0 have marginal below it, coordinates at the cap above it.  Two nested
monotone bisections (outer on the multiplier, inner per coordinate) solve
this to tolerance; both directions are certified monotone, so the solve is
deterministic and needs no line search or step-size tuning.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import kernel_backend, waterfill
from .errors import InvalidInput, NumericalFailure
from .esp import AmplitudePlan, esp
from .prior import Prior

__all__ = [
    "OptimizerConfig",
    "cap",
    "optimize",
    "optimize_t1_closed_form",
    "kkt_residual",
    "plan_to_json",
    "save_plan",
    "load_plan",
    "kernel_backend",
]

# Coordinates within these distances of the box faces are classified as
# bound-active when checking the KKT conditions.
_FACE_TOL = 1e-11


@dataclass(frozen=True)
class OptimizerConfig:
    """Solver tolerances: ``tol`` on the multiplier bracket and on |sum(q)-1|,
    ``max_iter`` on the outer bisection."""

    tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not self.tol > 0.0:
            raise InvalidInput("tol must be positive")
        if self.max_iter < 1:
            raise InvalidInput("max_iter must be >= 1")


def cap(t: int) -> float:
    """Saturation amplitude sin^2(pi / (2(2t+1))) for a t-query search."""
    if t < 0:
        raise InvalidInput("t must be >= 0")
    return math.sin(math.pi / (2.0 * (2 * t + 1))) ** 2


def _marginals(w: np.ndarray, q: np.ndarray, t: int) -> np.ndarray:
    """p_i g'(q_i) with the closed-form limits g'(0+) = (2t+1)^2, g'(cap-) = 0.

    q = 1 is reachable only at t = 0 (cap(0) = 1), where g is the identity
    and the default k^2 = 1 is already the exact endpoint derivative.
    """
    k = 2 * t + 1
    qc = np.clip(q, 0.0, cap(t))
    out = np.full(qc.shape, float(k * k))
    inside = (qc > 0.0) & (qc < 1.0)
    qi = qc[inside]
    out[inside] = k * np.sin(2.0 * k * np.arcsin(np.sqrt(qi))) / (
        2.0 * np.sqrt(qi * (1.0 - qi))
    )
    return w * out


def optimize(p: Prior, t: int, cfg: OptimizerConfig | None = None) -> AmplitudePlan:
    """Amplitude plan maximizing the expected success probability.

    Zero-weight items are pinned to q = 0 up front (amplitude there is
    wasted and only degrades the KKT system).  If the caps of the remaining
    items fit inside the unit budget the multiplier is 0 and every supported
    item saturates; otherwise the budget binds and the water-fill runs.
    t = 0 degenerates to a single classical guess: all amplitude on the
    (first) most likely item.

    Raises NumericalFailure if the bisection does not reach ``cfg.tol``
    within ``cfg.max_iter`` outer iterations.
    """
    if cfg is None:
        cfg = OptimizerConfig()
    if t < 0:
        raise InvalidInput("t must be >= 0")
    w = p.weights
    n = p.n

    if t == 0:
        q = np.zeros(n)
        q[int(np.argmax(w))] = 1.0
        plan = AmplitudePlan(q=q, t=0, meta={})
        return _with_meta(p, plan)

    c = cap(t)
    support = w > 0.0
    n_support = int(support.sum())

    if n_support * c <= 1.0:
        # Budget slack: every supported item saturates, multiplier 0.
        q = np.where(support, c, 0.0)
        plan = AmplitudePlan(q=q, t=t, meta={})
        return _with_meta(p, plan)

    q_pos, lam, iterations, converged = waterfill(
        w[support], float(2 * t + 1), c, cfg.tol, cfg.max_iter
    )
    if not converged:
        gap = abs(float(np.sum(q_pos)) - 1.0)
        raise NumericalFailure(
            f"water-fill stopped after {iterations} iterations with "
            f"|sum(q)-1| = {gap:.3e} (tol {cfg.tol:g}); raise max_iter"
        )
    q = np.zeros(n)
    q[support] = q_pos
    plan = AmplitudePlan(q=q, t=t, meta={})
    return _with_meta(p, plan)


def optimize_t1_closed_form(p: Prior, cfg: OptimizerConfig | None = None) -> AmplitudePlan:
    """Single-query optimum through the explicit multiplier formula.

    At t = 1 the stationarity condition p_i (48 q_i^2 - 48 q_i + 9) = -lam
    inverts in closed form to q_i = 1/2 - sqrt(1/16 - lam/(48 p_i)), so only
    one bisection (over lam <= 0) is needed to hit sum(q) = 1.  With at most
    four supported items the caps fit the budget and the success probability
    reaches 1 outright.  Agrees with :func:`optimize` at t = 1 to solver
    tolerance; kept as an independent route for cross-checking.
    """
    if cfg is None:
        cfg = OptimizerConfig()
    w = p.weights
    n = p.n
    support = w > 0.0
    n_support = int(support.sum())

    if n_support <= 4:
        q = np.where(support, cap(1), 0.0)
        plan = AmplitudePlan(q=q, t=1, meta={})
        return _with_meta(p, plan)

    ws = w[support]

    def coords(lam: float) -> np.ndarray:
        radicand = 1.0 / 16.0 - lam / (48.0 * ws)
        qs = 0.5 - np.sqrt(np.maximum(radicand, 0.0))
        return np.clip(qs, 0.0, 0.25)

    # sum(q(lam)) grows monotonically from 0 at lam = -9 max(p) (every
    # coordinate clamped to 0) to 0.25 * support > 1 at lam = 0.
    lam_lo = -9.0 * float(ws.max())
    lam_hi = 0.0
    scale = -lam_lo
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):
        if lam_hi - lam_lo <= cfg.tol * scale:
            converged = True
            break
        lam = 0.5 * (lam_lo + lam_hi)
        total = float(coords(lam).sum())
        # Accept only from the feasible side so sum(q) <= 1 always holds.
        if 1.0 - cfg.tol <= total <= 1.0:
            lam_lo = lam
            converged = True
            break
        if total > 1.0:
            lam_hi = lam
        else:
            lam_lo = lam
    if not converged:
        raise NumericalFailure(
            f"multiplier bisection stopped after {iterations} iterations "
            f"without reaching tol {cfg.tol:g}; raise max_iter"
        )
    # The lam_lo endpoint has sum(q) <= 1, keeping the plan feasible.
    q = np.zeros(n)
    q[support] = coords(lam_lo)
    plan = AmplitudePlan(q=q, t=1, meta={})
    return _with_meta(p, plan)


def kkt_residual(p: Prior, plan: AmplitudePlan) -> float:
    """Worst-case violation of the water-filling optimality conditions.

    Recovers the multiplier as the median marginal over strictly interior
    coordinates (falling back to the largest marginal over q = 0 coordinates,
    then to 0 when the budget is slack), then reports the largest of:
    |marginal - lam| on interior coordinates, max(0, marginal - lam) on
    zero coordinates, max(0, lam - marginal) on capped coordinates.  Each
    branch is one-sided exactly where the KKT system is, so a coordinate
    sitting on a face never produces a spurious residual.
    """
    if p.n != plan.n:
        raise InvalidInput(f"dimension mismatch: prior {p.n} vs plan {plan.n}")
    c = cap(plan.t)
    q = plan.q
    marg = _marginals(p.weights, q, plan.t)

    at_zero = q <= _FACE_TOL
    at_cap = q >= c - _FACE_TOL
    interior = ~(at_zero | at_cap)

    if np.any(interior):
        lam = float(np.median(marg[interior]))
    elif np.any(at_zero):
        lam = max(0.0, float(marg[at_zero].max()))
    else:
        lam = 0.0

    residual = 0.0
    if np.any(interior):
        residual = float(np.abs(marg[interior] - lam).max())
    if np.any(at_zero):
        residual = max(residual, float((marg[at_zero] - lam).max()), 0.0)
    if np.any(at_cap):
        residual = max(residual, float((lam - marg[at_cap]).max()), 0.0)
    return residual


def _with_meta(p: Prior, plan: AmplitudePlan) -> AmplitudePlan:
    """Attach the ESP and KKT residual diagnostics to a solved plan."""
    meta = {"esp": esp(p, plan), "kkt_residual": kkt_residual(p, plan)}
    return AmplitudePlan(q=plan.q, t=plan.t, meta=meta)


def plan_to_json(p: Prior, plan: AmplitudePlan) -> str:
    """Serialize a plan with its ESP and KKT residual under the given prior."""
    payload = {
        "t": plan.t,
        "q": [float(x) for x in plan.q],
        "esp": esp(p, plan),
        "kkt_residual": kkt_residual(p, plan),
    }
    return json.dumps(payload)


def save_plan(p: Prior, plan: AmplitudePlan, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(plan_to_json(p, plan) + "\n")


def load_plan(path) -> AmplitudePlan:
    """Read back a plan written by :func:`save_plan` (diagnostics go to meta)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"{path}: not valid JSON ({exc})") from exc
    try:
        q = np.asarray(data["q"], dtype=np.float64)
        t = int(data["t"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"{path}: not a plan file ({exc})") from exc
    meta = {k: data[k] for k in ("esp", "kkt_residual") if k in data}
    return AmplitudePlan(q=q, t=t, meta=meta)
