"""Expected success probability (ESP) of amplitude-amplified search.

Running t oracle queries against an initial state whose squared amplitude on
item i is q_i finds the solution x with probability sin^2((2t+1) arcsin sqrt(q_x)).
Averaging over a prior p gives the objective everything here evaluates:

    ESP_t(p, q) = sum_i p_i sin^2((2t+1) arcsin sqrt(q_i))

Besides the objective itself this module holds the two non-optimal baselines
(best-M ranking search and the quadratic-speedup construction) that the
optimal plan is measured against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .errors import InvalidInput
from .prior import Prior, top_k_mass

#: Feasibility slack on sum(q); everything downstream treats plans as exact.
PLAN_SUM_TOL = 1e-12

#: Allowed EspReport method labels.
METHODS = ("classical", "grover-uniform", "ranking", "optimal", "custom")

#: Smaller-M wins on ranking ties; float noise within this counts as a tie.
_RANKING_TIE_TOL = 1e-12


@dataclass(frozen=True)
class AmplitudePlan:
    """Initial squared amplitudes q (sum <= 1) plus a query budget t.

    Leftover mass 1 - sum(q) sits on an off-items sink component; the
    simulator realizes it explicitly.  ``meta`` carries solver diagnostics
    (ESP, KKT residual) and never participates in equality.
    """

    q: np.ndarray
    t: int
    meta: Mapping[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        q = np.asarray(self.q, dtype=np.float64)
        if q.ndim != 1 or q.size < 1:
            raise InvalidInput("plan needs a non-empty 1-D amplitude vector")
        if not np.all(np.isfinite(q)):
            raise InvalidInput("plan amplitudes must be finite")
        if np.any(q < 0.0) or np.any(q > 1.0):
            raise InvalidInput("plan amplitudes must lie in [0, 1]")
        if float(q.sum()) > 1.0 + PLAN_SUM_TOL:
            raise InvalidInput(f"plan amplitudes sum to {q.sum()!r} > 1")
        if not isinstance(self.t, (int, np.integer)) or self.t < 0:
            raise InvalidInput("query budget t must be an integer >= 0")
        q = q.copy()
        q.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "t", int(self.t))

    @property
    def n(self) -> int:
        return int(self.q.size)


@dataclass(frozen=True)
class EspReport:
    """A labelled ESP value with enough metadata to reproduce it."""

    method: str
    value: float
    t: int
    n: int
    extras: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidInput(f"unknown method label {self.method!r}")
        if not 0.0 <= self.value <= 1.0:
            raise InvalidInput(f"ESP value {self.value!r} outside [0, 1]")

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "value": self.value,
            "t": self.t,
            "n": self.n,
            "extras": dict(self.extras),
        }


def success_prob_single(q_i: float, t: int) -> float:
    """Probability of measuring one item after t queries, sin^2((2t+1) asin sqrt(q_i))."""
    if not 0.0 <= q_i <= 1.0:
        raise InvalidInput(f"q_i must lie in [0, 1], got {q_i!r}")
    if t < 0:
        raise InvalidInput("t must be >= 0")
    return math.sin((2 * t + 1) * math.asin(math.sqrt(q_i))) ** 2


def _success_vec(q: np.ndarray, t: int) -> np.ndarray:
    return np.sin((2 * t + 1) * np.arcsin(np.sqrt(q))) ** 2


def esp(p: Prior, plan: AmplitudePlan) -> float:
    """Expected success probability of ``plan`` under prior ``p``."""
    if p.n != plan.n:
        raise InvalidInput(f"dimension mismatch: prior {p.n} vs plan {plan.n}")
    return float(p.weights @ _success_vec(plan.q, plan.t))


def uniform_plan(n: int, t: int) -> AmplitudePlan:
    """The no-prior plan q_i = 1/n (plain Grover over all n items)."""
    if n < 1:
        raise InvalidInput("n must be >= 1")
    return AmplitudePlan(q=np.full(n, 1.0 / n), t=t)


def ranking_baseline(p: Prior, t: int) -> EspReport:
    """Best uniform Grover search over the M most likely items.

    For each M in 1..n the success probability is
    (mass of top M) * sin^2((2t+1) arcsin(1/sqrt(M))), deliberately without
    clamping: overshooting the pi/2 angle genuinely hurts and is part of why
    this baseline loses.  Returns the best value and its M; ties (including
    ties up to float noise) go to the smallest M.
    """
    if t < 0:
        raise InvalidInput("t must be >= 0")
    mass = np.cumsum(np.sort(p.weights)[::-1])
    m_all = np.arange(1, p.n + 1, dtype=np.float64)
    angle = (2 * t + 1) * np.arcsin(1.0 / np.sqrt(m_all))
    values = mass * np.sin(angle) ** 2
    best = float(values.max())
    m_index = int(np.argmax(values >= best - _RANKING_TIE_TOL))
    value = min(1.0, float(values[m_index]))
    return EspReport(
        method="ranking",
        value=value,
        t=t,
        n=p.n,
        extras={"M": m_index + 1},
    )


def speedup_plan(p: Prior, t_classical: int) -> AmplitudePlan:
    """Plan matching the best t_classical-query classical success in about sqrt as many queries.

    Uses t = ceil(sqrt(t_classical)) queries and puts the saturating amplitude
    sin^2(pi / (2(2t+1))) on each of the t_classical most likely items, so each
    covered item is found with probability 1 and the ESP equals the classical
    top-t_classical mass.  Total amplitude spent is t_classical * cap <= pi^2/16.
    """
    if t_classical < 1 or t_classical > p.n:
        raise InvalidInput(f"t_classical must be in [1, {p.n}], got {t_classical}")
    t = math.isqrt(t_classical - 1) + 1
    saturating = math.sin(math.pi / (2 * (2 * t + 1))) ** 2
    # stable argsort on -w: ties resolve to the lowest index
    top = np.argsort(-p.weights, kind="stable")[:t_classical]
    q = np.zeros(p.n)
    q[top] = saturating
    plan = AmplitudePlan(q=q, t=t)
    return plan


def classical_report(p: Prior, t: int) -> EspReport:
    """Best classical strategy: probe the t most likely locations."""
    if t < 0:
        raise InvalidInput("t must be >= 0")
    return EspReport(
        method="classical",
        value=top_k_mass(p, min(t, p.n)),
        t=t,
        n=p.n,
        extras={},
    )
