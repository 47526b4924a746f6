"""Prior distributions over solution locations.

A ``Prior`` is an immutable, normalized probability vector: entry i is the
believed probability that the unique searched-for item sits at index i.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

#: Absolute tolerance on the normalization invariant.
NORM_TOL = 1e-12


@dataclass(frozen=True)
class Prior:
    """Normalized, non-negative weight vector.

    Construct through :func:`new_prior` (which normalizes raw weights) rather
    than directly; direct construction still validates the invariants but
    performs no normalization.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size < 1:
            raise InvalidInput("prior needs a non-empty 1-D weight vector")
        if not np.all(np.isfinite(w)):
            raise InvalidInput("prior weights must be finite")
        if np.any(w < 0.0):
            raise InvalidInput("prior weights must be non-negative")
        if abs(float(w.sum()) - 1.0) > NORM_TOL:
            raise InvalidInput(
                f"prior weights must sum to 1 within {NORM_TOL}, got {w.sum()!r}"
            )
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return int(self.weights.size)


def new_prior(raw_weights) -> Prior:
    """Normalize raw non-negative weights into a Prior (input order kept)."""
    try:
        w = np.asarray(raw_weights, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"weights are not numeric: {exc}") from exc
    if w.ndim != 1 or w.size == 0:
        raise InvalidInput("weights must be a non-empty 1-D vector")
    if not np.all(np.isfinite(w)):
        raise InvalidInput("weights must be finite")
    if np.any(w < 0.0):
        raise InvalidInput("weights must be non-negative")
    total = float(w.sum())
    if total <= 0.0:
        raise InvalidInput("weights must not all be zero")
    return Prior(weights=w / total)


def l1_distance(p: Prior, p_hat: Prior) -> float:
    """L1 distance sum_i |p_i - p̂_i| between two priors of equal size."""
    if p.n != p_hat.n:
        raise InvalidInput(f"dimension mismatch: {p.n} vs {p_hat.n}")
    return float(np.abs(p.weights - p_hat.weights).sum())


def sample_random_prior(n: int, seed: int) -> Prior:
    """Prior with n i.i.d. Uniform(0,1) weights, normalized.

    Deterministic and platform-independent for a given (n, seed): draws come
    from NumPy's PCG64 stream, whose output is fixed by the algorithm, not by
    the OS or hardware.
    """
    if n < 1:
        raise InvalidInput("n must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    return new_prior(rng.random(n))


def top_k_mass(p: Prior, k: int) -> float:
    """Total weight of the k most likely locations.

    This is the best possible classical success probability for k queries.
    The full-mass case k = n is exactly 1 by normalization; partial sums are
    clamped into [0, 1] so rounding noise never leaks past the unit interval.
    """
    if k < 0 or k > p.n:
        raise InvalidInput(f"k must be in [0, {p.n}], got {k}")
    if k == 0:
        return 0.0
    if k == p.n:
        return 1.0
    largest = np.sort(p.weights)[::-1][:k]
    return min(1.0, float(largest.sum()))


def load_prior(path) -> Prior:
    """Read a {"weights": [...]} JSON file and normalize it."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict) or "weights" not in data:
        raise InvalidInput(f"{path}: expected a JSON object with a 'weights' key")
    weights = data["weights"]
    if not isinstance(weights, list):
        raise InvalidInput(f"{path}: 'weights' must be a JSON array")
    return new_prior(weights)


def save_prior(p: Prior, path) -> None:
    """Write normalized weights as JSON with 17 significant digits."""
    body = ", ".join(format(float(w), ".17g") for w in p.weights)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write('{"weights": [' + body + "]}\n")
