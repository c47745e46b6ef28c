"""Boosting the success probability of a private mechanism.

``repeat_best`` is the naive best-of-T repetition (privacy degrades to
``eps * T``).  ``private_amplify`` draws ``T + 1`` outcomes, clamps their
scores at ``Q``, adds ``T'`` dummy outcomes scored exactly ``Q``, and
selects with the exponential mechanism; it costs ``eps + 8 eps'``.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np

from privcomb.rng import RngStream


@dataclass(frozen=True)
class AmplifiableMechanism:
    """A private sampler plus a sensitivity-1 quality score.

    ``success_probability`` is the caller's lower bound ``p`` on
    ``Pr[score >= Q]`` for the threshold ``Q`` passed to :func:`private_amplify`.
    """

    sampler: Callable[[Any, RngStream], Any]
    scorer: Callable[[Any, Any], float]
    success_probability: float
    sensitivity: float = 1.0

    def __post_init__(self):
        if not 0 < self.success_probability < 1:
            raise ValueError("success probability must lie in (0, 1)")
        if self.sensitivity > 1:
            raise ValueError("only score functions with sensitivity at most 1 can be amplified")


@dataclass(frozen=True)
class AmplifiedOutcome:
    outcome: Any
    score: float | None  # None when a dummy was selected
    is_dummy: bool


def repeat_best(mech: AmplifiableMechanism, data, T: int, rng: RngStream):
    """Run the mechanism ``T`` times and keep the highest-scoring outcome (first on ties)."""
    if T < 1:
        raise ValueError("T must be at least 1")
    best, best_score = None, -math.inf
    for t in range(T):
        out = mech.sampler(data, rng)
        s = mech.scorer(data, out)
        if s > best_score:
            best, best_score = out, s
    return best


def amplification_parameters(epsilon_prime: float, delta: float, p: float) -> tuple[int, int]:
    """``T = ceil((8/(eps' delta p))^2 ln(1/(eps' delta p)))`` and ``T' = ceil(sqrt(4 T ln T)/eps')``."""
    if not 0 < epsilon_prime <= 0.5:
        raise ValueError("epsilon' must lie in (0, 1/2]")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    x = epsilon_prime * delta * p
    T = math.ceil((8.0 / x) ** 2 * math.log(1.0 / x))
    T_prime = math.ceil(math.sqrt(4 * T * math.log(T)) / epsilon_prime)
    return T, T_prime


def utility_threshold(Q: float, epsilon_prime: float, delta: float, p: float) -> float:
    """Score level the amplified mechanism clears with probability at least ``1 - delta``."""
    return Q - (4.0 / epsilon_prime) * math.log(1.0 / (epsilon_prime * delta * p))


def candidate_pool(scores, Q: float, num_dummies: int) -> np.ndarray:
    """Selection scores: real candidates clamped at ``Q``, then ``num_dummies`` copies of ``Q``."""
    return np.concatenate([np.minimum(np.asarray(scores, dtype=float), Q), np.full(num_dummies, float(Q))])


def private_amplify(
    mech: AmplifiableMechanism,
    data,
    Q: float,
    epsilon_prime: float,
    delta: float,
    rng: RngStream,
) -> AmplifiedOutcome:
    if not math.isfinite(Q):
        raise ValueError("Q must be finite")
    T, T_prime = amplification_parameters(epsilon_prime, delta, mech.success_probability)
    draws = rng.child(0)
    outcomes = [mech.sampler(data, draws) for _ in range(T + 1)]
    scores = np.array([mech.scorer(data, o) for o in outcomes], dtype=float)
    # weights relative to Q: real exp(eps'(min(Q,q) - Q)) <= 1, each dummy exactly 1
    real = np.exp(epsilon_prime * (np.minimum(scores, Q) - Q))
    j = rng.child(1).choice_index(np.append(real, float(T_prime)))
    if j == T + 1:
        return AmplifiedOutcome(None, None, True)
    return AmplifiedOutcome(outcomes[j], float(scores[j]), False)
