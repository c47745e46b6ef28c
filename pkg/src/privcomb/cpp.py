"""Private welfare maximization over coverage valuations (public projects).

``total_welfare`` sums each agent's covered fraction of its targets.  The
private greedy emits resources in order, each chosen with weight
``exp(eps' * marginal welfare)``; the ordered sequence is the published object.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from privcomb.instances import SubmodularInstance
from privcomb.mechanisms import exp_select
from privcomb.rng import RngStream

ENUMERATION_LIMIT = 10**6


def total_welfare(instance: SubmodularInstance, resources) -> float:
    return float(instance.agent_values(resources).sum())


def agent_value(instance: SubmodularInstance, agent: int, resources) -> float:
    return float(instance.agent_values(resources)[agent])


def _check_k(instance: SubmodularInstance, k: int) -> None:
    if not 0 <= k <= instance.m:
        raise ValueError(f"k must lie in [0, {instance.m}], got {k}")


class _Coverage:
    """Incremental welfare bookkeeping: per-item value mass and a covered mask."""

    def __init__(self, instance: SubmodularInstance):
        self.item_mass = instance.agent_matrix.sum(axis=0)
        self.cover = instance.cover_matrix
        self.covered = np.zeros(instance.universe_size, dtype=bool)

    def gains(self, resources) -> np.ndarray:
        fresh = self.cover[resources] & ~self.covered
        return fresh.astype(float) @ self.item_mass

    def add(self, r: int) -> None:
        self.covered |= self.cover[r]


def greedy_cpp(instance: SubmodularInstance, k: int) -> tuple[int, ...]:
    """Non-private greedy; ties go to the lowest resource index."""
    _check_k(instance, k)
    cov = _Coverage(instance)
    left = list(range(instance.m))
    out = []
    for _ in range(k):
        g = cov.gains(left)
        j = int(np.argmax(g))
        r = left.pop(j)
        out.append(r)
        cov.add(r)
    return tuple(out)


def cpp_epsilon_prime(epsilon: float, delta: float) -> float:
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not 0 < delta <= 0.5:
        raise ValueError("delta must lie in (0, 1/2]")
    return epsilon / (math.e * math.log(math.e / delta))


def cpp_privacy_epsilon(epsilon_prime: float, delta: float) -> float:
    """The epsilon in the (epsilon, delta) guarantee of the greedy at per-round eps'."""
    return epsilon_prime * (math.e - 1) * math.log(math.e / delta)


def per_round_epsilon_for_pure_dp(epsilon: float, k: int) -> float:
    if k < 1:
        raise ValueError("k must be at least 1")
    return epsilon / k


def cpp_greedy_rounds(instance: SubmodularInstance, k: int, epsilon_round: float, rng: RngStream) -> tuple[int, ...]:
    """``k`` exponential-mechanism rounds at per-round parameter ``epsilon_round``."""
    _check_k(instance, k)
    cov = _Coverage(instance)
    left = list(range(instance.m))
    out = []
    for i in range(k):
        j = exp_select(cov.gains(left), epsilon_round, rng.child(i))
        r = left.pop(j)
        out.append(r)
        cov.add(r)
    return tuple(out)


def private_cpp_greedy(instance: SubmodularInstance, k: int, epsilon: float, delta: float, rng: RngStream) -> tuple[int, ...]:
    """Ordered selection of ``k`` resources, agent-level (eps' (e-1) ln(e/delta), delta)-DP."""
    return cpp_greedy_rounds(instance, k, cpp_epsilon_prime(epsilon, delta), rng)


def private_cpp_expmech(instance: SubmodularInstance, k: int, epsilon: float, rng: RngStream) -> frozenset[int]:
    """epsilon-DP: exponential mechanism over all k-subsets, score = welfare (sensitivity 1)."""
    _check_k(instance, k)
    if math.comb(instance.m, k) > ENUMERATION_LIMIT:
        raise ValueError(f"C({instance.m}, {k}) exceeds the enumeration limit")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    subsets = list(itertools.combinations(range(instance.m), k))
    scores = np.array([total_welfare(instance, s) for s in subsets])
    return frozenset(subsets[exp_select(scores, epsilon / 2, rng)])
