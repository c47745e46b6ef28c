"""Private k-median: exponential mechanism over all median sets, and private local search."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from privcomb.instances import MetricInstance
from privcomb.mechanisms import exp_select
from privcomb.rng import RngStream

ENUMERATION_LIMIT = 10**6


def kmedian_cost(metric: MetricInstance, medians) -> float:
    medians = sorted(medians)
    if not medians:
        raise ValueError("median set must be nonempty")
    if not metric.demands:
        return 0.0
    d = metric.matrix[np.ix_(sorted(metric.demands), medians)]
    return float(d.min(axis=1).sum())


def _check_k(metric: MetricInstance, k: int) -> None:
    if not 1 <= k <= metric.n:
        raise ValueError(f"k must lie in [1, {metric.n}], got {k}")


def private_kmedian_expmech(metric: MetricInstance, k: int, epsilon: float, rng: RngStream) -> frozenset[int]:
    """epsilon-DP: one exponential-mechanism draw over all k-subsets, score -cost."""
    _check_k(metric, k)
    if math.comb(metric.n, k) > ENUMERATION_LIMIT:
        raise ValueError(f"C({metric.n}, {k}) exceeds the enumeration limit {ENUMERATION_LIMIT}")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    subsets = list(itertools.combinations(range(metric.n), k))
    costs = _subset_costs(metric, subsets)
    idx = exp_select(-costs, epsilon / (2 * metric.diameter), rng)
    return frozenset(subsets[idx])


def _subset_costs(metric: MetricInstance, subsets) -> np.ndarray:
    if not metric.demands:
        return np.zeros(len(subsets))
    d = metric.matrix[sorted(metric.demands)]
    idx = np.asarray(subsets, dtype=np.intp)
    return d[:, idx].min(axis=2).sum(axis=0)


def localsearch_rounds(n: int, k: int) -> int:
    return math.ceil(6 * k * math.log(n))


def swap_candidates(n: int, medians: frozenset[int]) -> list[tuple[int, int]]:
    """All swaps ``(x, y)`` with ``x`` in the median set and ``y`` outside it."""
    inside = sorted(medians)
    outside = [y for y in range(n) if y not in medians]
    return [(x, y) for x in inside for y in outside]


def swap_costs(metric: MetricInstance, medians: frozenset[int], swaps) -> np.ndarray:
    if not metric.demands:
        return np.zeros(len(swaps))
    d = metric.matrix[sorted(metric.demands)]
    out = np.empty(len(swaps))
    base = {x: d[:, sorted(medians - {x})].min(axis=1) if len(medians) > 1 else np.full(len(d), np.inf) for x in medians}
    for s, (x, y) in enumerate(swaps):
        out[s] = np.minimum(base[x], d[:, y]).sum()
    return out


@dataclass(frozen=True)
class LocalSearchRun:
    visited: tuple[frozenset[int], ...]
    swaps: tuple[tuple[int, int], ...]
    chosen_index: int
    epsilon_prime: float

    @property
    def result(self) -> frozenset[int]:
        return self.visited[self.chosen_index]


def localsearch_run(
    metric: MetricInstance,
    k: int,
    epsilon: float,
    rng: RngStream,
    rounds: int | None = None,
) -> LocalSearchRun:
    n = metric.n
    if k >= n:
        raise ValueError(f"local search needs k < n (got k={k}, n={n})")
    _check_k(metric, k)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    T = localsearch_rounds(n, k) if rounds is None else rounds
    if T < 1:
        raise ValueError("at least one round is required")
    eps_p = epsilon / (2 * metric.diameter * (T + 1))

    current = frozenset(range(k))
    visited = [current]
    swaps = []
    for i in range(T):
        cands = swap_candidates(n, current)
        j = exp_select(-swap_costs(metric, current, cands), eps_p, rng.child(i))
        x, y = cands[j]
        swaps.append((x, y))
        current = (current - {x}) | {y}
        visited.append(current)
    # the final draw ranges over F_1..F_T; the last swap's result is not a candidate
    pool = visited[:T]
    final = np.array([kmedian_cost(metric, F) for F in pool])
    chosen = exp_select(-final, eps_p, rng.child(T))
    return LocalSearchRun(tuple(visited), tuple(swaps), chosen, eps_p)


def private_kmedian_localsearch(
    metric: MetricInstance,
    k: int,
    epsilon: float,
    rng: RngStream,
    rounds: int | None = None,
) -> frozenset[int]:
    """epsilon-DP local search with ``ceil(6 k ln n)`` exponential-mechanism swaps."""
    return localsearch_run(metric, k, epsilon, rng, rounds).result


def arya_swap_gap(metric: MetricInstance, medians) -> float:
    """Largest single-swap improvement ``cost(F) - cost(F - x + y)``."""
    F = frozenset(medians)
    cands = swap_candidates(metric.n, F)
    if not cands:
        return 0.0
    return kmedian_cost(metric, F) - float(swap_costs(metric, F, cands).min())
