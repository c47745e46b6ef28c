"""Private set cover as a set ordering.

The public output is a permutation of all sets; each private element is
covered by the first set in the ordering that contains it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from privcomb.instances import SetSystem
from privcomb.mechanisms import exp_select
from privcomb.rng import RngStream

HALVE = -1
EXPMECH_LIMIT = 8


def _check_permutation(m: int, perm) -> None:
    if sorted(perm) != list(range(m)):
        raise ValueError("ordering must be a permutation of the set indices")


def decode_set_cover(system: SetSystem, permutation) -> tuple[frozenset[int], float]:
    """Chosen sets (first containing set per covered element) and their total cost."""
    _check_permutation(system.m, permutation)
    chosen = set()
    for x in system.covered:
        for k in permutation:
            if x in system.sets[k]:
                chosen.add(k)
                break
        else:
            raise ValueError(f"element {x} is not covered by any set")
    return frozenset(chosen), float(sum(system.cost_of(k) for k in chosen))


def set_cover_epsilon_prime(epsilon: float, delta: float) -> float:
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not 0 < delta < 1 / math.e:
        raise ValueError("delta must lie in (0, 1/e)")
    return epsilon / (2 * math.log(math.e / delta))


def _members(system: SetSystem) -> np.ndarray:
    a = np.zeros((system.m, system.n), dtype=bool)
    for k, s in enumerate(system.sets):
        a[k, sorted(s)] = True
    return a


def private_set_cover_unweighted(system: SetSystem, epsilon: float, delta: float, rng: RngStream) -> tuple[int, ...]:
    """(eps, delta)-DP ordering; each round picks a set with weight exp(eps' |S ∩ R_i|)."""
    eps_p = set_cover_epsilon_prime(epsilon, delta)
    a = _members(system)
    need = np.zeros(system.n, dtype=bool)
    need[sorted(system.covered)] = True
    left = list(range(system.m))
    out = []
    # all m rounds run, so the ordering is total even after R is exhausted
    for i in range(system.m):
        gains = (a[left] & need).sum(axis=1).astype(float)
        j = exp_select(gains, eps_p, rng.child(i))
        k = left.pop(j)
        out.append(k)
        need &= ~a[k]
    return tuple(out)


def wsc_constant_T(m: int, n: int, W: float, epsilon_prime: float) -> int:
    if m < 1 or n < 1 or not W > 0 or not epsilon_prime > 0:
        raise ValueError("m, n, W and epsilon' must be positive")
    return math.ceil((3 * math.log(m) + math.log(math.log(max(3.0, n * W))) + 3) / epsilon_prime)


def halve_schedule(n: int, W: float) -> list[float]:
    """Threshold values r takes before the loop exits (r >= 1/W)."""
    r, out = float(n), []
    while r >= 1.0 / W:
        out.append(r)
        r /= 2
    return out


@dataclass(frozen=True)
class WeightedSetCoverRun:
    permutation: tuple[int, ...]
    # emitted set indices interleaved with HALVE markers, up to the final shuffle
    transcript: tuple[int, ...]
    r_trace: tuple[float, ...]
    scores: tuple[float, ...]
    remaining_trace: tuple[int, ...]
    T: int
    epsilon_prime: float


def weighted_set_cover_run(system: SetSystem, epsilon: float, delta: float, rng: RngStream) -> WeightedSetCoverRun:
    if system.costs is None:
        raise ValueError("weighted set cover needs per-set costs")
    eps_p = set_cover_epsilon_prime(epsilon, delta)
    costs, _ = system.normalized_costs()
    W = float(costs.max())
    T = wsc_constant_T(system.m, system.n, W, eps_p)
    a = _members(system)
    need = np.zeros(system.n, dtype=bool)
    need[sorted(system.covered)] = True
    left = list(range(system.m))
    r = float(system.n)
    out, transcript, r_trace, scores, remaining = [], [], [], [], []
    step = 0
    while r >= 1.0 / W:
        u = (a[left] & need).sum(axis=1) - r * costs[left] if left else np.zeros(0)
        j = exp_select(np.append(u, -T), eps_p, rng.child(step))
        r_trace.append(r)
        remaining.append(int(need.sum()))
        if j == len(left):
            transcript.append(HALVE)
            r /= 2
        else:
            k = left.pop(j)
            out.append(k)
            transcript.append(k)
            scores.append(float(u[j]))
            need &= ~a[k]
        step += 1
    out += rng.child(step).permutation(left)
    return WeightedSetCoverRun(tuple(out), tuple(transcript), tuple(r_trace), tuple(scores), tuple(remaining), T, eps_p)


def private_set_cover_weighted(system: SetSystem, epsilon: float, delta: float, rng: RngStream) -> tuple[int, ...]:
    """(eps, delta)-DP weighted ordering with the synthetic halve option."""
    return weighted_set_cover_run(system, epsilon, delta, rng).permutation


def private_set_cover_expmech(system: SetSystem, epsilon: float, rng: RngStream) -> tuple[int, ...]:
    """epsilon-DP: one exponential-mechanism draw over all m! orderings, score -(decoded size)."""
    if system.m > EXPMECH_LIMIT:
        raise ValueError(f"permutation enumeration limited to m <= {EXPMECH_LIMIT}")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    perms = list(itertools.permutations(range(system.m)))
    sizes = np.array([len(decode_set_cover(system, p)[0]) for p in perms], dtype=float)
    return perms[exp_select(-sizes, epsilon / 2, rng)]


# --------------------------------------------------------------------------
# removing the dependence on the cost ratio
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CostBucketInstance:
    """Elements whose cheapest set sits in bucket ``j``, with the sets that can reach them.

    ``set_index[k]`` maps the sub-instance's set ``k`` back to the original.
    """

    bucket: int
    system: SetSystem
    set_index: tuple[int, ...]


def cost_bucket(cost: float, n: int) -> int:
    """``j`` with ``cost`` in ``[n^j, n^(j+1))``, costs taken relative to the minimum."""
    if n < 2:
        return 0
    j = math.floor(math.log(cost) / math.log(n))
    # guard float error at exact powers of n
    while n ** (j + 1) <= cost:
        j += 1
    while n**j > cost:
        j -= 1
    return j


def remove_weight_dependence(system: SetSystem) -> tuple[list[CostBucketInstance], list[CostBucketInstance]]:
    """Split a weighted instance into even- and odd-bucket families of disjoint sub-instances.

    Each set in bucket ``j`` keeps only elements whose cheapest containing set
    is in bucket ``j`` or ``j - 1``.  The sub-instance for bucket ``j`` has as
    universe those elements whose cheapest set is in bucket ``j``; its sets are
    the trimmed sets of buckets ``j`` and ``j + 1`` restricted to it, so its
    cost ratio is below ``n^2``.  The split depends only on the public set
    system; the private elements are routed to the bucket that owns them.
    """
    if system.costs is None:
        raise ValueError("weight removal needs per-set costs")
    costs, _ = system.normalized_costs()
    n = system.n
    bucket = [cost_bucket(float(c), n) for c in costs]
    owner: dict[int, int] = {}
    for x in system.coverable:
        cheapest = min((k for k in range(system.m) if x in system.sets[k]), key=lambda k: (costs[k], k))
        owner[x] = bucket[cheapest]
    trimmed = [frozenset(x for x in s if owner[x] in (bucket[k], bucket[k] - 1)) for k, s in enumerate(system.sets)]

    even, odd = [], []
    for j in sorted(set(owner.values())):
        universe = frozenset(x for x, b in owner.items() if b == j)
        idx, sets, cs = [], [], []
        for k in range(system.m):
            if bucket[k] in (j, j + 1):
                part = trimmed[k] & universe
                if part:
                    idx.append(k)
                    sets.append(part)
                    cs.append(float(system.costs[k]))
        sub = SetSystem(n, tuple(sets), system.covered & universe, tuple(cs))
        (even if j % 2 == 0 else odd).append(CostBucketInstance(j, sub, tuple(idx)))
    return even, odd


def private_set_cover_bucketed(system: SetSystem, epsilon: float, delta: float, rng: RngStream) -> tuple[frozenset[int], float]:
    """Weighted set cover run separately on every cost bucket; returns the combined cover.

    Bucket universes are disjoint, so each private element influences exactly
    one sub-run and the combination keeps the (eps, delta) guarantee.
    """
    even, odd = remove_weight_dependence(system)
    chosen: set[int] = set()
    for t, part in enumerate(even + odd):
        perm = private_set_cover_weighted(part.system, epsilon, delta, rng.child(t))
        picked, _ = decode_set_cover(part.system, perm)
        chosen.update(part.set_index[k] for k in picked)
    return frozenset(chosen), float(sum(system.cost_of(k) for k in chosen))
