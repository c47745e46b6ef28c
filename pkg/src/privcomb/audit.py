"""Exact privacy audits, brute-force optima, and tail-bound simulators.

The exact distributions here are computed from closed-form conditional
probabilities written independently of the samplers, so agreement between a
sampler's empirical frequencies and these tables checks both.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from collections.abc import Callable, Hashable, Iterable, Iterator
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.special import logsumexp

from privcomb.instances import Graph, MetricInstance, SetSystem, SubmodularInstance, WeightedGraph
from privcomb.rng import RngStream

TRANSCRIPT_BUDGET = 10**6
NORMALIZATION_TOL = 1e-12


class TranscriptBudgetExceeded(RuntimeError):
    pass


# --------------------------------------------------------------------------
# distributions and divergences
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteDistribution:
    probs: dict[Hashable, float]

    def __post_init__(self):
        for k, p in self.probs.items():
            if p < 0:
                raise ValueError(f"negative probability for outcome {k!r}")
        total = math.fsum(self.probs.values())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    @classmethod
    def from_log_weights(cls, items: Iterable[tuple[Hashable, float]]) -> FiniteDistribution:
        """Aggregate ``(outcome, log probability)`` transcript leaves by outcome."""
        acc: dict[Hashable, list[float]] = defaultdict(list)
        for key, lp in items:
            acc[key].append(math.exp(lp))
        return cls({k: math.fsum(v) for k, v in acc.items()})

    def __getitem__(self, outcome) -> float:
        return self.probs.get(outcome, 0.0)

    def __len__(self) -> int:
        return len(self.probs)

    @property
    def support(self) -> set:
        return {k for k, p in self.probs.items() if p > 0}

    def total(self) -> float:
        return math.fsum(self.probs.values())


def max_log_ratio(dA: FiniteDistribution, dB: FiniteDistribution) -> float:
    """``max_o ln(p_A(o) / p_B(o))`` over outcomes with ``p_A > 0``."""
    worst = -math.inf
    for o, pa in dA.probs.items():
        if pa <= 0:
            continue
        pb = dB[o]
        if pb <= 0:
            return math.inf
        worst = max(worst, math.log(pa) - math.log(pb))
    return worst


def hockey_stick_delta(dA: FiniteDistribution, dB: FiniteDistribution, epsilon: float) -> float:
    """``sum_o max(0, p_A(o) - e^eps p_B(o))``: the smallest delta for (eps, delta)-closeness."""
    f = math.exp(epsilon)
    return math.fsum(max(0.0, pa - f * dB[o]) for o, pa in dA.probs.items())


def total_variation(dA: FiniteDistribution, dB: FiniteDistribution) -> float:
    keys = set(dA.probs) | set(dB.probs)
    return 0.5 * math.fsum(abs(dA[k] - dB[k]) for k in keys)


# --------------------------------------------------------------------------
# transcript enumeration
# --------------------------------------------------------------------------


def _log_softmax(logits) -> np.ndarray:
    logits = np.asarray(logits, dtype=float)
    return logits - logsumexp(logits)


class _Leaves:
    """Collects transcript leaves and enforces the transcript budget."""

    def __init__(self, budget: int):
        self.budget = budget
        self.items: list[tuple[Hashable, float]] = []

    def add(self, key: Hashable, lp: float) -> None:
        if len(self.items) >= self.budget:
            raise TranscriptBudgetExceeded(f"more than {self.budget} transcripts")
        self.items.append((key, lp))


def _log_uniform_orders(k: int) -> float:
    return -math.lgamma(k + 1)


def _vc_unweighted(graph: Graph, epsilon: float, leaves: _Leaves) -> None:
    n = graph.n
    edges = [tuple(e) for e in graph.edges]

    def rec(prefix: tuple[int, ...], lp: float) -> None:
        i = len(prefix) + 1
        if i > n:
            leaves.add(prefix, lp)
            return
        gone = set(prefix)
        alive = [v for v in range(n) if v not in gone]
        w_i = 4.0 / epsilon * math.sqrt(n / (n - i + 1))
        deg = {v: 0 for v in alive}
        for u, v in edges:
            if u not in gone and v not in gone:
                deg[u] += 1
                deg[v] += 1
        weights = np.array([deg[v] + w_i for v in alive])
        logp = np.log(weights) - math.log(weights.sum())
        for v, l in zip(alive, logp):
            rec(prefix + (v,), lp + l)

    rec((), 0.0)


def _vc_hallucinated(graph: Graph, epsilon: float, alpha: float, leaves: _Leaves) -> None:
    n = graph.n
    phase = min(n, math.ceil(alpha * n))
    edges = [tuple(e) for e in graph.edges]

    def rec(prefix: tuple[int, ...], lp: float) -> None:
        gone = set(prefix)
        alive = [v for v in range(n) if v not in gone]
        if len(prefix) == phase:
            tail = _log_uniform_orders(len(alive))
            for rest in itertools.permutations(alive):
                leaves.add(prefix + rest, lp + tail)
            return
        deg = {v: 0 for v in alive}
        for u, v in edges:
            if u not in gone and v not in gone:
                deg[u] += 1
                deg[v] += 1
        weights = np.array([deg[v] + 1.0 / epsilon for v in alive])
        logp = np.log(weights) - math.log(weights.sum())
        for v, l in zip(alive, logp):
            rec(prefix + (v,), lp + l)

    rec((), 0.0)


def _vc_weighted(wgraph: WeightedGraph, epsilon: float, leaves: _Leaves) -> None:
    graph = wgraph.graph
    n = graph.n
    cls = [0 if w == 1 else math.ceil(math.log2(w)) for w in wgraph.weights]
    J = max(cls, default=0)
    members = [[v for v in range(n) if cls[v] == j] for j in range(J + 1)]
    N = max(len(m) for m in members)
    score = [2.0 ** -c for c in cls]
    h = math.ceil(1.0 / epsilon)
    edges = [tuple(e) for e in graph.edges]

    def dump_target(out: set[int]) -> int | None:
        for j in range(J + 1):
            if all(v in out for v in members[j]):
                continue
            if 2 * sum(1 for v in out if cls[v] >= j) >= N:
                return j
        return None

    def after_pick(prefix: tuple[int, ...], lp: float) -> Iterator[tuple[tuple[int, ...], float]]:
        # expand every chain of dumps, each dump in uniformly random order
        j = dump_target(set(prefix))
        if j is None:
            yield prefix, lp
            return
        rest = [v for v in members[j] if v not in set(prefix)]
        lo = _log_uniform_orders(len(rest))
        for order in itertools.permutations(rest):
            yield from after_pick(prefix + order, lp + lo)

    def rec(prefix: tuple[int, ...], lp: float) -> None:
        if len(prefix) == n:
            leaves.add(prefix, lp)
            return
        gone = set(prefix)
        alive = [v for v in range(n) if v not in gone]
        deg = {v: 0 for v in alive}
        for u, v in edges:
            if u not in gone and v not in gone:
                deg[u] += 1
                deg[v] += 1
        # marginal of "edge by score, then endpoint by score": (d(v) + h) s(v)
        weights = np.array([(deg[v] + h) * score[v] for v in alive])
        logp = np.log(weights) - math.log(weights.sum())
        for v, l in zip(alive, logp):
            for nxt, lq in after_pick(prefix + (v,), lp + l):
                rec(nxt, lq)

    rec((), 0.0)


def _sc_unweighted(system: SetSystem, epsilon: float, delta: float, leaves: _Leaves) -> None:
    eps_p = epsilon / (2 * math.log(math.e / delta))
    sets = system.sets

    def rec(prefix: tuple[int, ...], need: frozenset[int], lp: float) -> None:
        left = [k for k in range(system.m) if k not in prefix]
        if not left:
            leaves.add(prefix, lp)
            return
        logp = _log_softmax([eps_p * len(sets[k] & need) for k in left])
        for k, l in zip(left, logp):
            rec(prefix + (k,), need - sets[k], lp + l)

    rec((), system.covered, 0.0)


def _sc_weighted(system: SetSystem, epsilon: float, delta: float, leaves: _Leaves, augmented: bool) -> None:
    eps_p = epsilon / (2 * math.log(math.e / delta))
    lo = min(system.costs)
    cost = [c / lo for c in system.costs]
    W = max(cost)
    T = math.ceil((3 * math.log(system.m) + math.log(math.log(max(3.0, system.n * W))) + 3) / eps_p)
    sets = system.sets

    def rec(events: tuple, emitted: tuple[int, ...], need: frozenset[int], r: float, lp: float) -> None:
        left = [k for k in range(system.m) if k not in emitted]
        if r < 1.0 / W:
            tail = _log_uniform_orders(len(left))
            for rest in itertools.permutations(left):
                key = (events, rest) if augmented else emitted + rest
                leaves.add(key, lp + tail)
            return
        logits = [eps_p * (len(sets[k] & need) - r * cost[k]) for k in left] + [-eps_p * T]
        logp = _log_softmax(logits)
        for k, l in zip(left, logp[:-1]):
            rec(events + (k,), emitted + (k,), need - sets[k], r, lp + l)
        rec(events + ("halve",), emitted, need, r / 2, lp + logp[-1])

    rec((), (), system.covered, float(system.n), 0.0)


def _cpp_greedy(instance: SubmodularInstance, k: int, eps_round: float, leaves: _Leaves) -> None:
    targets = instance.agents
    wts = instance.item_weights

    def welfare(chosen: tuple[int, ...]) -> float:
        covered = set().union(*(instance.covers[r] for r in chosen)) if chosen else set()
        total = 0.0
        for a in targets:
            if not a:
                continue
            if wts is None:
                total += len(a & covered) / len(a)
            else:
                total += sum(wts[x] for x in a & covered) / sum(wts[x] for x in a)
        return total

    def rec(prefix: tuple[int, ...], lp: float) -> None:
        if len(prefix) == k:
            leaves.add(prefix, lp)
            return
        base = welfare(prefix)
        left = [r for r in range(instance.m) if r not in prefix]
        logp = _log_softmax([eps_round * (welfare(prefix + (r,)) - base) for r in left])
        for r, l in zip(left, logp):
            rec(prefix + (r,), lp + l)

    rec((), 0.0)


def _cut_table(n: int, edges) -> list[tuple[frozenset[int], int]]:
    out = []
    others = list(range(1, n))
    for size in range(0, n - 1):
        for extra in itertools.combinations(others, size):
            side = frozenset((0, *extra))
            out.append((side, sum((u in side) != (v in side) for u, v in edges)))
    return out


def _mincut_exact(graph: Graph, epsilon: float, leaves: _Leaves, target_constant: float) -> None:
    n = graph.n
    complete = list(itertools.combinations(range(n), 2))
    target = target_constant * math.log(n) / epsilon
    padded = [set(graph.edges) | set(complete[:i]) for i in range(len(complete) + 1)]
    tables = [_cut_table(n, sorted(e)) for e in padded]
    opt = [min(c for _, c in t) for t in tables]
    stage1 = _log_softmax([-epsilon * abs(o - target) for o in opt])
    for i, t in enumerate(tables):
        stage2 = _log_softmax([-epsilon * c for _, c in t])
        for (side, _), l in zip(t, stage2):
            leaves.add(side, stage1[i] + l)


def _kmedian_localsearch(metric: MetricInstance, k: int, epsilon: float, rounds: int, leaves: _Leaves, output: str) -> None:
    n = metric.n
    d = metric.matrix
    dem = sorted(metric.demands)
    eps_p = epsilon / (2 * metric.diameter * (rounds + 1))

    def cost(F) -> float:
        return float(sum(min(d[x, f] for f in F) for x in dem))

    def rec(visited: tuple[frozenset[int], ...], swaps: tuple, lp: float) -> None:
        F = visited[-1]
        if len(swaps) == rounds:
            pool = visited[:rounds]
            logp = _log_softmax([-eps_p * cost(G) for G in pool])
            for j, l in enumerate(logp):
                key = (swaps, j) if output == "transcript" else tuple(sorted(pool[j]))
                leaves.add(key, lp + l)
            return
        cands = [(x, y) for x in sorted(F) for y in range(n) if y not in F]
        logp = _log_softmax([-eps_p * cost((F - {x}) | {y}) for x, y in cands])
        for (x, y), l in zip(cands, logp):
            rec(visited + ((F - {x}) | {y},), swaps + ((x, y),), lp + l)

    rec((frozenset(range(k)),), (), 0.0)


def exact_output_distribution(
    mechanism: str,
    instance,
    *,
    epsilon: float,
    delta: float = 0.0,
    alpha: float = 0.5,
    k: int = 1,
    rounds: int = 2,
    epsilon_round: float | None = None,
    augmented: bool = False,
    output: str = "result",
    target_constant: float = 8.0,
    budget: int = TRANSCRIPT_BUDGET,
) -> FiniteDistribution:
    """Exact output distribution of a sequential sampler on a tiny instance.

    ``mechanism`` is one of ``vc_unweighted``, ``vc_weighted``,
    ``vc_hallucinated``, ``setcover_unweighted``, ``setcover_weighted``,
    ``cpp_greedy``, ``mincut_exact``, ``kmedian_localsearch``.
    """
    leaves = _Leaves(budget)
    if mechanism == "vc_unweighted":
        _vc_unweighted(instance, epsilon, leaves)
    elif mechanism == "vc_hallucinated":
        _vc_hallucinated(instance, epsilon, alpha, leaves)
    elif mechanism == "vc_weighted":
        _vc_weighted(instance, epsilon, leaves)
    elif mechanism == "setcover_unweighted":
        _sc_unweighted(instance, epsilon, delta, leaves)
    elif mechanism == "setcover_weighted":
        _sc_weighted(instance, epsilon, delta, leaves, augmented)
    elif mechanism == "cpp_greedy":
        if epsilon_round is None:
            epsilon_round = epsilon / (math.e * math.log(math.e / delta))
        _cpp_greedy(instance, k, epsilon_round, leaves)
    elif mechanism == "mincut_exact":
        _mincut_exact(instance, epsilon, leaves, target_constant)
    elif mechanism == "kmedian_localsearch":
        _kmedian_localsearch(instance, k, epsilon, rounds, leaves, output)
    else:
        raise ValueError(f"unknown mechanism {mechanism!r}")
    return FiniteDistribution.from_log_weights(leaves.items)


# --------------------------------------------------------------------------
# adjacency
# --------------------------------------------------------------------------


def graph_neighbors(graph: Graph) -> Iterator[Graph]:
    """Every graph at edge distance one."""
    for u, v in itertools.combinations(range(graph.n), 2):
        yield graph.toggle(u, v)


def weighted_graph_neighbors(wgraph: WeightedGraph) -> Iterator[WeightedGraph]:
    for g in graph_neighbors(wgraph.graph):
        yield WeightedGraph(g, wgraph.weights)


def element_neighbors(system: SetSystem) -> Iterator[SetSystem]:
    """Toggle each coverable element in or out of the private set."""
    for x in sorted(system.coverable):
        yield system.with_covered(system.covered ^ {x})


def demand_neighbors(metric: MetricInstance) -> Iterator[MetricInstance]:
    for x in range(metric.n):
        yield metric.with_demands(metric.demands ^ {x})


def agent_neighbors(instance: SubmodularInstance) -> Iterator[SubmodularInstance]:
    """Remove each agent in turn."""
    for i in range(instance.num_agents):
        yield instance.without_agent(i)


ADJACENCY: dict[str, Callable] = {
    "edge": graph_neighbors,
    "weighted_edge": weighted_graph_neighbors,
    "element": element_neighbors,
    "demand": demand_neighbors,
    "agent": agent_neighbors,
}


# --------------------------------------------------------------------------
# pairwise audits
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PairAudit:
    instance_id: str
    neighbor_id: str
    epsilon_measured: float
    delta_measured: float


@dataclass
class AuditReport:
    mechanism: str
    epsilon_bound: float
    delta_bound: float
    rows: list[PairAudit] = field(default_factory=list)
    tolerance: float = 1e-9

    @property
    def max_epsilon(self) -> float:
        return max((r.epsilon_measured for r in self.rows), default=0.0)

    @property
    def max_delta(self) -> float:
        return max((r.delta_measured for r in self.rows), default=0.0)

    @property
    def passed(self) -> bool:
        if self.delta_bound == 0:
            return self.max_epsilon <= self.epsilon_bound + self.tolerance
        return self.max_delta <= self.delta_bound + self.tolerance

    def lines(self) -> list[str]:
        out = [
            f"# audit {self.mechanism}: eps_bound={self.epsilon_bound!r} delta_bound={self.delta_bound!r} "
            f"pairs={len(self.rows)} max_eps={self.max_epsilon!r} max_delta={self.max_delta!r} "
            f"{'PASS' if self.passed else 'FAIL'}",
            "instance,neighbor,eps_measured,delta_measured",
        ]
        out += [f"{r.instance_id},{r.neighbor_id},{r.epsilon_measured!r},{r.delta_measured!r}" for r in self.rows]
        return out


def audit_pairs(
    mechanism: str,
    instances: Iterable,
    adjacency: str,
    epsilon_bound: float,
    delta_bound: float = 0.0,
    *,
    instance_ids: Iterable[str] | None = None,
    **params: Any,
) -> AuditReport:
    """Compare exact distributions over every adjacent pair, in both directions.

    Distributions are cached by instance so each one is computed once.
    """
    from privcomb.instances import instance_hash

    cache: dict[Any, FiniteDistribution] = {}

    def dist(inst) -> FiniteDistribution:
        if inst not in cache:
            cache[inst] = exact_output_distribution(mechanism, inst, **params)
        return cache[inst]

    neighbors = ADJACENCY[adjacency]
    report = AuditReport(mechanism, epsilon_bound, delta_bound)
    instances = list(instances)
    ids = list(instance_ids) if instance_ids is not None else [instance_hash(x) for x in instances]
    for inst, iid in zip(instances, ids):
        dA = dist(inst)
        for nb in neighbors(inst):
            dB = dist(nb)
            eps = max(max_log_ratio(dA, dB), max_log_ratio(dB, dA))
            dlt = max(hockey_stick_delta(dA, dB, epsilon_bound), hockey_stick_delta(dB, dA, epsilon_bound))
            report.rows.append(PairAudit(iid, instance_hash(nb), eps, dlt))
    return report


def all_graphs(n: int) -> list[Graph]:
    pairs = list(itertools.combinations(range(n), 2))
    return [Graph(n, [p for p, bit in zip(pairs, bits) if bit]) for bits in itertools.product((0, 1), repeat=len(pairs))]


# --------------------------------------------------------------------------
# brute-force optima
# --------------------------------------------------------------------------


def _vc_branch_and_bound(n: int, edges, weights) -> tuple[float, frozenset[int]]:
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    best = [math.inf, frozenset()]

    def rec(live: dict[int, set[int]], chosen: frozenset[int], cost: float) -> None:
        if cost >= best[0]:
            return
        live = {v: nb for v, nb in live.items() if nb}
        if not live:
            best[0], best[1] = cost, chosen
            return
        v = max(live, key=lambda x: (len(live[x]), -x))
        nb = set(live[v])
        # branch 1: take v
        rest = {u: s - {v} for u, s in live.items() if u != v}
        rec(rest, chosen | {v}, cost + weights[v])
        # branch 2: skip v, so all its neighbors must be taken
        rest = {u: s - nb for u, s in live.items() if u not in nb and u != v}
        rec(rest, chosen | nb, cost + sum(weights[u] for u in nb))

    rec({v: set(adj[v]) for v in range(n)}, frozenset(), 0.0)
    return best[0], best[1]


def _setcover_branch_and_bound(system: SetSystem, weighted: bool) -> tuple[float, frozenset[int]]:
    cost = [system.cost_of(k) if weighted else 1.0 for k in range(system.m)]
    containing = {x: [k for k in range(system.m) if x in system.sets[k]] for x in system.covered}
    best = [math.inf, frozenset()]

    def rec(need: frozenset[int], chosen: frozenset[int], c: float) -> None:
        if c >= best[0]:
            return
        if not need:
            best[0], best[1] = c, chosen
            return
        x = min(need, key=lambda e: (len(containing[e]), e))
        for k in containing[x]:
            rec(need - system.sets[k], chosen | {k}, c + cost[k])

    rec(frozenset(system.covered), frozenset(), 0.0)
    return best[0], best[1]


def brute_opt(problem: str, instance, **params) -> tuple[float, Any]:
    """Exact optimum value and one optimal solution.

    ``problem`` is one of ``mincut``, ``vc``, ``wvc``, ``setcover``,
    ``wsetcover``, ``kmedian`` (needs ``k``), ``cpp`` (needs ``k``),
    ``facility`` (needs ``f``).
    """
    if problem == "mincut":
        g: Graph = instance
        if g.n > 20:
            raise ValueError("min-cut enumeration limited to n <= 20")
        if g.n < 2:
            raise ValueError("no cut exists on fewer than 2 vertices")
        masks = (np.arange(2 ** (g.n - 1) - 1, dtype=np.int64) << 1) | 1
        costs = np.zeros(len(masks), dtype=np.int64)
        for u, v in g.edges:
            costs += ((masks >> u) & 1) != ((masks >> v) & 1)
        j = int(np.argmin(costs))
        return float(costs[j]), frozenset(v for v in range(g.n) if masks[j] >> v & 1)
    if problem in ("vc", "wvc"):
        if problem == "vc":
            g, w = instance, [1.0] * instance.n
        else:
            g, w = instance.graph, list(instance.weights)
        if g.n > 24:
            raise ValueError("vertex cover branch and bound limited to n <= 24")
        return _vc_branch_and_bound(g.n, g.edges, w)
    if problem in ("setcover", "wsetcover"):
        if instance.m > 20:
            raise ValueError("set cover search limited to m <= 20")
        return _setcover_branch_and_bound(instance, problem == "wsetcover")
    if problem == "kmedian":
        k = params["k"]
        metric: MetricInstance = instance
        if math.comb(metric.n, k) > 10**6:
            raise ValueError("k-median enumeration limited to C(n, k) <= 10^6")
        dem = sorted(metric.demands)
        best = (math.inf, None)
        for F in itertools.combinations(range(metric.n), k):
            c = float(metric.matrix[np.ix_(dem, F)].min(axis=1).sum()) if dem else 0.0
            if c < best[0]:
                best = (c, frozenset(F))
        return best
    if problem == "cpp":
        k = params["k"]
        inst: SubmodularInstance = instance
        if math.comb(inst.m, k) > 10**6:
            raise ValueError("CPP enumeration limited to C(m, k) <= 10^6")
        A = inst.agent_matrix
        best = (-math.inf, None)
        for S in itertools.combinations(range(inst.m), k):
            covered = inst.cover_matrix[list(S)].any(axis=0) if S else np.zeros(inst.universe_size, bool)
            val = float((A @ covered).sum())
            if val > best[0] + 1e-12:
                best = (val, frozenset(S))
        return best
    if problem == "facility":
        f = params["f"]
        metric = instance
        if metric.n > 16:
            raise ValueError("facility location enumeration limited to n <= 16")
        dem = sorted(metric.demands)
        if not dem:
            return 0.0, frozenset()
        best = (math.inf, None)
        for size in range(1, metric.n + 1):
            for F in itertools.combinations(range(metric.n), size):
                c = float(metric.matrix[np.ix_(dem, F)].min(axis=1).sum()) + f * size
                if c < best[0]:
                    best = (c, frozenset(F))
        return best
    raise ValueError(f"unknown problem {problem!r}")


# --------------------------------------------------------------------------
# coin-process tail simulators
# --------------------------------------------------------------------------


def simulate_coin_tail(policy, n: int, q: float, trials: int, rng: RngStream) -> float:
    """Fraction of runs with ``Y > q``, where ``Y`` sums each round's head probability until the first head.

    Round ``i`` adds ``p_i`` to ``Y`` if no earlier coin came up heads, then
    tosses a coin with head probability ``p_i``.  ``policy`` is either a
    constant or ``policy(i, y)`` returning the head probabilities for round
    ``i`` (1-based) given the running totals ``y`` (an array over trials).
    """
    y = np.zeros(trials)
    alive = np.ones(trials, dtype=bool)
    for i in range(1, n + 1):
        p = np.broadcast_to(np.asarray(policy(i, y) if callable(policy) else policy, dtype=float), (trials,))
        if np.any((p < 0) | (p > 1)):
            raise ValueError("head probabilities must lie in [0, 1]")
        y = y + np.where(alive, p, 0.0)
        alive &= ~(rng.random(trials) < p)
        if not alive.any():
            break
    return float(np.mean(y > q))


@dataclass(frozen=True)
class FractionPolicy:
    """A distribution on [0, 1]: its mean and a vectorized sampler ``sample(rng, size)``."""

    mean: float
    sample: Callable[[RngStream, int], np.ndarray]

    @classmethod
    def constant(cls, c: float) -> FractionPolicy:
        return cls(c, lambda rng, size: np.full(size, float(c)))

    @classmethod
    def uniform(cls) -> FractionPolicy:
        return cls(0.5, lambda rng, size: rng.random(size))


def simulate_fraction_tail(policy, n: int, q: float, trials: int, rng: RngStream) -> float:
    """Fraction of runs with ``Y > q`` where ``Y = sum_i Z_i E[R_i]`` and ``Z_{i+1} = (1 - R_i) Z_i``.

    ``policy`` is a :class:`FractionPolicy` or ``policy(i)`` returning one.
    """
    y = np.zeros(trials)
    z = np.ones(trials)
    for i in range(1, n + 1):
        dist = policy(i) if callable(policy) and not isinstance(policy, FractionPolicy) else policy
        r = np.asarray(dist.sample(rng, trials), dtype=float)
        if np.any((r < 0) | (r > 1)):
            raise ValueError("fractions must lie in [0, 1]")
        y += z * dist.mean
        z = (1 - r) * z
    return float(np.mean(y > q))


def coin_tail_bound(q: float) -> float:
    return math.exp(-q)


def fraction_tail_bound(q: float) -> float:
    return math.e * math.exp(-q)
