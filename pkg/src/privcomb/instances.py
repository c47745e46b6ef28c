"""Problem instances, generators and the line-oriented instance text format.

All instance types are immutable and validate their invariants on
construction; a violation raises :class:`InstanceError` naming the offending
field (``dist[0][2]``, ``sets[3]``, ...).
"""

from __future__ import annotations

import hashlib
import itertools
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import networkx as nx
import numpy as np

from privcomb.rng import RngStream

METRIC_SLACK = 1e-9
FORMAT_HEADER = "privcomb-instance v1"


class InstanceError(ValueError):
    """An instance violates one of its type invariants."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class InstanceFormatError(ValueError):
    """An instance document could not be parsed."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(field)
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field


# --------------------------------------------------------------------------
# data model
# --------------------------------------------------------------------------


def _canon_edges(n: int, edges: Iterable[Sequence[int]]) -> tuple[tuple[int, int], ...]:
    seen = set()
    for k, e in enumerate(edges):
        u, v = (int(x) for x in e)
        if u == v:
            raise InstanceError(f"edges[{k}]", f"self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise InstanceError(f"edges[{k}]", f"endpoint outside [0, {n})")
        pair = (min(u, v), max(u, v))
        if pair in seen:
            raise InstanceError(f"edges[{k}]", f"duplicate edge {pair}")
        seen.add(pair)
    return tuple(sorted(seen))


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``; the private unit is an edge."""

    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise InstanceError("n", "vertex count must be nonnegative")
        object.__setattr__(self, "edges", _canon_edges(self.n, self.edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edge_set

    def toggle(self, u: int, v: int) -> Graph:
        e = (min(u, v), max(u, v))
        if e in self.edge_set:
            return Graph(self.n, [x for x in self.edges if x != e])
        return Graph(self.n, [*self.edges, e])

    def union(self, extra: Iterable[tuple[int, int]]) -> Graph:
        """Simple-graph union: edges already present are absorbed."""
        merged = set(self.edges)
        merged.update((min(u, v), max(u, v)) for u, v in extra)
        return Graph(self.n, merged)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


@dataclass(frozen=True)
class WeightedGraph:
    """Graph with per-vertex weights, all at least 1."""

    graph: Graph
    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if len(w) != self.graph.n:
            raise InstanceError("weights", f"expected {self.graph.n} weights, got {len(w)}")
        for i, x in enumerate(w):
            if not math.isfinite(x) or x < 1:
                raise InstanceError(f"weights[{i}]", f"weight {x} is below 1 (normalize so the minimum is 1)")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.graph.n

    @classmethod
    def normalized(cls, graph: Graph, weights: Sequence[float]) -> WeightedGraph:
        lo = min(weights) if len(weights) else 1.0
        if lo <= 0:
            raise InstanceError("weights", "weights must be positive")
        return cls(graph, tuple(w / lo for w in weights))


@dataclass(frozen=True)
class MetricInstance:
    """Finite metric with a private demand subset."""

    dist: tuple[tuple[float, ...], ...]
    demands: frozenset[int] = frozenset()

    def __post_init__(self):
        rows = tuple(tuple(float(x) for x in row) for row in self.dist)
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise InstanceError(f"dist[{i}]", f"row has {len(row)} entries, expected {n}")
        d = np.array(rows, dtype=float).reshape(n, n)
        if not np.all(np.isfinite(d)):
            i, j = np.argwhere(~np.isfinite(d))[0]
            raise InstanceError(f"dist[{i}][{j}]", "distance is not finite")
        for i in range(n):
            if d[i, i] != 0:
                raise InstanceError(f"dist[{i}][{i}]", "diagonal must be zero")
        asym = np.argwhere(d != d.T)
        if len(asym):
            i, j = asym[0]
            raise InstanceError(f"dist[{i}][{j}]", "matrix is not symmetric")
        off = np.where(np.eye(n, dtype=bool), np.inf, d)
        if n > 1 and off.min() < 1 - METRIC_SLACK:
            i, j = np.unravel_index(np.argmin(off), off.shape)
            raise InstanceError(f"dist[{i}][{j}]", f"off-diagonal distance {d[i, j]} is below 1")
        if n > 2:
            # d[i,j] <= d[i,k] + d[k,j] for all k
            via = (d[:, :, None] + d[None, :, :]).min(axis=1)
            bad = np.argwhere(d > via + METRIC_SLACK)
            if len(bad):
                i, j = bad[0]
                raise InstanceError(f"dist[{i}][{j}]", "triangle inequality violated")
        dem = frozenset(int(x) for x in self.demands)
        for x in sorted(dem):
            if not 0 <= x < n:
                raise InstanceError("demands", f"demand point {x} outside [0, {n})")
        object.__setattr__(self, "dist", rows)
        object.__setattr__(self, "demands", dem)

    @property
    def n(self) -> int:
        return len(self.dist)

    @cached_property
    def matrix(self) -> np.ndarray:
        d = np.array(self.dist, dtype=float).reshape(self.n, self.n)
        d.setflags(write=False)
        return d

    @property
    def diameter(self) -> float:
        return float(self.matrix.max()) if self.n else 0.0

    def with_demands(self, demands: Iterable[int]) -> MetricInstance:
        return MetricInstance(self.dist, frozenset(demands))

    @classmethod
    def from_matrix(cls, d, demands: Iterable[int] | None = None) -> MetricInstance:
        d = np.asarray(d, dtype=float)
        dem = range(len(d)) if demands is None else demands
        return cls(tuple(tuple(r) for r in d.tolist()), frozenset(dem))


@dataclass(frozen=True)
class SetSystem:
    """Public set system over ``0..n-1`` plus the private elements to cover.

    ``costs`` are kept in the units they were given in; algorithms that need
    the minimum cost to be 1 call :meth:`normalized_costs`.
    """

    n: int
    sets: tuple[frozenset[int], ...]
    covered: frozenset[int] = frozenset()
    costs: tuple[float, ...] | None = None

    def __post_init__(self):
        sets = tuple(frozenset(int(x) for x in s) for s in self.sets)
        for k, s in enumerate(sets):
            for x in s:
                if not 0 <= x < self.n:
                    raise InstanceError(f"sets[{k}]", f"element {x} outside [0, {self.n})")
        covered = frozenset(int(x) for x in self.covered)
        reachable = frozenset().union(*sets) if sets else frozenset()
        for x in sorted(covered):
            if not 0 <= x < self.n:
                raise InstanceError("covered", f"element {x} outside [0, {self.n})")
            if x not in reachable:
                raise InstanceError("covered", f"element {x} is not contained in any set (infeasible)")
        costs = self.costs
        if costs is not None:
            costs = tuple(float(c) for c in costs)
            if len(costs) != len(sets):
                raise InstanceError("costs", f"expected {len(sets)} costs, got {len(costs)}")
            for k, c in enumerate(costs):
                if not (math.isfinite(c) and c > 0):
                    raise InstanceError(f"costs[{k}]", f"cost {c} must be positive and finite")
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "covered", covered)
        object.__setattr__(self, "costs", costs)

    @property
    def m(self) -> int:
        return len(self.sets)

    @property
    def weighted(self) -> bool:
        return self.costs is not None

    def cost_of(self, k: int) -> float:
        return 1.0 if self.costs is None else self.costs[k]

    def normalized_costs(self) -> tuple[np.ndarray, float]:
        """Costs divided by their minimum, and the divisor used."""
        if self.costs is None:
            raise ValueError("set system has no costs")
        c = np.asarray(self.costs, dtype=float)
        scale = float(c.min())
        return c / scale, scale

    @cached_property
    def coverable(self) -> frozenset[int]:
        return frozenset().union(*self.sets) if self.sets else frozenset()

    def with_covered(self, covered: Iterable[int]) -> SetSystem:
        return SetSystem(self.n, self.sets, frozenset(covered), self.costs)


@dataclass(frozen=True)
class SubmodularInstance:
    """Coverage valuations for the public-projects problem.

    Resource ``r`` covers the items ``covers[r]`` of an item universe.  Agent
    ``i`` values a resource set ``S`` at the (weighted) fraction of its target
    items ``agents[i]`` covered by ``S``.  Targets must be coverable, so each
    nonempty agent reaches value 1 on the full resource set.
    """

    universe_size: int
    covers: tuple[frozenset[int], ...]
    agents: tuple[frozenset[int], ...]
    item_weights: tuple[float, ...] | None = None

    def __post_init__(self):
        covers = tuple(frozenset(int(x) for x in c) for c in self.covers)
        agents = tuple(frozenset(int(x) for x in a) for a in self.agents)
        u = self.universe_size
        for k, c in enumerate(covers):
            if any(not 0 <= x < u for x in c):
                raise InstanceError(f"covers[{k}]", f"item outside [0, {u})")
        reach = frozenset().union(*covers) if covers else frozenset()
        for k, a in enumerate(agents):
            if any(not 0 <= x < u for x in a):
                raise InstanceError(f"agents[{k}]", f"item outside [0, {u})")
            if not a <= reach:
                raise InstanceError(f"agents[{k}]", "target items not coverable by any resource")
        w = self.item_weights
        if w is not None:
            w = tuple(float(x) for x in w)
            if len(w) != u:
                raise InstanceError("item_weights", f"expected {u} weights, got {len(w)}")
            for k, x in enumerate(w):
                if not (math.isfinite(x) and x > 0):
                    raise InstanceError(f"item_weights[{k}]", "item weights must be positive")
        object.__setattr__(self, "covers", covers)
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "item_weights", w)

    @property
    def m(self) -> int:
        return len(self.covers)

    @property
    def num_agents(self) -> int:
        return len(self.agents)

    @cached_property
    def _weight_vec(self) -> np.ndarray:
        if self.item_weights is None:
            return np.ones(self.universe_size)
        return np.asarray(self.item_weights)

    @cached_property
    def agent_matrix(self) -> np.ndarray:
        """``(agents, items)`` matrix of each agent's normalized item values."""
        a = np.zeros((self.num_agents, self.universe_size))
        for i, target in enumerate(self.agents):
            if target:
                idx = sorted(target)
                a[i, idx] = self._weight_vec[idx]
                a[i] /= a[i].sum()
        return a

    @cached_property
    def cover_matrix(self) -> np.ndarray:
        c = np.zeros((self.m, self.universe_size), dtype=bool)
        for r, items in enumerate(self.covers):
            c[r, sorted(items)] = True
        return c

    def covered_items(self, resources: Iterable[int]) -> np.ndarray:
        mask = np.zeros(self.universe_size, dtype=bool)
        for r in resources:
            mask |= self.cover_matrix[r]
        return mask

    def agent_values(self, resources: Iterable[int]) -> np.ndarray:
        return self.agent_matrix @ self.covered_items(resources)

    def without_agent(self, i: int) -> SubmodularInstance:
        agents = self.agents[:i] + self.agents[i + 1 :]
        return SubmodularInstance(self.universe_size, self.covers, agents, self.item_weights)

    def with_agent(self, target: Iterable[int]) -> SubmodularInstance:
        return SubmodularInstance(self.universe_size, self.covers, (*self.agents, frozenset(target)), self.item_weights)


@dataclass(frozen=True)
class TerminalPairs:
    """Private source-sink pairs over a public metric."""

    metric: MetricInstance
    pairs: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        n = self.metric.n
        pairs = []
        for k, p in enumerate(self.pairs):
            u, v = (int(x) for x in p)
            if u == v:
                raise InstanceError(f"pairs[{k}]", "terminal pair endpoints must differ")
            if not (0 <= u < n and 0 <= v < n):
                raise InstanceError(f"pairs[{k}]", f"endpoint outside [0, {n})")
            pairs.append((u, v))
        object.__setattr__(self, "pairs", tuple(pairs))


Instance = Graph | WeightedGraph | MetricInstance | SetSystem | SubmodularInstance | TerminalPairs


# --------------------------------------------------------------------------
# generators
# --------------------------------------------------------------------------


def gen_random_graph(n: int, edge_probability: float, rng: RngStream) -> Graph:
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 <= edge_probability <= 1:
        raise ValueError("edge probability must lie in [0, 1]")
    pairs = list(itertools.combinations(range(n), 2))
    keep = rng.random(len(pairs)) < edge_probability
    return Graph(n, [p for p, k in zip(pairs, keep) if k])


def gen_star_graph(n: int) -> Graph:
    if n < 2:
        raise ValueError("a star needs at least 2 vertices")
    return Graph(n, [(0, v) for v in range(1, n)])


def gen_complete_graph(n: int) -> Graph:
    return Graph(n, itertools.combinations(range(n), 2))


def gen_cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def gen_path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def gen_two_clique_graph(n_per_side: int, bridge_edges: int) -> Graph:
    """Two cliques on ``n_per_side`` vertices each, joined by ``bridge_edges`` edges.

    Bridges are taken in lexicographic order of (left, right) pairs.  When
    ``bridge_edges < n_per_side - 1`` the minimum cut is exactly the bridge set.
    """
    s = n_per_side
    if s < 1:
        raise ValueError("each side needs at least one vertex")
    if not 0 <= bridge_edges <= s * s:
        raise ValueError(f"bridge_edges must lie in [0, {s * s}]")
    edges = list(itertools.combinations(range(s), 2))
    edges += [(s + u, s + v) for u, v in itertools.combinations(range(s), 2)]
    edges += [(k // s, s + k % s) for k in range(bridge_edges)]
    return Graph(2 * s, edges)


def gen_random_regular_graph(n: int, degree: int, rng: RngStream) -> Graph:
    """Random ``degree``-regular graph (the min-cut lower-bound family; fixture only)."""
    g = nx.random_regular_graph(degree, n, seed=int(rng.integers(0, 2**31)))
    return Graph(n, g.edges())


def gen_weighted_graph(graph: Graph, weight_classes: Sequence[float], rng: RngStream) -> WeightedGraph:
    """Assign each vertex a weight drawn uniformly from ``weight_classes``."""
    picks = rng.integers(0, len(weight_classes), size=graph.n)
    return WeightedGraph.normalized(graph, [float(weight_classes[i]) for i in picks])


def gen_uniform_metric(n: int, diameter: float = 1.0, demands: Iterable[int] | None = None) -> MetricInstance:
    if n < 1:
        raise ValueError("n must be at least 1")
    if diameter < 1:
        raise ValueError("diameter must be at least 1")
    d = np.full((n, n), float(diameter))
    np.fill_diagonal(d, 0.0)
    return MetricInstance.from_matrix(d, demands)


def gen_line_metric(n: int, demands: Iterable[int] | None = None) -> MetricInstance:
    x = np.arange(n, dtype=float)
    return MetricInstance.from_matrix(np.abs(x[:, None] - x[None, :]), demands)


def gen_grid_metric(rows: int, cols: int, demands: Iterable[int] | None = None) -> MetricInstance:
    """Manhattan distances on a ``rows x cols`` integer grid."""
    pts = np.array([(r, c) for r in range(rows) for c in range(cols)], dtype=float)
    d = np.abs(pts[:, None, :] - pts[None, :, :]).sum(axis=2)
    return MetricInstance.from_matrix(d, demands)


def gen_random_metric(n: int, rng: RngStream, demand_fraction: float = 0.5, spread: float = 10.0) -> MetricInstance:
    """Euclidean metric on random plane points, rescaled so the closest pair is at distance 1."""
    pts = rng.random((n, 2)) * spread
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    if n > 1:
        off = d[~np.eye(n, dtype=bool)]
        d = d / off.min()
        # rounding after the rescale can leave a pair a hair under 1
        d = np.where(np.eye(n, dtype=bool), 0.0, np.maximum(d, 1.0))
    demands = [i for i in range(n) if rng.random() < demand_fraction]
    return MetricInstance.from_matrix(d, demands)


def gen_kmedian_lb_metric(groups: int, group_size: int, diameter: float = 1e6) -> MetricInstance:
    """Grouped metric from the k-median lower-bound construction.

    Points ``(i, j)`` in the same group sit at distance 1, points in different
    groups at ``diameter``.  The construction's zero intra-group distance is
    represented by a ratio of ``1 : diameter`` (the default ratio stands in for
    an intra-group distance of 1e-6 relative to a unit diameter).
    """
    n = groups * group_size
    g = np.repeat(np.arange(groups), group_size)
    d = np.where(g[:, None] == g[None, :], 1.0, float(diameter))
    np.fill_diagonal(d, 0.0)
    return MetricInstance.from_matrix(d, range(n))


def gen_random_set_system(
    n: int,
    m: int,
    rng: RngStream,
    density: float = 0.2,
    covered_fraction: float = 1.0,
    costs: Sequence[float] | None = None,
) -> SetSystem:
    """Random sets (each element joins each set with probability ``density``).

    Elements left in no set are added to a random set, so every element is
    coverable; ``covered`` is a random subset of the universe.
    """
    member = rng.random((m, n)) < density
    for x in range(n):
        if not member[:, x].any():
            member[int(rng.integers(0, m)), x] = True
    sets = [frozenset(np.flatnonzero(row).tolist()) for row in member]
    covered = [x for x in range(n) if rng.random() < covered_fraction]
    return SetSystem(n, tuple(sets), frozenset(covered), None if costs is None else tuple(costs))


def gen_lb_set_system(universe: int, m: int, set_size: int, rng: RngStream) -> SetSystem:
    """Uniformly random ``set_size``-subsets (the set cover lower-bound family; fixture only)."""
    sets = [frozenset(rng.permutation(range(universe))[:set_size]) for _ in range(m)]
    return SetSystem(universe, tuple(sets), frozenset(sets[0]))


def gen_coverage_instance(
    m: int,
    universe_size: int,
    num_agents: int,
    rng: RngStream,
    cover_density: float = 0.25,
    target_size: int = 3,
) -> SubmodularInstance:
    member = rng.random((m, universe_size)) < cover_density
    for x in range(universe_size):
        if not member[:, x].any():
            member[int(rng.integers(0, m)), x] = True
    covers = [frozenset(np.flatnonzero(row).tolist()) for row in member]
    agents = []
    for _ in range(num_agents):
        size = min(target_size, universe_size)
        agents.append(frozenset(rng.permutation(range(universe_size))[:size]))
    return SubmodularInstance(universe_size, tuple(covers), tuple(agents))


def gen_terminal_pairs(metric: MetricInstance, num_pairs: int, rng: RngStream) -> TerminalPairs:
    pairs = []
    for _ in range(num_pairs):
        u, v = rng.permutation(range(metric.n))[:2]
        pairs.append((u, v))
    return TerminalPairs(metric, tuple(pairs))


# --------------------------------------------------------------------------
# text format
# --------------------------------------------------------------------------


def _fmt(x: float) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() and abs(x) < 2**53 else repr(x)


def _ints(xs: Iterable[int]) -> str:
    return " ".join(str(x) for x in sorted(xs))


def dumps(instance: Instance) -> str:
    """Serialize an instance to the text format (documented in the README)."""
    lines = [FORMAT_HEADER]
    if isinstance(instance, Graph):
        lines += ["type graph", f"n {instance.n}"]
        lines += [f"edge {u} {v}" for u, v in instance.edges]
    elif isinstance(instance, WeightedGraph):
        g = instance.graph
        lines += ["type weighted_graph", f"n {g.n}"]
        lines += [f"edge {u} {v}" for u, v in g.edges]
        lines.append("weights " + " ".join(_fmt(w) for w in instance.weights))
    elif isinstance(instance, MetricInstance):
        lines += ["type metric"]
        lines += _metric_lines(instance)
    elif isinstance(instance, TerminalPairs):
        lines += ["type steiner"]
        lines += _metric_lines(instance.metric)
        lines += [f"pair {u} {v}" for u, v in instance.pairs]
    elif isinstance(instance, SetSystem):
        lines += ["type set_system", f"n {instance.n}"]
        lines += [("set " + _ints(s)).rstrip() for s in instance.sets]
        if instance.costs is not None:
            lines.append("costs " + " ".join(_fmt(c) for c in instance.costs))
        lines.append(("covered " + _ints(instance.covered)).rstrip())
    elif isinstance(instance, SubmodularInstance):
        lines += ["type coverage", f"universe {instance.universe_size}"]
        lines += [("resource " + _ints(c)).rstrip() for c in instance.covers]
        lines += [("agent " + _ints(a)).rstrip() for a in instance.agents]
        if instance.item_weights is not None:
            lines.append("item_weights " + " ".join(_fmt(w) for w in instance.item_weights))
    else:
        raise TypeError(f"cannot serialize {type(instance).__name__}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def _metric_lines(metric: MetricInstance) -> list[str]:
    out = [f"n {metric.n}"]
    out += ["row " + " ".join(_fmt(x) for x in row) for row in metric.dist]
    out.append(("demands " + _ints(metric.demands)).rstrip())
    return out


def instance_hash(instance: Instance) -> str:
    return hashlib.sha256(dumps(instance).encode()).hexdigest()[:12]


def _parse_num(tok: str, line: int, key: str, kind=float):
    try:
        val = kind(tok)
    except ValueError:
        raise InstanceFormatError(f"bad number {tok!r}", line, key) from None
    return val


def loads(text: str) -> Instance:
    """Parse an instance document; raises on malformed text or invariant violations."""
    records: list[tuple[int, str, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            parts = body.split()
            records.append((lineno, parts[0], parts[1:]))
    if not records or " ".join([records[0][1], *records[0][2]]) != FORMAT_HEADER:
        raise InstanceFormatError(f"document must start with {FORMAT_HEADER!r}", records[0][0] if records else None)
    body = records[1:]
    if not body or body[-1][1] != "end":
        raise InstanceFormatError("document must finish with 'end'")
    body = body[:-1]
    if not body or body[0][1] != "type" or len(body[0][2]) != 1:
        raise InstanceFormatError("second line must be 'type <kind>'", body[0][0] if body else None, "type")
    kind = body[0][2][0]
    fields: dict[str, list[tuple[int, list[str]]]] = {}
    for lineno, key, vals in body[1:]:
        fields.setdefault(key, []).append((lineno, vals))

    def one(key: str, kind=int, required=True):
        if key not in fields:
            if required:
                raise InstanceFormatError(f"missing field {key!r}", None, key)
            return None
        entries = fields[key]
        if len(entries) != 1:
            raise InstanceFormatError(f"field {key!r} given more than once", entries[1][0], key)
        lineno, vals = entries[0]
        if len(vals) != 1:
            raise InstanceFormatError(f"field {key!r} takes one value", lineno, key)
        return _parse_num(vals[0], lineno, key, kind)

    def lists(key: str, kind=int) -> list[list]:
        return [[_parse_num(t, ln, f"{key}[{k}]", kind) for t in vals] for k, (ln, vals) in enumerate(fields.get(key, []))]

    def single_list(key: str, kind=int, required=True):
        got = fields.get(key)
        if got is None:
            if required:
                raise InstanceFormatError(f"missing field {key!r}", None, key)
            return None
        if len(got) != 1:
            raise InstanceFormatError(f"field {key!r} given more than once", got[1][0], key)
        return lists(key, kind)[0]

    allowed = {
        "graph": {"n", "edge"},
        "weighted_graph": {"n", "edge", "weights"},
        "metric": {"n", "row", "demands"},
        "steiner": {"n", "row", "demands", "pair"},
        "set_system": {"n", "set", "costs", "covered"},
        "coverage": {"universe", "resource", "agent", "item_weights"},
    }
    if kind not in allowed:
        raise InstanceFormatError(f"unknown instance type {kind!r}", body[0][0], "type")
    for key, entries in fields.items():
        if key not in allowed[kind]:
            raise InstanceFormatError(f"unexpected field {key!r} for type {kind}", entries[0][0], key)

    def edges_of():
        out = []
        for k, e in enumerate(lists("edge")):
            if len(e) != 2:
                raise InstanceFormatError("edge needs two endpoints", fields["edge"][k][0], f"edge[{k}]")
            out.append(tuple(e))
        return out

    def metric_of() -> MetricInstance:
        n = one("n")
        rows = lists("row", float)
        if len(rows) != n:
            raise InstanceFormatError(f"expected {n} rows, got {len(rows)}", None, "row")
        return MetricInstance(tuple(tuple(r) for r in rows), frozenset(single_list("demands", int, required=False) or ()))

    if kind == "graph":
        return Graph(one("n"), edges_of())
    if kind == "weighted_graph":
        g = Graph(one("n"), edges_of())
        return WeightedGraph(g, tuple(single_list("weights", float)))
    if kind == "metric":
        return metric_of()
    if kind == "steiner":
        metric = metric_of()
        pairs = []
        for k, p in enumerate(lists("pair")):
            if len(p) != 2:
                raise InstanceFormatError("pair needs two endpoints", fields["pair"][k][0], f"pair[{k}]")
            pairs.append(tuple(p))
        return TerminalPairs(metric, tuple(pairs))
    if kind == "set_system":
        costs = single_list("costs", float, required=False)
        return SetSystem(
            one("n"),
            tuple(frozenset(s) for s in lists("set")),
            frozenset(single_list("covered", int, required=False) or ()),
            None if costs is None else tuple(costs),
        )
    weights = single_list("item_weights", float, required=False)
    return SubmodularInstance(
        one("universe"),
        tuple(frozenset(c) for c in lists("resource")),
        tuple(frozenset(a) for a in lists("agent")),
        None if weights is None else tuple(weights),
    )


def save(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps(instance))


def load(path: str | Path) -> Instance:
    return loads(Path(path).read_text())
