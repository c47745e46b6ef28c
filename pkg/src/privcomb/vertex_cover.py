"""Private vertex cover as a vertex ordering.

Every algorithm here emits a permutation of the vertices; each edge is then
covered by whichever endpoint comes first.  Only the edge's own endpoints
need to know the ordering to act, so the cover itself is never published.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from privcomb.instances import Graph, WeightedGraph
from privcomb.rng import RngStream


def _check_permutation(n: int, perm) -> None:
    if sorted(perm) != list(range(n)):
        raise ValueError("ordering must be a permutation of the vertices")


def decode_cover(graph: Graph, permutation) -> frozenset[int]:
    """Cover each edge by its endpoint that appears earlier in ``permutation``."""
    _check_permutation(graph.n, permutation)
    pos = {v: i for i, v in enumerate(permutation)}
    return frozenset(u if pos[u] < pos[v] else v for u, v in graph.edges)


def is_vertex_cover(graph: Graph, cover) -> bool:
    cover = set(cover)
    return all(u in cover or v in cover for u, v in graph.edges)


def cover_weight(wgraph: WeightedGraph, cover) -> float:
    return float(sum(wgraph.weights[v] for v in cover))


def uvc_weight(n: int, epsilon: float, i: int) -> float:
    """Uniform mixing weight at step ``i`` (1-based) of the unweighted algorithm."""
    if not 1 <= i <= n:
        raise ValueError(f"step must lie in [1, {n}]")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    return (4.0 / epsilon) * math.sqrt(n / (n - i + 1))


def _remaining_degrees(graph: Graph, alive: np.ndarray) -> np.ndarray:
    deg = np.zeros(graph.n)
    for u, v in graph.edges:
        if alive[u] and alive[v]:
            deg[u] += 1
            deg[v] += 1
    return deg


def private_vc_unweighted(graph: Graph, epsilon: float, rng: RngStream) -> tuple[int, ...]:
    """epsilon-DP (edge level); the decoded cover has expected size <= (2 + 16/eps) OPT."""
    n = graph.n
    if n < 1:
        raise ValueError("graph must have at least one vertex")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    adj = graph.adjacency
    deg = np.array(graph.degrees(), dtype=float)
    alive = np.ones(n, dtype=bool)
    out = []
    for i in range(1, n + 1):
        w = np.where(alive, deg + uvc_weight(n, epsilon, i), 0.0)
        v = rng.choice_index(w)
        out.append(v)
        alive[v] = False
        for u in adj[v]:
            if alive[u]:
                deg[u] -= 1
        deg[v] = 0
    return tuple(out)


def private_vc_hallucinated(graph: Graph, epsilon: float, alpha: float, rng: RngStream) -> tuple[int, ...]:
    """First ``ceil(alpha n)`` picks proportional to degree + 1/eps, the rest uniformly shuffled.

    Edge-level privacy is ``eps * 2 alpha / (1 - alpha)``.
    """
    n = graph.n
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie strictly between 0 and 1")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    adj = graph.adjacency
    deg = np.array(graph.degrees(), dtype=float)
    alive = np.ones(n, dtype=bool)
    out = []
    for _ in range(min(n, math.ceil(alpha * n))):
        v = rng.choice_index(np.where(alive, deg + 1.0 / epsilon, 0.0))
        out.append(v)
        alive[v] = False
        for u in adj[v]:
            if alive[u]:
                deg[u] -= 1
    out += rng.permutation(np.flatnonzero(alive).tolist())
    return tuple(int(v) for v in out)


def hallucinated_privacy(epsilon: float, alpha: float, n: int | None = None) -> float:
    """``eps * 2a / (1 - a)``; with ``n`` given, ``a`` is the realized fraction ``ceil(alpha n) / n``."""
    a = alpha if n is None else math.ceil(alpha * n) / n
    if a >= 1:
        return math.inf
    return epsilon * 2 * a / (1 - a)


def hallucinated_ratio_bound(epsilon: float, alpha: float) -> float:
    eps_p = 1.0 / (1.0 + 1.0 / epsilon)
    return (2.0 / eps_p) * (1.0 + 1.0 / math.log(1.0 / (1.0 - alpha)))


# --------------------------------------------------------------------------
# weighted
# --------------------------------------------------------------------------


def weight_class(w: float) -> int:
    """``ceil(log2 w)`` computed exactly for w >= 1."""
    if w < 1:
        raise ValueError(f"weight {w} is below 1")
    m, e = math.frexp(w)
    return e - 1 if m == 0.5 else e


@dataclass(frozen=True)
class WeightClassLayout:
    """Vertices grouped by rounded weight ``2^j``, with every class padded to ``padded_size``."""

    classes: tuple[tuple[int, ...], ...]
    vertex_class: tuple[int, ...]
    padded_size: int

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def fake_counts(self) -> tuple[int, ...]:
        return tuple(self.padded_size - len(c) for c in self.classes)

    def rounded_weight(self, v: int) -> float:
        return float(2 ** self.vertex_class[v])


def build_layout(wgraph: WeightedGraph) -> WeightClassLayout:
    cls = tuple(weight_class(w) for w in wgraph.weights)
    J = max(cls, default=0)
    classes = tuple(tuple(v for v in range(wgraph.n) if cls[v] == j) for j in range(J + 1))
    return WeightClassLayout(classes, cls, max((len(c) for c in classes), default=0))


def hallucinated_edge_count(epsilon: float) -> int:
    return math.ceil(1.0 / epsilon)


def dumpable_class(layout: WeightClassLayout, emitted: np.ndarray, alive: np.ndarray) -> int | None:
    """Smallest class ``j`` that still has unemitted vertices and whose threshold is reached.

    The threshold counts every emitted vertex of class ``j`` or higher and
    compares it against half the padded class size.
    """
    vc = np.asarray(layout.vertex_class)
    for j, members in enumerate(layout.classes):
        if not any(alive[v] for v in members):
            continue
        if 2 * int(np.sum(emitted & (vc >= j))) >= layout.padded_size:
            return j
    return None


@dataclass(frozen=True)
class WeightedVcRun:
    permutation: tuple[int, ...]
    # ("pick", v) for sampled outputs and ("dump", j) for each class dump
    events: tuple[tuple[str, int], ...]
    layout: WeightClassLayout


def weighted_vc_run(wgraph: WeightedGraph, epsilon: float, rng: RngStream) -> WeightedVcRun:
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    graph = wgraph.graph
    n = graph.n
    layout = build_layout(wgraph)
    s = np.array([1.0 / layout.rounded_weight(v) for v in range(n)])
    h = hallucinated_edge_count(epsilon)
    alive = np.ones(n, dtype=bool)
    emitted = np.zeros(n, dtype=bool)
    uncovered = set(graph.edges)
    out: list[int] = []
    events: list[tuple[str, int]] = []

    def emit(v: int) -> None:
        out.append(v)
        alive[v] = False
        emitted[v] = True
        for u in graph.adjacency[v]:
            uncovered.discard((min(u, v), max(u, v)))

    step = 0
    while alive.any():
        real = sorted(uncovered)
        live = np.flatnonzero(alive)
        # real edges score s(u)+s(v); each live vertex's h hallucinated edges are bundled
        edge_w = [s[u] + s[v] for u, v in real] + [h * s[v] for v in live]
        sub = rng.child(step)
        e = sub.choice_index(edge_w)
        if e < len(real):
            u, v = real[e]
            pick = (u, v)[sub.choice_index([s[u], s[v]])]
        else:
            pick = int(live[e - len(real)])
        emit(pick)
        events.append(("pick", pick))
        while (j := dumpable_class(layout, emitted, alive)) is not None:
            events.append(("dump", j))
            for v in sub.permutation([v for v in layout.classes[j] if alive[v]]):
                emit(v)
        step += 1
    return WeightedVcRun(tuple(out), tuple(events), layout)


def private_vc_weighted(wgraph: WeightedGraph, epsilon: float, rng: RngStream) -> tuple[int, ...]:
    """O(eps)-DP weighted vertex cover ordering with hallucinated edges and class dumping."""
    return weighted_vc_run(wgraph, epsilon, rng).permutation
