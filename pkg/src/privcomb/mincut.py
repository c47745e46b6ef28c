"""Private global min-cut: the two-stage padding mechanism and its Karger-sampled variant.

Cuts are handled as bitmasks of the side containing vertex 0.  Stage 1 picks
how many padding edges to add (a data-independent lexicographic prefix of the
complete graph) so the padded min cut sits near ``8 ln n / eps``; stage 2
picks a cut of the padded graph with the exponential mechanism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import networkx as nx
import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree

from privcomb.instances import Graph
from privcomb.mechanisms import exp_select
from privcomb.rng import RngStream

ENUMERATION_LIMIT = 20
MASK_LIMIT = 62
TARGET_CONSTANT = 8.0
# sampled mode must see every cut within this factor of the padded minimum
SAMPLED_APPROX = 3.0


@dataclass(frozen=True)
class Cut:
    """A cut ``(side, V \\ side)``; ``side`` always contains vertex 0."""

    n: int
    side: frozenset[int]

    def __post_init__(self):
        side = frozenset(int(v) for v in self.side)
        if any(not 0 <= v < self.n for v in side):
            raise ValueError("cut side contains a vertex outside the graph")
        if 0 not in side:
            side = frozenset(range(self.n)) - side
        if len(side) in (0, self.n):
            raise ValueError("a cut side must be a nonempty proper subset")
        object.__setattr__(self, "side", side)

    @property
    def mask(self) -> int:
        return sum(1 << v for v in self.side)

    @classmethod
    def from_mask(cls, n: int, mask: int) -> Cut:
        return cls(n, frozenset(v for v in range(n) if mask >> v & 1))


def cut_cost(graph: Graph, cut: Cut) -> int:
    side = cut.side
    return sum((u in side) != (v in side) for u, v in graph.edges)


def padding_edges(n: int) -> list[tuple[int, int]]:
    """The padding schedule: complete-graph edges in lexicographic order."""
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


def padded_graph(graph: Graph, i: int) -> Graph:
    return graph.union(padding_edges(graph.n)[:i])


# --------------------------------------------------------------------------
# exact enumeration
# --------------------------------------------------------------------------


def _all_masks(n: int) -> np.ndarray:
    # side masks containing vertex 0, excluding the full vertex set
    return (np.arange(2 ** (n - 1) - 1, dtype=np.int64) << 1) | 1


def _crossing(masks: np.ndarray, u: int, v: int) -> np.ndarray:
    return ((masks >> u) ^ (masks >> v)) & 1


def cut_costs(masks: np.ndarray, edges) -> np.ndarray:
    costs = np.zeros(len(masks), dtype=np.int64)
    for u, v in edges:
        costs += _crossing(masks, u, v)
    return costs


def enumerate_cut_masks(graph: Graph) -> tuple[np.ndarray, np.ndarray]:
    """All ``2^(n-1) - 1`` cut masks with their costs, as arrays."""
    if graph.n < 2:
        raise ValueError("a graph needs at least 2 vertices to have a cut")
    if graph.n > ENUMERATION_LIMIT:
        raise ValueError(f"cut enumeration limited to n <= {ENUMERATION_LIMIT}, got {graph.n}")
    masks = _all_masks(graph.n)
    return masks, cut_costs(masks, graph.edges)


def enumerate_all_cuts(graph: Graph) -> list[tuple[Cut, int]]:
    masks, costs = enumerate_cut_masks(graph)
    return [(Cut.from_mask(graph.n, int(m)), int(c)) for m, c in zip(masks, costs)]


# --------------------------------------------------------------------------
# min-cut value and the padding profile
# --------------------------------------------------------------------------


def min_cut_value(graph: Graph) -> int:
    """Exact global min-cut size (0 for disconnected graphs)."""
    if graph.n < 2:
        raise ValueError("a graph needs at least 2 vertices to have a cut")
    g = graph.to_networkx()
    if not nx.is_connected(g):
        return 0
    value, _ = nx.stoer_wagner(g)
    return int(value)


@lru_cache(maxsize=256)
def padding_profile(graph: Graph) -> tuple[int, ...]:
    """``OPT(G ∪ H_i)`` for every ``i`` in ``0..C(n,2)``.

    The profile is nondecreasing and integer valued, so it is recovered by
    bisection: where the endpoints of a range agree, the whole range does.
    """
    n = graph.n
    total = n * (n - 1) // 2
    if n <= 12:
        masks, costs = enumerate_cut_masks(graph)
        out = [int(costs.min())]
        present = graph.edge_set
        for u, v in padding_edges(n):
            if (u, v) not in present:
                costs = costs + _crossing(masks, u, v)
            out.append(int(costs.min()))
        return tuple(out)

    prof: dict[int, int] = {}

    def value(i: int) -> int:
        if i not in prof:
            prof[i] = min_cut_value(padded_graph(graph, i))
        return prof[i]

    stack = [(0, total)]
    while stack:
        lo, hi = stack.pop()
        a, b = value(lo), value(hi)
        if a == b or hi - lo <= 1:
            for j in range(lo + 1, hi):
                prof[j] = a
            continue
        mid = (lo + hi) // 2
        stack += [(lo, mid), (mid, hi)]
    return tuple(prof[i] for i in range(total + 1))


def padding_scores(graph: Graph, epsilon: float, target_constant: float = TARGET_CONSTANT) -> np.ndarray:
    target = target_constant * math.log(graph.n) / epsilon
    return -np.abs(np.asarray(padding_profile(graph), dtype=float) - target)


# --------------------------------------------------------------------------
# Karger contraction
# --------------------------------------------------------------------------


def default_num_runs(n: int) -> int:
    return n**3 * math.ceil(math.log(n))


def _component_cuts(graph: Graph) -> set[Cut]:
    comps = list(nx.connected_components(graph.to_networkx()))
    return {Cut(graph.n, c) for c in comps}


def contraction_supernodes(approx_factor: float) -> int:
    """Contract to ``ceil(2 alpha)`` supernodes so every alpha-approximate cut survives a run with probability ``>= n^(-2 alpha)``."""
    if approx_factor == math.inf:
        return 2
    if approx_factor < 1:
        raise ValueError("approximation factor must be at least 1")
    return max(2, math.ceil(2 * approx_factor))


def karger_cut_masks(
    graph: Graph,
    num_runs: int,
    rng: RngStream,
    batch: int | None = None,
    supernodes: int = 2,
) -> np.ndarray:
    """Side masks (containing vertex 0) produced by ``num_runs`` random contractions of a connected graph.

    One contraction run is equivalent to Kruskal's algorithm on uniformly
    random edge weights stopped at ``supernodes`` components, i.e. the
    minimum spanning tree with its heaviest ``supernodes - 1`` edges deleted.
    The run then outputs a uniformly random bipartition of the supernodes.
    Runs are batched as disjoint copies of the graph in one sparse MST call.
    """
    n, m = graph.n, graph.m
    if n > MASK_LIMIT:
        raise ValueError(f"mask representation limited to n <= {MASK_LIMIT}")
    if supernodes < 2:
        raise ValueError("contraction needs at least 2 supernodes")
    if num_runs <= 0:
        return np.zeros(0, dtype=np.int64)
    r = min(supernodes, n)
    e = np.asarray(graph.edges, dtype=np.int64).reshape(-1, 2)
    if batch is None:
        batch = max(1, min(num_runs, 2_000_000 // max(m, 1)))
    bits = np.int64(1) << np.arange(n, dtype=np.int64)
    full = np.int64((1 << n) - 1)
    out = []
    done = 0
    while done < num_runs:
        b = min(batch, num_runs - done)
        offs = (np.arange(b, dtype=np.int64) * n)[:, None]
        rows = (e[None, :, 0] + offs).ravel()
        cols = (e[None, :, 1] + offs).ravel()
        # weights in (0, 1]: scipy treats explicit zeros as absent edges
        w = 1.0 - rng.random(b * m)
        g = coo_matrix((w, (rows, cols)), shape=(b * n, b * n)).tocsr()
        t = minimum_spanning_tree(g).tocoo()
        copy = t.row // n
        order = np.lexsort((t.data, copy))
        # each copy is connected, so its n - 1 tree edges are contiguous in ``order``
        rank = np.arange(len(order)) - np.repeat(np.arange(b) * (n - 1), n - 1)
        keep = np.zeros(len(order), dtype=bool)
        keep[order[rank < n - r]] = True
        forest = coo_matrix((t.data[keep], (t.row[keep], t.col[keep])), shape=(b * n, b * n))
        ncomp, labels = connected_components(forest, directed=False)
        # relabel each copy's r components as 0..r-1
        copy_of = np.empty(ncomp, dtype=np.int64)
        copy_of[labels] = np.repeat(np.arange(b), n)
        by_copy = np.argsort(copy_of, kind="stable")
        local = np.empty(ncomp, dtype=np.int64)
        local[by_copy] = np.arange(ncomp) - copy_of[by_copy] * r
        local = local[labels].reshape(b, n)
        if r == 2:
            side_bits = np.ones(b, dtype=np.int64)
        else:
            # uniform over nonempty proper subsets; each bipartition appears twice
            side_bits = 1 + rng.integers(0, (1 << r) - 2, size=b)
        side = ((side_bits[:, None] >> local) & 1).astype(bool)
        mask = (side * bits).sum(axis=1)
        out.append(np.where(mask & 1, mask, full ^ mask))
        done += b
    return np.concatenate(out)


def karger_near_min_cuts(graph: Graph, approx_factor: float, num_runs: int, rng: RngStream) -> set[Cut]:
    """Distinct cuts found by ``num_runs`` contraction runs, kept if cost <= factor * (best found).

    Runs contract to :func:`contraction_supernodes` supernodes.  A
    disconnected graph has min cut 0; its component-versus-rest cuts are
    returned directly.
    """
    if graph.n < 2:
        raise ValueError("a graph needs at least 2 vertices to have a cut")
    if num_runs <= 0:
        return set()
    if not nx.is_connected(graph.to_networkx()):
        return _component_cuts(graph)
    r = contraction_supernodes(approx_factor)
    masks = np.unique(karger_cut_masks(graph, num_runs, rng, supernodes=r))
    costs = cut_costs(masks, graph.edges)
    bound = approx_factor * int(costs.min()) if approx_factor != math.inf else math.inf
    return {Cut.from_mask(graph.n, int(mk)) for mk, c in zip(masks, costs) if c <= bound}


# --------------------------------------------------------------------------
# the mechanism
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MinCutResult:
    cut: Cut
    padding_index: int
    cost: int
    padded_cost: int
    num_candidates: int


def private_min_cut_run(
    graph: Graph,
    epsilon: float,
    mode: Literal["exact", "sampled"],
    rng: RngStream,
    *,
    target_constant: float = TARGET_CONSTANT,
    num_runs: int | None = None,
) -> MinCutResult:
    n = graph.n
    if n < 2:
        raise ValueError("private min-cut needs at least 2 vertices")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if mode == "exact" and n > ENUMERATION_LIMIT:
        raise ValueError(f"exact mode enumerates all cuts and is limited to n <= {ENUMERATION_LIMIT}")
    if mode not in ("exact", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")

    i = exp_select(padding_scores(graph, epsilon, target_constant), epsilon, rng.child(0))
    padded = padded_graph(graph, i)

    if mode == "exact":
        masks, padded_costs = enumerate_cut_masks(padded)
    else:
        runs = default_num_runs(n) if num_runs is None else num_runs
        if nx.is_connected(padded.to_networkx()):
            r = contraction_supernodes(SAMPLED_APPROX)
            masks = np.unique(karger_cut_masks(padded, runs, rng.child(1), supernodes=r))
        else:
            masks = np.array(sorted(c.mask for c in _component_cuts(padded)), dtype=np.int64)
        if len(masks) == 0:
            raise ValueError("sampled mode needs at least one contraction run")
        padded_costs = cut_costs(masks, padded.edges)

    j = exp_select(-padded_costs.astype(float), epsilon, rng.child(2))
    cut = Cut.from_mask(n, int(masks[j]))
    return MinCutResult(cut, i, cut_cost(graph, cut), int(padded_costs[j]), len(masks))


def private_min_cut(
    graph: Graph,
    epsilon: float,
    mode: Literal["exact", "sampled"],
    rng: RngStream,
    *,
    target_constant: float = TARGET_CONSTANT,
    num_runs: int | None = None,
) -> Cut:
    """Two-stage private min-cut; exact mode is 2*epsilon-DP in the edge set."""
    return private_min_cut_run(graph, epsilon, mode, rng, target_constant=target_constant, num_runs=num_runs).cut
