"""Random dominating 2-HSTs, private facility location on them, and oblivious Steiner forest routing.

Tree layout: leaves (level 0) are the metric points, the root is at level
``L = ceil(log2 diameter) + 1``, and an edge from a level-``i`` node to its
parent has length ``2^i``.  A leaf therefore sits at distance ``2^l - 1``
below its level-``l`` ancestor, and two leaves whose lowest common ancestor
is at level ``l`` are ``2 (2^l - 1)`` apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from privcomb.instances import MetricInstance, TerminalPairs
from privcomb.rng import RngStream


@dataclass(frozen=True)
class HstNode:
    level: int
    members: frozenset[int]
    parent: int  # -1 for the root


@dataclass(frozen=True)
class HstTree:
    nodes: tuple[HstNode, ...]
    leaf: tuple[int, ...]  # point -> node id of its leaf
    levels: int  # L; the root is at this level

    @property
    def root(self) -> int:
        return next(k for k, nd in enumerate(self.nodes) if nd.parent == -1)

    @property
    def n_points(self) -> int:
        return len(self.leaf)

    def ancestors(self, point: int) -> list[int]:
        """Node ids from the point's leaf up to the root."""
        out = [self.leaf[point]]
        while self.nodes[out[-1]].parent != -1:
            out.append(self.nodes[out[-1]].parent)
        return out

    def nodes_at(self, level: int) -> list[int]:
        return [k for k, nd in enumerate(self.nodes) if nd.level == level]

    def edge_length(self, node: int) -> float:
        """Length of the edge from ``node`` up to its parent."""
        return float(2 ** self.nodes[node].level)

    def lca_level(self, u: int, v: int) -> int:
        au, av = self.ancestors(u), self.ancestors(v)
        for a, b in zip(au, av):
            if a == b:
                return self.nodes[a].level
        raise AssertionError("leaves share no ancestor")

    def distance_matrix(self) -> np.ndarray:
        n = self.n_points
        d = np.zeros((n, n))
        for u in range(n):
            for v in range(u + 1, n):
                d[u, v] = d[v, u] = tree_distance(self, u, v)
        return d


def num_levels(diameter: float) -> int:
    if diameter <= 0:
        return 0
    return math.ceil(math.log2(diameter)) + 1


def cluster_radius(level: int, beta: float) -> float:
    # diameter of a level-i cluster stays below 2^i, which is what domination needs
    return beta * 2.0 ** (level - 2)


def sample_beta(rng: RngStream) -> float:
    """beta in [1, 2) with density proportional to 1/beta."""
    return float(2.0 ** rng.random())


def build_frt_tree(metric: MetricInstance, rng: RngStream) -> HstTree:
    """Random hierarchical decomposition (random center order plus random radius scale).

    Only the public metric is read; demands attached to ``metric`` are ignored.
    """
    n = metric.n
    if n == 0:
        raise ValueError("metric has no points")
    d = metric.matrix
    L = num_levels(metric.diameter)
    order = rng.permutation(range(n))
    beta = sample_beta(rng)

    nodes: list[HstNode] = []
    # build top-down; parent ids are filled as we go
    nodes.append(HstNode(L, frozenset(range(n)), -1))
    frontier = [0]
    for level in range(L - 1, -1, -1):
        nxt = []
        for pid in frontier:
            members = nodes[pid].members
            if level == 0:
                parts = [frozenset([p]) for p in sorted(members)]
            else:
                radius = cluster_radius(level, beta)
                left = set(members)
                parts = []
                for c in order:
                    if not left:
                        break
                    grab = frozenset(p for p in left if d[c, p] <= radius)
                    if grab:
                        parts.append(grab)
                        left -= grab
            for part in parts:
                nodes.append(HstNode(level, part, pid))
                nxt.append(len(nodes) - 1)
        frontier = nxt
    leaf = [0] * n
    for k, nd in enumerate(nodes):
        if nd.level == 0:
            (p,) = nd.members
            leaf[p] = k
    return HstTree(tuple(nodes), tuple(leaf), L)


def tree_distance(tree: HstTree, u: int, v: int) -> float:
    if u == v:
        return 0.0
    return 2.0 * (2 ** tree.lca_level(u, v) - 1)


def stretch(metric: MetricInstance, tree: HstTree) -> np.ndarray:
    """Per-pair ratio ``d_T / d`` (diagonal set to 1)."""
    dt = tree.distance_matrix()
    d = metric.matrix
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(d > 0, dt / np.where(d > 0, d, 1.0), 1.0)
    return s


# --------------------------------------------------------------------------
# facility location
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FacilityPlan:
    tree: HstTree
    open_nodes: frozenset[int]
    facility_cost: float
    noisy_counts: dict[int, float] = field(default_factory=dict, compare=False)


def subtree_counts(tree: HstTree, demands) -> dict[int, int]:
    counts = {k: 0 for k in range(len(tree.nodes))}
    for x in demands:
        for a in tree.ancestors(x):
            counts[a] += 1
    return counts


def facility_plan(
    tree: HstTree,
    demands,
    facility_cost: float,
    epsilon: float,
    rng: RngStream,
) -> FacilityPlan:
    """Open internal node ``v`` at level ``i`` iff ``(N_v + Lap(L/eps)) * 2^i > f``; the root is always open."""
    if not facility_cost > 0:
        raise ValueError("facility cost must be positive")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    L = tree.levels
    counts = subtree_counts(tree, demands)
    root = tree.root
    opened = {root}
    noisy = {}
    internal = [k for k, nd in enumerate(tree.nodes) if nd.level >= 1]
    if internal:
        noise = rng.laplace(L / epsilon, size=len(internal))
        for k, z in zip(internal, noise):
            nv = counts[k] + float(z)
            noisy[k] = nv
            if nv * 2 ** tree.nodes[k].level > facility_cost:
                opened.add(k)
    return FacilityPlan(tree, frozenset(opened), float(facility_cost), noisy)


def private_facility_location(metric: MetricInstance, facility_cost: float, epsilon: float, rng: RngStream) -> FacilityPlan:
    """epsilon-DP in the demand set: a demand-oblivious tree plus Laplace-noised subtree counts."""
    tree = build_frt_tree(metric, rng.child(0))
    return facility_plan(tree, metric.demands, facility_cost, epsilon, rng.child(1))


@dataclass(frozen=True)
class Assignment:
    facility: dict[int, int]
    connection_cost: float
    facility_cost: float

    @property
    def total(self) -> float:
        return self.connection_cost + self.facility_cost


def assign_demands(plan: FacilityPlan, demands) -> Assignment:
    """Send each demand to its lowest open ancestor; only used facilities are paid for."""
    tree = plan.tree
    if tree.root not in plan.open_nodes:
        raise ValueError("the root must be open")
    where, conn = {}, 0.0
    for x in sorted(demands):
        for a in tree.ancestors(x):
            if a in plan.open_nodes:
                where[x] = a
                conn += 2.0 ** tree.nodes[a].level - 1
                break
    used = set(where.values())
    return Assignment(where, conn, plan.facility_cost * len(used))


def realized_metric_cost(metric: MetricInstance, plan: FacilityPlan) -> float:
    """Cost in the original metric with each used tree facility placed at the lowest-index point below it."""
    a = assign_demands(plan, metric.demands)
    site = {v: min(plan.tree.nodes[v].members) for v in set(a.facility.values())}
    conn = sum(metric.matrix[x, site[v]] for x, v in a.facility.items())
    return float(conn + plan.facility_cost * len(site))


def facility_location_cost(metric: MetricInstance, facilities, facility_cost: float) -> float:
    facilities = sorted(facilities)
    if not metric.demands:
        return facility_cost * len(facilities)
    if not facilities:
        return math.inf
    d = metric.matrix[np.ix_(sorted(metric.demands), facilities)]
    return float(d.min(axis=1).sum() + facility_cost * len(facilities))


# --------------------------------------------------------------------------
# Steiner forest
# --------------------------------------------------------------------------


def tree_path_edges(tree: HstTree, u: int, v: int) -> set[int]:
    """Tree path between two leaves, as the set of child node ids of its edges."""
    au, av = tree.ancestors(u), tree.ancestors(v)
    su = set(au)
    lca = next(a for a in av if a in su)
    return set(au[: au.index(lca)]) | set(av[: av.index(lca)])


def steiner_forest_route(metric: MetricInstance, pairs: TerminalPairs, rng: RngStream) -> tuple[frozenset[int], float]:
    """Union of tree paths for every pair on a tree built without looking at the pairs.

    Edges are identified by their lower endpoint's node id.
    """
    tree = build_frt_tree(metric, rng)
    edges: set[int] = set()
    for u, v in pairs.pairs:
        edges |= tree_path_edges(tree, u, v)
    return frozenset(edges), float(sum(tree.edge_length(e) for e in edges))
