"""The two primitive mechanisms everything else is built from.

``exp_mechanism`` samples an outcome with probability proportional to
``exp(epsilon * score)``.  With a score of sensitivity ``s`` this is
``2 * epsilon * s``-differentially private; callers that want a pure
``eps``-DP selection pass ``epsilon = eps / (2 * s)``.
"""

from __future__ import annotations

import math
from collections.abc import Hashable, Sequence
from dataclasses import dataclass

import networkx as nx
import numpy as np

from privcomb.instances import Graph
from privcomb.rng import RngStream


@dataclass(frozen=True)
class PrivacyBudget:
    epsilon: float
    delta: float = 0.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 <= self.delta < 1:
            raise ValueError(f"delta must lie in [0, 1), got {self.delta}")

    @property
    def is_pure(self) -> bool:
        return self.delta == 0


@dataclass(frozen=True)
class ScoredCandidate:
    outcome: Hashable
    score: float


def exp_weights(scores, epsilon: float) -> np.ndarray:
    """Unnormalized selection weights, max-shifted so the largest is 1."""
    scores = np.asarray(scores, dtype=float)
    if scores.size == 0:
        raise ValueError("no candidates")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    if epsilon < 0 or not math.isfinite(epsilon):
        raise ValueError(f"epsilon must be a finite nonnegative number, got {epsilon}")
    logits = epsilon * scores
    return np.exp(logits - logits.max())


def exp_probabilities(scores, epsilon: float) -> np.ndarray:
    w = exp_weights(scores, epsilon)
    return w / w.sum()


def exp_select(scores, epsilon: float, rng: RngStream) -> int:
    """Index-level exponential mechanism used by the algorithm modules."""
    return rng.choice_index(exp_weights(scores, epsilon))


def exp_mechanism(
    candidates: Sequence[ScoredCandidate],
    epsilon: float,
    sensitivity: float,
    rng: RngStream,
) -> Hashable:
    """Select a candidate outcome with probability proportional to exp(epsilon * score).

    ``sensitivity`` is the caller's bound on how much any score can move
    between adjacent inputs.  It does not change the sampling law; it is
    validated and recorded so that the guarantee ``2 * epsilon * sensitivity``
    can be read off by :func:`exp_mechanism_privacy`.
    """
    if not candidates:
        raise ValueError("exp_mechanism needs at least one candidate")
    if not sensitivity > 0:
        raise ValueError("sensitivity must be positive")
    idx = exp_select([c.score for c in candidates], epsilon, rng)
    return candidates[idx].outcome


def exp_mechanism_privacy(epsilon: float, sensitivity: float) -> float:
    return 2.0 * epsilon * sensitivity


def exp_mechanism_tail_bound(num_candidates: int, num_optimal: int, epsilon: float, t: float) -> float:
    """Bound on Pr[score < max - ln(|R|/|R_opt|)/epsilon - t/epsilon].

    The bound is ``exp(-t)`` regardless of the other arguments; they are
    checked so the bound is only quoted where it applies.
    """
    if num_optimal < 1:
        raise ValueError("at least one candidate must be optimal")
    if num_optimal > num_candidates:
        raise ValueError("num_optimal cannot exceed num_candidates")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    return math.exp(-t)


def exp_mechanism_tail_threshold(scores, epsilon: float, t: float) -> float:
    """The score threshold the tail bound talks about, for a concrete score list."""
    scores = np.asarray(scores, dtype=float)
    best = scores.max()
    n_opt = int(np.sum(scores == best))
    return best - math.log(len(scores) / n_opt) / epsilon - t / epsilon


def laplace_noise(scale: float, rng: RngStream) -> float:
    if not scale > 0:
        raise ValueError(f"Laplace scale must be positive, got {scale}")
    return float(rng.laplace(scale))


def maximum_matching_size(graph: Graph) -> int:
    g = nx.Graph()
    g.add_nodes_from(range(graph.n))
    g.add_edges_from(graph.edges)
    return len(nx.max_weight_matching(g, maxcardinality=True))


def private_vc_size_estimate(graph: Graph, epsilon: float, rng: RngStream) -> float:
    """Twice the maximum matching size plus Laplace(2/epsilon) noise.

    One edge moves the maximum matching by at most one, so the statistic has
    sensitivity 2 and the release is epsilon-DP.  The noiseless value is within
    a factor 2 of the minimum vertex cover size.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    return 2 * maximum_matching_size(graph) + laplace_noise(2.0 / epsilon, rng)
