import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privcomb.audit import (
    FiniteDistribution,
    FractionPolicy,
    TranscriptBudgetExceeded,
    all_graphs,
    audit_pairs,
    brute_opt,
    coin_tail_bound,
    exact_output_distribution,
    fraction_tail_bound,
    hockey_stick_delta,
    max_log_ratio,
    simulate_coin_tail,
    simulate_fraction_tail,
    total_variation,
)
from privcomb.instances import Graph, gen_complete_graph, gen_star_graph, gen_two_clique_graph
from privcomb.rng import RngStream


def D(*ps):
    return FiniteDistribution(dict(enumerate(ps)))


def test_max_log_ratio_examples():
    assert max_log_ratio(D(0.5, 0.5), D(0.5, 0.5)) == 0.0
    assert max_log_ratio(D(0.75, 0.25), D(0.5, 0.5)) == pytest.approx(math.log(1.5))
    assert max_log_ratio(D(1.0, 0.0), D(0.0, 1.0)) == math.inf


def test_hockey_stick_examples():
    assert hockey_stick_delta(D(0.3, 0.7), D(0.3, 0.7), 0.4) == 0.0
    assert hockey_stick_delta(D(1.0, 0.0), D(0.0, 1.0), 2.0) == pytest.approx(1.0)
    assert hockey_stick_delta(D(0.8, 0.2), D(0.5, 0.5), 0.0) == pytest.approx(0.3)
    assert total_variation(D(0.8, 0.2), D(0.5, 0.5)) == pytest.approx(0.3)


@given(st.lists(st.floats(0.01, 1), min_size=2, max_size=6), st.lists(st.floats(0.01, 1), min_size=2, max_size=6), st.floats(0, 3))
def test_hockey_stick_monotone_in_eps(a, b, eps):
    k = min(len(a), len(b))
    pa = np.array(a[:k]) / sum(a[:k])
    pb = np.array(b[:k]) / sum(b[:k])
    dA, dB = D(*pa), D(*pb)
    assert hockey_stick_delta(dA, dB, eps + 0.5) <= hockey_stick_delta(dA, dB, eps) + 1e-12
    assert hockey_stick_delta(dA, dB, max_log_ratio(dA, dB)) <= 1e-9


def test_distribution_validation():
    with pytest.raises(ValueError):
        FiniteDistribution({0: 0.5, 1: 0.4})


def test_budget():
    with pytest.raises(TranscriptBudgetExceeded):
        exact_output_distribution("vc_unweighted", Graph(5, []), epsilon=1.0, budget=10)


def test_exact_distributions_sum_to_one():
    for mech, inst in [("vc_unweighted", gen_star_graph(4)), ("mincut_exact", gen_complete_graph(4))]:
        d = exact_output_distribution(mech, inst, epsilon=1.0)
        assert d.total() == pytest.approx(1.0, abs=1e-12)


def test_all_graphs_count():
    assert len(all_graphs(4)) == 64


def test_brute_opt_examples():
    assert brute_opt("vc", gen_star_graph(5))[0] == 1
    assert brute_opt("vc", gen_complete_graph(4))[0] == 3
    assert brute_opt("mincut", gen_two_clique_graph(4, 2))[0] == 2


def test_audit_catches_violation():
    rep = audit_pairs("vc_unweighted", all_graphs(3), "edge", 0.05, epsilon=1.0)
    assert not rep.passed
    assert rep.lines()[0].endswith("FAIL")


def test_coin_tail_examples():
    r = RngStream(1)
    assert simulate_coin_tail(0.0, 50, 0.0, 1000, r) == 0.0
    assert simulate_coin_tail(1.0, 50, 1.0, 1000, r) == 0.0


def test_coin_tail_adaptive_policy():
    # adversary raises p when the running total is small
    freq = simulate_coin_tail(lambda i, y: np.where(y < 2, 0.3, 0.05), 60, 2.0, 100_000, RngStream(3))
    b = coin_tail_bound(2.0)
    assert freq <= b + 3 * math.sqrt(b * (1 - b) / 100_000)


def test_fraction_tail_examples():
    r = RngStream(2)
    assert simulate_fraction_tail(FractionPolicy.constant(0.0), 50, 0.0, 100, r) == 0.0
    assert simulate_fraction_tail(FractionPolicy.constant(1.0), 50, 1.0, 100, r) == 0.0
    freq = simulate_fraction_tail(FractionPolicy.uniform(), 50, 4.0, 100_000, RngStream(4))
    b = fraction_tail_bound(4.0)
    assert freq <= b + 3 * math.sqrt(b * (1 - b) / 100_000)
