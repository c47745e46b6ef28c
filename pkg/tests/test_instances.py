import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privcomb.audit import brute_opt
from privcomb.instances import (
    Graph,
    InstanceError,
    InstanceFormatError,
    MetricInstance,
    SetSystem,
    SubmodularInstance,
    TerminalPairs,
    WeightedGraph,
    dumps,
    gen_complete_graph,
    gen_coverage_instance,
    gen_grid_metric,
    gen_kmedian_lb_metric,
    gen_line_metric,
    gen_random_graph,
    gen_random_metric,
    gen_random_regular_graph,
    gen_random_set_system,
    gen_star_graph,
    gen_terminal_pairs,
    gen_two_clique_graph,
    gen_uniform_metric,
    gen_weighted_graph,
    instance_hash,
    load,
    loads,
    save,
)
from privcomb.kmedian import kmedian_cost
from privcomb.rng import RngStream


def test_graph_canonical():
    g = Graph(3, [(2, 0), (1, 2)])
    assert g.edges == ((0, 2), (1, 2))
    assert g.degrees() == [1, 1, 2]
    assert g.toggle(0, 1).m == 3 and g.toggle(0, 2).m == 1


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 1), (1, 0)], [(0, 5)]])
def test_graph_rejects(edges):
    with pytest.raises(InstanceError):
        Graph(3, edges)


def test_random_graph_extremes(rng):
    assert gen_random_graph(6, 0.0, rng).m == 0
    assert gen_random_graph(6, 1.0, rng).m == 15


def test_random_graph_edge_count():
    counts = [gen_random_graph(50, 0.1, RngStream(s)).m for s in range(40)]
    sd = math.sqrt(1225 * 0.1 * 0.9 / len(counts))
    assert abs(np.mean(counts) - 122.5) <= 3 * sd


def test_star():
    assert gen_star_graph(2).edges == ((0, 1),)
    g = gen_star_graph(4)
    assert g.m == 3 and all(0 in e for e in g.edges)
    assert brute_opt("vc", gen_star_graph(7))[0] == 1


@pytest.mark.parametrize("s,b,cut", [(4, 2, 2), (3, 0, 0), (2, 1, 1)])
def test_two_clique_min_cut(s, b, cut):
    g = gen_two_clique_graph(s, b)
    assert g.n == 2 * s
    assert brute_opt("mincut", g)[0] == cut


def test_uniform_metric():
    m = gen_uniform_metric(3, 1.0)
    assert m.diameter == 1.0
    assert gen_uniform_metric(1).n == 1
    m5 = gen_uniform_metric(5, 2.0)
    assert kmedian_cost(m5, {2}) == 4 * 2.0


def test_metric_rejects():
    with pytest.raises(InstanceError):
        MetricInstance.from_matrix([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(InstanceError):
        MetricInstance.from_matrix([[0, 0.5], [0.5, 0]])
    with pytest.raises(InstanceError):
        MetricInstance.from_matrix([[0, 1], [2, 0]])


def test_metric_no_warnings():
    with np.errstate(all="raise"):
        gen_grid_metric(3, 3)


def test_weighted_graph_normalized():
    w = WeightedGraph.normalized(Graph(2, [(0, 1)]), [4.0, 2.0])
    assert w.weights == (2.0, 1.0)
    with pytest.raises(InstanceError):
        WeightedGraph(Graph(2, []), (0.5, 1.0))


def test_set_system_feasibility():
    with pytest.raises(InstanceError):
        SetSystem(3, (frozenset({0}),), frozenset({2}))
    s = SetSystem(3, (frozenset({0}), frozenset({1, 2})), frozenset({2}), (4.0, 2.0))
    c, scale = s.normalized_costs()
    assert scale == 2.0 and list(c) == [2.0, 1.0]


def test_coverage_normalization():
    inst = SubmodularInstance(2, (frozenset({0}), frozenset({1})), (frozenset({0}), frozenset({1})))
    assert inst.agent_values([0]).tolist() == [1.0, 0.0]
    assert inst.agent_values([0, 1]).sum() == 2.0
    with pytest.raises(InstanceError):
        SubmodularInstance(3, (frozenset({0}),), (frozenset({2}),))


def test_terminal_pairs_rejects():
    with pytest.raises(InstanceError):
        TerminalPairs(gen_line_metric(3), ((1, 1),))


def _all_kinds():
    r = RngStream(3)
    g = gen_random_graph(7, 0.4, r.child(0))
    return [
        g,
        gen_weighted_graph(g, [1.0, 2.5, 8.0], r.child(1)),
        gen_random_metric(6, r.child(2)),
        gen_terminal_pairs(gen_grid_metric(2, 3), 3, r.child(3)),
        gen_random_set_system(8, 5, r.child(4), costs=[1.0, 2.0, 3.5, 1.0, 7.0]),
        gen_random_set_system(8, 5, r.child(5), covered_fraction=0.0),
        gen_coverage_instance(5, 9, 4, r.child(6)),
        gen_kmedian_lb_metric(2, 3),
        gen_random_regular_graph(8, 3, r.child(7)),
        gen_complete_graph(1),
    ]


@pytest.mark.parametrize("inst", _all_kinds(), ids=lambda x: type(x).__name__)
def test_round_trip(inst, tmp_path):
    text = dumps(inst)
    assert loads(text) == inst
    assert dumps(loads(text)) == text
    save(inst, tmp_path / "x.txt")
    assert load(tmp_path / "x.txt") == inst
    assert instance_hash(inst) == instance_hash(loads(text))


@given(st.integers(1, 9), st.floats(0, 1), st.integers(0, 2**32))
@settings(max_examples=40, deadline=None)
def test_graph_round_trip_property(n, p, seed):
    g = gen_random_graph(n, p, RngStream(seed))
    assert loads(dumps(g)) == g


def test_comments_and_blank_lines():
    text = "privcomb-instance v1\n# hello\ntype graph\n\nn 3  # three\nedge 0 1\nend\n"
    assert loads(text) == Graph(3, [(0, 1)])


@pytest.mark.parametrize(
    "text,field",
    [
        ("privcomb-instance v1\ntype graph\nn x\nend\n", "n"),
        ("privcomb-instance v1\ntype graph\nn 3\nedge 0\nend\n", "edge[0]"),
        ("privcomb-instance v1\ntype graph\nn 3\nrow 0\nend\n", "row"),
        ("privcomb-instance v1\ntype blob\nend\n", "type"),
    ],
)
def test_format_errors_name_field(text, field):
    with pytest.raises(InstanceFormatError) as e:
        loads(text)
    assert e.value.field == field


def test_format_errors_header_and_end():
    with pytest.raises(InstanceFormatError):
        loads("type graph\nn 1\nend\n")
    with pytest.raises(InstanceFormatError):
        loads("privcomb-instance v1\ntype graph\nn 1\n")


def test_triangle_violation_in_text():
    text = "privcomb-instance v1\ntype metric\nn 3\nrow 0 1 5\nrow 1 0 1\nrow 5 1 0\ndemands\nend\n"
    with pytest.raises(InstanceError):
        loads(text)


def test_uncoverable_in_text():
    text = "privcomb-instance v1\ntype set_system\nn 3\nset 0 1\ncovered 2\nend\n"
    with pytest.raises(InstanceError) as e:
        loads(text)
    assert e.value.field == "covered"
