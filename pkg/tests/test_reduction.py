import itertools
import math

import numpy as np
import pytest

from chargeq.classical import schedule_cost
from chargeq.instances import SC1Instance, SC2Instance, gen_sc1
from chargeq.reduction import (
    GraphError,
    WeightedGraph,
    cut_value,
    graph_from_edge_list,
    graph_from_json,
    graph_to_edge_list,
    graph_to_json,
    normalize,
    sc1_to_graph,
    sc2_to_graph,
)


def test_weighted_graph_validation():
    with pytest.raises(GraphError):
        WeightedGraph(np.array([[0.0, 1.0], [2.0, 0.0]]))  # asymmetric
    with pytest.raises(GraphError):
        WeightedGraph(np.array([[1.0, 0.0], [0.0, 0.0]]))  # diagonal
    with pytest.raises(GraphError):
        WeightedGraph(np.array([[0.0, -1.0], [-1.0, 0.0]]))  # negative


def test_sc1_to_graph_min_product():
    inst = SC1Instance(jobs=((2, 1), (1, 2)), k=1, seed=0)
    g = sc1_to_graph(inst)
    assert g.weights[0, 1] == min(1 * 1, 2 * 2) == 1


def test_sc1_to_graph_identical_jobs():
    inst = SC1Instance(jobs=((3, 2),) * 4, k=2, seed=0)
    g = sc1_to_graph(inst)
    off_diag = g.weights[~np.eye(4, dtype=bool)]
    assert np.all(off_diag == 6.0)


def test_sc1_graph_symmetry_structural(record_pool):
    g = sc1_to_graph(gen_sc1(record_pool, 12, 2, seed=3))
    assert np.array_equal(g.weights, g.weights.T)


@pytest.mark.parametrize("k", [2, 3])
def test_schedule_cut_duality_exhaustive(record_pool, k):
    # For every assignment: schedule cost == sum(w t) + W_total - cut.
    inst = gen_sc1(record_pool, 6, k, seed=8)
    g = sc1_to_graph(inst)
    fixed = sum(w * t for t, w in inst.jobs)
    w_total = g.w_total
    for labels in itertools.product(range(k), repeat=inst.n):
        cost = schedule_cost(inst, labels).total
        cut = cut_value(g, np.array(labels))
        assert cost == fixed + w_total - cut


def test_sc2_to_graph_clauses():
    # same group, disjoint -> edge; overlap, different groups -> edge;
    # touching endpoints, different groups -> no edge.
    inst = SC2Instance(
        intervals=((0, 10, 0), (20, 30, 0), (25, 40, 1), (40, 50, 1)),
        n_groups=2,
        group_size=2,
        seed=0,
    )
    g = sc2_to_graph(inst)
    adj = g.adjacency()
    assert adj[0, 1]  # disjoint but same group
    assert adj[1, 2]  # overlapping, different groups
    assert adj[2, 3]  # touching endpoints but same group
    inst2 = SC2Instance(
        intervals=((0, 10, 0), (10, 20, 1)), n_groups=2, group_size=1, seed=0
    )
    assert not sc2_to_graph(inst2).adjacency()[0, 1]  # touching, open intervals


def test_sc2_groups_induce_cliques(record_pool):
    from chargeq.instances import gen_sc2

    inst = gen_sc2(record_pool, 4, 3, seed=11)
    g = sc2_to_graph(inst)
    adj = g.adjacency()
    for grp in range(4):
        members = [i for i, (_, _, gl) in enumerate(inst.intervals) if gl == grp]
        for a, b in itertools.combinations(members, 2):
            assert adj[a, b]


def test_normalize_formula():
    g = WeightedGraph.complete(4, weight=2.0)
    _, s = normalize(g)
    assert s == pytest.approx(math.pi / 4)  # 2*pi / (2 * 16 / 4)


def test_normalize_idempotent_up_to_recompute():
    g = WeightedGraph.complete(5, weight=3.0)
    g1, s1 = normalize(g)
    _, s2 = normalize(g1)
    # after renormalizing, the implied phase bound is one full turn again
    assert s2 * g1.w_max * g1.n**2 / 4 == pytest.approx(2 * math.pi)


def test_normalize_rejects_zero_graph():
    with pytest.raises(GraphError):
        normalize(WeightedGraph(np.zeros((3, 3))))


def test_normalize_preserves_argmax(record_pool):
    from chargeq.classical import brute_maxkcut

    g = sc1_to_graph(gen_sc1(record_pool, 6, 2, seed=2))
    gn, s = normalize(g)
    v_raw, a_raw = brute_maxkcut(g, 2)
    v_norm, a_norm = brute_maxkcut(gn, 2)
    assert np.array_equal(a_raw, a_norm)
    assert v_norm == pytest.approx(v_raw * s)


def test_graph_serialization_roundtrip(record_pool):
    g = sc1_to_graph(gen_sc1(record_pool, 5, 2, seed=13))
    g2 = graph_from_json(graph_to_json(g))
    assert np.allclose(g.weights, g2.weights)
    g3 = graph_from_edge_list(graph_to_edge_list(g))
    assert np.allclose(g.weights, g3.weights)
