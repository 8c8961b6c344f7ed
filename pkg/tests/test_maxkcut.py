import itertools

import numpy as np
import pytest

from chargeq.ansatz import QaoaParams, ansatz_state, make_layered_family
from chargeq.classical import brute_maxkcut
from chargeq.instances import gen_sc1
from chargeq.maxkcut import (
    analytic_p1,
    apply_gate_list,
    cost_diagonal,
    decode_assignment,
    gate_counts,
    gates_to_qasm,
    qaoa_expectation,
    run_qaoa_maxkcut,
    synthesize_circuit,
)
from chargeq.optimizers import DEOptions, EggOptions
from chargeq.reduction import WeightedGraph, cut_value, normalize, sc1_to_graph
from chargeq.statevector import apply_phase, expectation, init_uniform, sample

from conftest import random_complete_graph


def test_cost_diagonal_k2_single_edge():
    g = WeightedGraph.complete(2)
    cost = cost_diagonal(g, 2)
    assert cost.values.tolist() == [0.0, -1.0, -1.0, 0.0]


def test_cost_diagonal_k4_single_edge():
    # Oracle: enumerate all 16 basis states of the two 2-bit colors.
    g = WeightedGraph.complete(2)
    cost = cost_diagonal(g, 4)
    for z in range(16):
        c0, c1 = decode_assignment(z, 2, 4)
        assert cost.values[z] == (-1.0 if c0 != c1 else 0.0)
    assert (cost.values == -1.0).sum() == 12
    assert (cost.values == 0.0).sum() == 4


@pytest.mark.parametrize("k", [2, 4])
def test_cost_diagonal_minimum_is_brute_force_optimum(record_pool, k):
    for seed in (0, 1, 2):
        g = sc1_to_graph(gen_sc1(record_pool, 5, k, seed=seed))
        cost = cost_diagonal(g, k)
        value, _ = brute_maxkcut(g, k)
        assert cost.minimum == pytest.approx(-value)


def test_cost_diagonal_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        cost_diagonal(WeightedGraph.complete(3), 3)


def test_qaoa_expectation_zero_beta_uniform(record_pool):
    g = sc1_to_graph(gen_sc1(record_pool, 5, 2, seed=4))
    for k in (2, 4):
        got = qaoa_expectation(g, k, QaoaParams([0.7, 1.1], [0.0, 0.0]))
        assert got == pytest.approx((1 - 1 / k) * g.w_total)


def test_analytic_p1_beta_zero():
    g = random_complete_graph(6, seed=0)
    assert analytic_p1(g, 1.3, 0.0) == pytest.approx(g.w_total / 2)


def test_analytic_p1_k2_closed_form_point():
    g = WeightedGraph.complete(2)
    assert analytic_p1(g, np.pi / 2, np.pi / 8) == pytest.approx(1.0)


def test_analytic_p1_matches_simulator(record_pool):
    rng = np.random.default_rng(7)
    for n in range(4, 9):
        g = random_complete_graph(n, seed=n)
        for _ in range(4):
            gamma = rng.uniform(0, 2 * np.pi)
            beta = rng.uniform(0, np.pi)
            sim = qaoa_expectation(g, 2, QaoaParams([gamma], [beta]))
            assert abs(analytic_p1(g, gamma, beta) - sim) < 1e-9


def test_analytic_p1_zero_weight_edges_consistent():
    # Non-complete graph: zero-weight pairs act as unit cosine factors.
    g = WeightedGraph.from_edges(4, [(0, 1, 0.8), (2, 3, 0.5)])
    sim = qaoa_expectation(g, 2, QaoaParams([0.9], [0.4]))
    assert abs(analytic_p1(g, 0.9, 0.4) - sim) < 1e-9


def test_synthesize_circuit_counts_k4():
    g = WeightedGraph.complete(2)
    gates = synthesize_circuit(g, 4, gamma=0.5)
    counts = gate_counts(gates)
    assert counts == {"CNOT": 10, "RZ": 3}


def test_synthesize_circuit_counts_complete_graph_k4():
    n = 4
    g = WeightedGraph.complete(n)
    counts = gate_counts(synthesize_circuit(g, 4, gamma=0.3))
    edges = n * (n - 1) // 2
    assert counts["CNOT"] == 10 * edges
    assert counts["RZ"] == 3 * edges


def test_synthesize_circuit_gamma_zero_identity():
    g = WeightedGraph.complete(3)
    gates = synthesize_circuit(g, 4, gamma=0.0)
    assert all(gate.angle == 0.0 for gate in gates if gate.name == "RZ")
    state = init_uniform(6)
    apply_gate_list(state, gates)
    assert np.allclose(state.amps, init_uniform(6).amps, atol=1e-12)


@pytest.mark.parametrize("k,n", [(2, 4), (4, 3)])
def test_synthesized_layer_matches_diagonal_phase(k, n):
    g = random_complete_graph(n, seed=10 + k)
    gamma = 0.83
    circuit_state = init_uniform(n * (1 if k == 2 else 2))
    apply_gate_list(circuit_state, synthesize_circuit(g, k, gamma))
    phase_state = init_uniform(circuit_state.n_qubits)
    apply_phase(phase_state, cost_diagonal(g, k), gamma)
    fidelity = abs(np.vdot(circuit_state.amps, phase_state.amps))
    assert fidelity > 1 - 1e-9


def test_synthesize_circuit_rejects_unsupported_k():
    with pytest.raises(ValueError):
        synthesize_circuit(WeightedGraph.complete(3), 8, 0.1)


def test_qasm_export_shape():
    g = WeightedGraph.complete(2)
    text = gates_to_qasm(synthesize_circuit(g, 2, 0.25), n_qubits=2)
    lines = text.strip().splitlines()
    assert lines[0] == "OPENQASM 2.0;"
    assert lines[2] == "qreg q[2];"
    assert sum(1 for ln in lines if ln.startswith("cx")) == 2
    assert sum(1 for ln in lines if ln.startswith("rz")) == 1


def test_color_permutation_symmetry():
    # Flipping every color bit relabels colors; the expectation is unchanged
    # because the decoding permutation commutes with the diagonal.
    g = random_complete_graph(4, seed=3)
    cost = cost_diagonal(g, 4)
    perm = np.arange(cost.values.size) ^ (cost.values.size - 1)  # flip all bits
    assert np.array_equal(cost.values, cost.values[perm])


def test_best_sampled_never_exceeds_optimum(record_pool):
    g = sc1_to_graph(gen_sc1(record_pool, 6, 2, seed=6))
    optimum, _ = brute_maxkcut(g, 2)
    work, scale = normalize(g)
    res = run_qaoa_maxkcut(
        work,
        2,
        2,
        opts=EggOptions(de=DEOptions(pop=10, max_gens=12, budget=200), polish=None),
        seed=0,
        optimum=optimum,
        scale=scale,
        shots=256,
    )
    bitstr, value = res.best_sampled
    assert value <= optimum + 1e-9
    labels = decode_assignment(int(bitstr[::-1], 2), g.n, 2)
    assert cut_value(g, labels) == pytest.approx(value)


def test_run_qaoa_maxkcut_trace_fields(record_pool):
    g = sc1_to_graph(gen_sc1(record_pool, 5, 2, seed=9))
    work, scale = normalize(g)
    optimum, _ = brute_maxkcut(g, 2)
    res = run_qaoa_maxkcut(
        work,
        2,
        3,
        opts=EggOptions(de=DEOptions(pop=10, max_gens=10, budget=150), polish_budget=100),
        seed=1,
        optimum=optimum,
        scale=scale,
    )
    assert len(res.per_layer_trace) == 3
    assert all(0.0 <= t["ratio"] <= 1.0 + 1e-9 for t in res.per_layer_trace)
    assert res.evals == sum(t["evals"] for t in res.per_layer_trace)
    # de-normalized expectation: ratio * optimum recovers the cut value
    final = res.per_layer_trace[-1]
    assert final["expectation"] == pytest.approx(final["ratio"] * optimum)
