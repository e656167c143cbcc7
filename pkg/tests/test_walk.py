"""Arc space, coin/shift operators, and fast-vs-dense evolution equivalence."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import apwalk as ap
from apwalk.errors import ContractViolation, ParameterError
from apwalk.walk import EXACT_TOL, NORM_TOL

from conftest import get_graph, get_space


def random_unit_state(space, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(space.n_arcs)
    return v / np.linalg.norm(v)


def dense_coin_matrix(space, coin):
    out = np.zeros((space.n_arcs, space.n_arcs))
    for node in range(space.n_nodes):
        block = space.block(node)
        d = block.stop - block.start
        sign = -1.0 if node == coin.marked else 1.0
        out[block, block] = sign * ap.grover_coin(d)
    return out


# -- grover_coin ---------------------------------------------------------------


def test_grover_coin_small_cases():
    assert np.array_equal(ap.grover_coin(1), np.array([[1.0]]))
    assert np.array_equal(ap.grover_coin(2), np.array([[0.0, 1.0], [1.0, 0.0]]))
    g3 = ap.grover_coin(3)
    assert np.allclose(np.diag(g3), -1.0 / 3.0, atol=0)
    off = g3[~np.eye(3, dtype=bool)]
    assert np.allclose(off, 2.0 / 3.0, atol=0)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8])
def test_grover_coin_symmetric_orthogonal_involutive(d):
    g = ap.grover_coin(d)
    assert np.max(np.abs(g - g.T)) == 0
    assert np.max(np.abs(g @ g - np.eye(d))) < EXACT_TOL


def test_grover_coin_fixes_uniform():
    u = np.full(5, 1.0 / math.sqrt(5))
    assert np.max(np.abs(ap.grover_coin(5) @ u - u)) < EXACT_TOL


def test_grover_coin_rejects_nonpositive():
    with pytest.raises(ParameterError):
        ap.grover_coin(0)
    with pytest.raises(ParameterError):
        ap.grover_coin(-2)


# -- arc space -----------------------------------------------------------------


def test_arc_counts():
    assert get_space(4).n_arcs == 246
    assert get_space(0).n_arcs == 6


def test_k0_reverse_index_pairs_edges():
    space = get_space(0)
    rev = space.reverse_index
    assert np.array_equal(rev[rev], np.arange(6))
    assert not np.any(rev == np.arange(6))  # no fixed points
    for a in range(6):
        assert space.tails[a] == space.heads[rev[a]]
        assert space.heads[a] == space.tails[rev[a]]


def test_k2_block_sizes_are_degrees():
    space = get_space(2)
    sizes = np.diff(space.block_offset)
    assert sorted(sizes.tolist()) == [3, 3, 3, 5, 5, 5, 6]
    assert sizes.tolist() == get_graph(2).degrees.tolist()


@given(st.integers(min_value=0, max_value=4))
def test_arc_space_invariants(generation):
    space = get_space(generation)
    graph = space.graph
    assert space.n_arcs == 2 * graph.n_edges
    rev = space.reverse_index
    assert np.array_equal(rev[rev], np.arange(space.n_arcs))
    assert not np.any(rev == np.arange(space.n_arcs))
    # grouped by tail, heads ascending within a block
    for node in range(graph.n_nodes):
        block = space.block(node)
        assert np.all(space.tails[block] == node)
        heads = space.heads[block]
        assert np.all(np.diff(heads) > 0)
        assert heads.tolist() == graph.adjacency[node]


def test_arc_list_debug_dump():
    space = get_space(0)
    triples = space.arc_list(ap.full_uniform_state(space))
    assert len(triples) == 6
    tails = [t for t, _, _ in triples]
    heads = [h for _, h, _ in triples]
    assert tails == [0, 0, 1, 1, 2, 2]
    assert heads == [1, 2, 0, 2, 0, 1]
    assert all(abs(a - 1 / math.sqrt(6)) < 1e-15 for _, _, a in triples)


# -- coin application ------------------------------------------------------------


def test_apply_coin_uniform_unmarked_unchanged():
    space = get_space(2)
    u = ap.full_uniform_state(space)
    assert np.max(np.abs(ap.apply_coin(u, space) - u)) < EXACT_TOL


def test_apply_coin_localized_block_values():
    # Amplitude 1 on the first arc of an unmarked degree-3 node of the K=1
    # graph maps to (-1/3, 2/3, 2/3) within that block and 0 elsewhere.
    space = get_space(1)
    state = np.zeros(space.n_arcs)
    block = space.block(3)  # node 3 has degree 3
    state[block.start] = 1.0
    out = ap.apply_coin(state, space)
    assert np.allclose(out[block], [-1 / 3, 2 / 3, 2 / 3], atol=EXACT_TOL)
    mask = np.ones(space.n_arcs, dtype=bool)
    mask[block] = False
    assert np.max(np.abs(out[mask])) == 0

    flipped = ap.apply_coin(state, space, ap.CoinSpec(marked=3))
    assert np.allclose(flipped[block], [1 / 3, -2 / 3, -2 / 3], atol=EXACT_TOL)


@pytest.mark.parametrize("generation", [0, 1, 2, 3])
@pytest.mark.parametrize("marked", [None, 0])
def test_apply_coin_equals_dense_blocks(generation, marked):
    space = get_space(generation)
    coin = ap.CoinSpec(marked=marked)
    dense = dense_coin_matrix(space, coin)
    for seed in range(5):
        v = random_unit_state(space, seed)
        assert np.max(np.abs(ap.apply_coin(v, space, coin) - dense @ v)) < EXACT_TOL


def test_apply_coin_errors():
    space = get_space(1)
    with pytest.raises(ContractViolation):
        ap.apply_coin(np.zeros(5), space)
    with pytest.raises(ParameterError):
        ap.apply_coin(ap.full_uniform_state(space), space, ap.CoinSpec(marked=99))


# -- shift -----------------------------------------------------------------------


def test_shift_moves_single_arc():
    space = get_space(0)
    state = np.zeros(space.n_arcs)
    # arc 0 is (0 -> 1); its reverse is (1 -> 0)
    state[0] = 1.0
    out = ap.apply_shift(state, space)
    idx = int(np.flatnonzero(out)[0])
    assert (space.tails[idx], space.heads[idx]) == (1, 0)
    assert out[idx] == 1.0


def test_shift_involution_and_uniform_fixed():
    space = get_space(2)
    v = random_unit_state(space, 7)
    assert np.max(np.abs(ap.apply_shift(ap.apply_shift(v, space), space) - v)) == 0
    u = ap.full_uniform_state(space)
    assert np.max(np.abs(ap.apply_shift(u, space) - u)) < EXACT_TOL


# -- step ------------------------------------------------------------------------


def test_step_uniform_fixed_point():
    space = get_space(3)
    u = ap.full_uniform_state(space)
    assert np.max(np.abs(ap.step(u, space) - u)) < EXACT_TOL


def test_step_composes_coin_then_shift():
    space = get_space(1)
    state = np.zeros(space.n_arcs)
    state[space.block(3).start] = 1.0
    expected = ap.apply_shift(ap.apply_coin(state, space), space)
    assert np.array_equal(ap.step(state, space), expected)
    # the coin example's block amplitudes land on the reversed arcs
    rev_of_block = space.reverse_index[space.block(3)]
    assert np.allclose(expected[rev_of_block], [-1 / 3, 2 / 3, 2 / 3], atol=EXACT_TOL)


def test_norm_drift_over_ten_thousand_steps():
    space = get_space(4)
    coin = ap.CoinSpec(marked=20)
    state = ap.full_uniform_state(space)
    for _ in range(10_000):
        state = ap.step(state, space, coin)
    assert abs(np.linalg.norm(state) - 1.0) < 1e-9


@given(st.integers(min_value=0, max_value=3), st.integers(min_value=0, max_value=10**6))
def test_operators_preserve_norm(generation, seed):
    space = get_space(generation)
    v = random_unit_state(space, seed)
    marked = seed % space.n_nodes
    for out in (
        ap.apply_coin(v, space),
        ap.apply_coin(v, space, ap.CoinSpec(marked=marked)),
        ap.apply_shift(v, space),
        ap.step(v, space, ap.CoinSpec(marked=marked)),
    ):
        assert abs(np.linalg.norm(out) - 1.0) < NORM_TOL


def test_involutions_on_random_states():
    # S o S = identity and C o C = identity (marked or unmarked), 100 states.
    for generation in (1, 2, 3, 4):
        space = get_space(generation)
        for seed in range(25):
            v = random_unit_state(space, seed)
            assert np.max(np.abs(ap.apply_shift(ap.apply_shift(v, space), space) - v)) < EXACT_TOL
            cc = ap.apply_coin(ap.apply_coin(v, space), space)
            assert np.max(np.abs(cc - v)) < EXACT_TOL
            coin = ap.CoinSpec(marked=seed % space.n_nodes)
            mm = ap.apply_coin(ap.apply_coin(v, space, coin), space, coin)
            assert np.max(np.abs(mm - v)) < EXACT_TOL


# -- initial / target states ------------------------------------------------------


def test_initial_state_examples():
    space4 = get_space(4)
    full = ap.initial_state(space4, range(space4.n_nodes))
    assert np.allclose(full, 1.0 / math.sqrt(246), atol=0)
    assert np.max(np.abs(full - ap.full_uniform_state(space4))) == 0

    last = ap.initial_state(space4, space4.graph.last_generation_nodes())
    support = np.flatnonzero(last)
    assert len(support) == 81
    assert np.allclose(last[support], 1.0 / 9.0, atol=1e-15)

    space2 = get_space(2)
    centre = ap.initial_state(space2, [3])
    assert np.count_nonzero(centre) == 6
    assert np.allclose(centre[space2.block(3)], 1.0 / math.sqrt(6), atol=1e-15)


def test_initial_state_errors():
    space = get_space(2)
    with pytest.raises(ParameterError):
        ap.initial_state(space, [])
    with pytest.raises(ParameterError):
        ap.initial_state(space, [99])


def test_marked_target_state():
    space = get_space(2)
    t_last = ap.marked_target_state(space, 6)  # degree 3
    assert np.count_nonzero(t_last) == 3
    assert np.allclose(t_last[space.block(6)], 1 / math.sqrt(3), atol=1e-15)
    t_centre = ap.marked_target_state(space, 3)  # degree 6
    assert np.count_nonzero(t_centre) == 6
    assert np.allclose(t_centre[space.block(3)], 1 / math.sqrt(6), atol=1e-15)


@given(st.integers(min_value=0, max_value=3))
def test_target_overlap_with_full_uniform(generation):
    # <t_m | full uniform> = sqrt(d_m / 2E) for every node
    space = get_space(generation)
    full = ap.full_uniform_state(space)
    for m in range(space.n_nodes):
        t = ap.marked_target_state(space, m)
        d = space.graph.degree(m)
        assert abs(float(t @ full) - math.sqrt(d / space.n_arcs)) < 1e-14


# -- position distribution ---------------------------------------------------------


def test_position_distribution_uniform():
    space = get_space(2)
    p = ap.position_distribution(ap.full_uniform_state(space), space)
    expected = space.graph.degrees / space.n_arcs
    assert np.max(np.abs(p - expected)) < 1e-14
    assert abs(p.sum() - 1.0) < 1e-10


def test_position_distribution_target():
    space = get_space(2)
    p = ap.position_distribution(ap.marked_target_state(space, 5), space)
    assert abs(p[5] - 1.0) < 1e-14
    assert np.max(np.abs(np.delete(p, 5))) == 0


def test_position_distribution_one_step_matches_dense():
    # One step from the restricted init at K=2 against the 30-dimensional
    # dense operator.
    space = get_space(2)
    init = ap.initial_state(space, space.graph.last_generation_nodes())
    coin = ap.CoinSpec(marked=4)
    dense = ap.dense_step_matrix(space, coin)
    fast = ap.step(init, space, coin)
    assert np.max(np.abs(dense @ init - fast)) < EXACT_TOL
    p_fast = ap.position_distribution(fast, space)
    p_dense = ap.position_distribution(dense @ init, space)
    assert np.max(np.abs(p_fast - p_dense)) < EXACT_TOL


# -- orbit symmetry -----------------------------------------------------------------


def test_k2_generation2_nodes_have_identical_traces():
    # The three generation-2 nodes are related by the triangle symmetry, so
    # marking any of them produces the same position-probability trace.
    space = get_space(2)
    traces = []
    for marked in space.graph.last_generation_nodes():
        state = ap.full_uniform_state(space)
        coin = ap.CoinSpec(marked=marked)
        rows = []
        for _ in range(50):
            state = ap.step(state, space, coin)
            rows.append(ap.position_distribution(state, space)[marked])
        traces.append(np.array(rows))
    assert np.max(np.abs(traces[0] - traces[1])) < 1e-10
    assert np.max(np.abs(traces[0] - traces[2])) < 1e-10
