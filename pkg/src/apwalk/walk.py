"""Coined-walk state space over directed arcs and the per-step evolution.

The state lives on directed arcs: for every edge {i, j} there are two basis
states, written (i -> j) for "at node i, pointing at j".  Arcs are grouped by
tail node with heads ascending, so the arcs of node i occupy one contiguous
block of length d_i and the whole space is the direct sum of those blocks
(total dimension 2E).

One evolution step is U = S * C:

  * C applies the Grover diffusion coin G_d = 2/d * J - I inside every block
    (reflect about the block's uniform direction); the marked node's block
    uses -G_d instead, which is the only thing distinguishing a search run
    from a plain walk.
  * S is the flip-flop shift swapping (i -> j) with (j -> i).

Everything here is real-valued: S, the Grover blocks and the -1 flip are all
real matrices and every initial state used by the protocols is real, so the
engine stores plain float64 vectors.  (Spectral analysis, which needs the
complex eigenphases of SC, assembles dense matrices separately.)

Costs: one step is O(arc count) using a per-block running mean
(a <- 2*mean - a) and a precomputed arc-reversal permutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, ParameterError
from .graphs import ApollonianNetwork

NORM_TOL = 1e-10  # unit-norm drift allowed on states
EXACT_TOL = 1e-12  # algebraic identities (involutions, dense agreement)


@dataclass(frozen=True)
class CoinSpec:
    """Which node, if any, carries the negated coin."""

    marked: int | None = None


@dataclass
class ArcSpace:
    """Indexed directed-arc basis for a graph, plus the shift permutation.

    ``block_offset[i] : block_offset[i+1]`` slices the arcs with tail ``i``;
    ``heads`` within a block are ascending.  ``reverse_index`` maps each arc
    to its reversal and is a fixed-point-free involution (no self-loops).
    """

    graph: ApollonianNetwork
    tails: np.ndarray
    heads: np.ndarray
    block_offset: np.ndarray  # length n_nodes + 1
    reverse_index: np.ndarray
    _degrees: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self._degrees = np.diff(self.block_offset).astype(np.float64)

    @property
    def n_arcs(self) -> int:
        return len(self.tails)

    @property
    def n_nodes(self) -> int:
        return self.graph.n_nodes

    def block(self, node: int) -> slice:
        return slice(int(self.block_offset[node]), int(self.block_offset[node + 1]))

    def arcs_with_tail_in(self, nodes) -> np.ndarray:
        """Boolean arc mask selecting arcs whose tail lies in ``nodes``."""
        node_mask = np.zeros(self.n_nodes, dtype=bool)
        node_mask[np.asarray(list(nodes), dtype=np.int64)] = True
        return node_mask[self.tails]

    def arc_list(self, state: np.ndarray | None = None):
        """(tail, head[, amplitude]) triples for debugging dumps."""
        if state is None:
            return list(zip(self.tails.tolist(), self.heads.tolist()))
        return list(zip(self.tails.tolist(), self.heads.tolist(), state.tolist()))


def build_arc_space(graph: ApollonianNetwork) -> ArcSpace:
    """Arc order is fully determined by node ids and sorted adjacency."""
    n = graph.n_nodes
    block_offset = np.zeros(n + 1, dtype=np.int64)
    tails = []
    heads = []
    for i in range(n):
        nbrs = graph.adjacency[i]
        block_offset[i + 1] = block_offset[i] + len(nbrs)
        tails.extend([i] * len(nbrs))
        heads.extend(nbrs)
    tails_arr = np.array(tails, dtype=np.int64)
    heads_arr = np.array(heads, dtype=np.int64)
    # Index of arc (i -> j): block_offset[i] + rank of j within adjacency[i].
    # The reversal of arc k is then looked up in O(log d) per arc.
    reverse_index = np.empty(len(tails_arr), dtype=np.int64)
    for k in range(len(tails_arr)):
        i, j = tails_arr[k], heads_arr[k]
        base = block_offset[j]
        rank = np.searchsorted(heads_arr[base : block_offset[j + 1]], i)
        reverse_index[k] = base + rank
    return ArcSpace(
        graph=graph,
        tails=tails_arr,
        heads=heads_arr,
        block_offset=block_offset,
        reverse_index=reverse_index,
    )


def grover_coin(d: int) -> np.ndarray:
    """The d x d diffusion operator 2/d * J - I (symmetric, orthogonal, involutive)."""
    if d < 1:
        raise ParameterError("coin dimension must be >= 1")
    return np.full((d, d), 2.0 / d) - np.eye(d)


def _check_state(state: np.ndarray, space: ArcSpace) -> None:
    if state.shape != (space.n_arcs,):
        raise ContractViolation(
            f"state has shape {state.shape}, arc space expects ({space.n_arcs},)"
        )


def apply_coin(state: np.ndarray, space: ArcSpace, coin: CoinSpec = CoinSpec()) -> np.ndarray:
    """Blockwise a <- 2*mean(block) - a; the marked block is negated afterwards.

    Equals the dense block-diagonal matrix product to full precision but runs
    in O(arcs): the Grover reflection only needs each block's mean.
    """
    _check_state(state, space)
    means = np.add.reduceat(state, space.block_offset[:-1]) / space._degrees
    out = 2.0 * means[space.tails] - state
    if coin.marked is not None:
        if not 0 <= coin.marked < space.n_nodes:
            raise ParameterError(
                f"marked node {coin.marked} not in 0..{space.n_nodes - 1}"
            )
        out[space.block(coin.marked)] *= -1.0
    return out


def apply_shift(state: np.ndarray, space: ArcSpace) -> np.ndarray:
    """Flip-flop shift: the amplitude on (i -> j) moves to (j -> i)."""
    _check_state(state, space)
    return state[space.reverse_index]


def step(state: np.ndarray, space: ArcSpace, coin: CoinSpec = CoinSpec()) -> np.ndarray:
    """One evolution step U = S * C (coin first, then shift)."""
    return apply_coin(state, space, coin)[space.reverse_index]


def initial_state(space: ArcSpace, node_set) -> np.ndarray:
    """Equal superposition over all arcs whose tail lies in ``node_set``."""
    nodes = sorted(set(int(v) for v in node_set))
    if not nodes:
        raise ParameterError("node_set must be nonempty")
    if nodes[0] < 0 or nodes[-1] >= space.n_nodes:
        raise ParameterError(f"node ids must lie in 0..{space.n_nodes - 1}")
    mask = space.arcs_with_tail_in(nodes)
    m = int(mask.sum())
    state = np.zeros(space.n_arcs)
    state[mask] = 1.0 / np.sqrt(m)
    return state


def full_uniform_state(space: ArcSpace) -> np.ndarray:
    """Equal superposition over every arc; the +1 eigenvector of the plain walk."""
    return np.full(space.n_arcs, 1.0 / np.sqrt(space.n_arcs))


def marked_target_state(space: ArcSpace, marked: int) -> np.ndarray:
    """Local equal superposition on the marked node's block."""
    if not 0 <= marked < space.n_nodes:
        raise ParameterError(f"marked node {marked} not in 0..{space.n_nodes - 1}")
    state = np.zeros(space.n_arcs)
    block = space.block(marked)
    d = block.stop - block.start
    state[block] = 1.0 / np.sqrt(d)
    return state


def position_distribution(state: np.ndarray, space: ArcSpace) -> np.ndarray:
    """Per-node probability of measuring the position register: sum of squared
    amplitudes over each tail block."""
    _check_state(state, space)
    return np.add.reduceat(state * state, space.block_offset[:-1])
