"""Dense spectral verification of the search-complexity premises.

The abstract search argument needs three things from the plain walk operator
U2 = S*C and the target states |t_m> (local uniform on the marked block):

  a) the start state (all-arcs uniform) lies in the search space X', defined
     as the span of all non-(+1) eigenvectors together with the start state;
  b) every candidate target state lies in X' too -- equivalently, its
     +1-eigenspace component points entirely along the start state;
  c) X' is invariant under one search iteration S*C*O_m, where O_m is the
     rank-one reflection about |t_m>.

Given those, the marked evolution is a rotation in X' whose speed is set by
sigma, the smallest nonzero eigenphase magnitude of U2 on X'.  Nothing here
is proved symbolically: the checks are dense-linear-algebra residual tests on
small networks, and sigma values are recorded as regression anchors.

Real Schur decomposition is used instead of a complex eigensolver: for an
orthogonal matrix it yields an orthonormal invariant basis (1x1 blocks for
eigenvalues +-1, 2x2 rotation blocks for conjugate pairs), which sidesteps
the ill-conditioned eigenvector bases a generic solver returns for highly
degenerate spectra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import CapacityError, ContractViolation, ParameterError
from .walk import ArcSpace, CoinSpec, full_uniform_state, grover_coin, marked_target_state, step

DENSE_CAP = 10_000  # largest arc count we will materialize as a matrix
ORTHOGONALITY_TOL = 1e-10
PLUS_ONE_PHASE_TOL = 1e-8
FACT1_TOL = 1e-8
PHASE_MULTIPLICITY_TOL = 1e-9


def dense_step_matrix(space: ArcSpace, coin: CoinSpec = CoinSpec()) -> np.ndarray:
    """The full 2E x 2E real matrix of one step (orthogonal by construction).

    The coin is the block-diagonal of +-Grover blocks; the shift permutes
    rows by arc reversal, so U = C with rows rearranged.
    """
    n_arcs = space.n_arcs
    if n_arcs > DENSE_CAP:
        raise CapacityError(
            f"{n_arcs} arcs exceeds the dense cap of {DENSE_CAP}"
        )
    coin_matrix = np.zeros((n_arcs, n_arcs))
    for node in range(space.n_nodes):
        block = space.block(node)
        d = block.stop - block.start
        sign = -1.0 if node == coin.marked else 1.0
        coin_matrix[block, block] = sign * grover_coin(d)
    return coin_matrix[space.reverse_index]


@dataclass
class SchurBasis:
    """Orthonormal invariant basis of a real orthogonal matrix.

    ``phases`` holds one eigenphase per basis column (2x2 rotation blocks
    contribute +theta and -theta on their two columns); ``plus_one`` flags
    columns belonging to the +1 eigenspace.
    """

    q: np.ndarray
    phases: np.ndarray
    plus_one: np.ndarray

    @property
    def plus_one_basis(self) -> np.ndarray:
        return self.q[:, self.plus_one]


def _schur_basis(matrix: np.ndarray) -> SchurBasis:
    t, q = scipy.linalg.schur(matrix, output="real")
    n = matrix.shape[0]
    phases = np.empty(n)
    i = 0
    while i < n:
        if i + 1 < n and abs(t[i + 1, i]) > 1e-12:
            # standardized 2x2 block [[a, b], [c, a]] with bc < 0:
            # eigenvalues a +- i*sqrt(-bc) = exp(+-i*theta) on the unit circle
            a = 0.5 * (t[i, i] + t[i + 1, i + 1])
            s = np.sqrt(max(-t[i, i + 1] * t[i + 1, i], 0.0))
            theta = np.arctan2(s, a)
            phases[i] = theta
            phases[i + 1] = -theta
            i += 2
        else:
            phases[i] = 0.0 if t[i, i] > 0 else np.pi
            i += 1
    plus_one = np.abs(phases) < PLUS_ONE_PHASE_TOL
    return SchurBasis(q=q, phases=phases, plus_one=plus_one)


@dataclass
class SpectralReport:
    eigenphases: np.ndarray  # sorted ascending, one entry per dimension
    phase_multiplicities: list[tuple[float, int]]
    sigma: float
    plus_one_dim: int
    degenerate_identity: bool  # no nonzero phase existed; sigma reported as 0
    start_plus_one_residual: float  # |U s - s| for the supplied start state
    start_overlap_plus_one: float  # squared projection of start onto +1 space
    # audit-only overlaps for other states of interest (e.g. the restricted
    # start, which is NOT a +1 eigenvector); recorded, never pass/fail
    audit_overlaps: dict[str, tuple[float, float]] | None = None  # (residual, overlap)


def _collapse_multiplicities(phases: np.ndarray) -> list[tuple[float, int]]:
    out: list[tuple[float, int]] = []
    for phase in phases:
        if out and abs(phase - out[-1][0]) <= PHASE_MULTIPLICITY_TOL:
            out[-1] = (out[-1][0], out[-1][1] + 1)
        else:
            out.append((float(phase), 1))
    return out


def eigen_analysis(
    matrix: np.ndarray,
    start_state: np.ndarray,
    audit_states: dict[str, np.ndarray] | None = None,
) -> SpectralReport:
    """Eigenphase spectrum, +1 eigenspace and the gap sigma on X'.

    sigma is the smallest nonzero eigenphase magnitude: exactly the rotation
    rate bound for states in X', since every non-(+1) eigenvector belongs to
    X' and the only +1 direction retained there is the start state itself.
    """
    n = matrix.shape[0]
    defect = np.max(np.abs(matrix.T @ matrix - np.eye(n)))
    if defect > ORTHOGONALITY_TOL:
        raise ContractViolation(
            f"matrix is not orthogonal (defect {defect:.3e})"
        )
    basis = _schur_basis(matrix)
    phases_sorted = np.sort(basis.phases)
    plus_one_dim = int(basis.plus_one.sum())
    nonzero = np.abs(basis.phases[~basis.plus_one])
    degenerate = nonzero.size == 0
    sigma = 0.0 if degenerate else float(nonzero.min())
    v1 = basis.plus_one_basis

    def residual_and_overlap(state: np.ndarray) -> tuple[float, float]:
        residual = float(np.linalg.norm(matrix @ state - state))
        overlap = float(np.sum((v1.T @ state) ** 2))
        return residual, overlap

    start_residual, start_overlap = residual_and_overlap(start_state)
    audit = None
    if audit_states is not None:
        audit = {name: residual_and_overlap(s) for name, s in audit_states.items()}
    return SpectralReport(
        eigenphases=phases_sorted,
        phase_multiplicities=_collapse_multiplicities(phases_sorted),
        sigma=sigma,
        plus_one_dim=plus_one_dim,
        degenerate_identity=degenerate,
        start_plus_one_residual=start_residual,
        start_overlap_plus_one=start_overlap,
        audit_overlaps=audit,
    )


@dataclass
class Fact1Result:
    """Residuals of the invariant-subspace checks for one marked candidate."""

    marked: int
    residual_start_in_xprime: float  # (a)
    residual_target_in_xprime: float  # (b)
    residual_closure_max: float  # (c), max over probes
    overlap_plus_one: float  # squared |t_m> projection onto the +1 eigenspace
    overlap_xprime: float  # squared |t_m> projection onto X'
    passed: bool


def verify_fact1(
    space: ArcSpace,
    marked_set: list[int] | None = None,
    probes: int = 10,
    seed: int = 0,
    tol: float = FACT1_TOL,
) -> list[Fact1Result]:
    """Residual checks (a)-(c) for every marked candidate.

    X' is materialized as an orthonormal basis: all non-(+1) Schur columns of
    the plain walk matrix plus the (re-orthonormalized) start state.  Closure
    probes draw seeded random unit vectors from X' and push them through one
    search iteration S*C*O_m using the fast engine.
    """
    matrix = dense_step_matrix(space, CoinSpec())
    basis = _schur_basis(matrix)
    start = full_uniform_state(space)

    non_plus = basis.q[:, ~basis.plus_one]
    # start is itself a +1 eigenvector, hence orthogonal to every non-(+1)
    # column; re-orthonormalize anyway so X' is exactly orthonormal.
    residual_vec = start - non_plus @ (non_plus.T @ start)
    xprime = np.column_stack([non_plus, residual_vec / np.linalg.norm(residual_vec)])
    v1 = basis.plus_one_basis

    def xprime_residual(vec: np.ndarray) -> float:
        return float(np.linalg.norm(vec - xprime @ (xprime.T @ vec)))

    if marked_set is None:
        marked_set = list(range(space.n_nodes))
    rng = np.random.default_rng(seed)
    results = []
    residual_a = xprime_residual(start)
    for marked in marked_set:
        if not 0 <= marked < space.n_nodes:
            raise ParameterError(f"marked node {marked} not in 0..{space.n_nodes - 1}")
        target = marked_target_state(space, marked)
        residual_b = xprime_residual(target)
        closure_max = 0.0
        for _ in range(probes):
            coeffs = rng.standard_normal(xprime.shape[1])
            probe = xprime @ coeffs
            probe /= np.linalg.norm(probe)
            reflected = probe - 2.0 * (target @ probe) * target  # O_m
            pushed = step(reflected, space, CoinSpec())  # then S*C
            closure_max = max(closure_max, xprime_residual(pushed))
        overlap_plus = float(np.sum((v1.T @ target) ** 2))
        overlap_x = float(np.sum((xprime.T @ target) ** 2))
        results.append(
            Fact1Result(
                marked=int(marked),
                residual_start_in_xprime=residual_a,
                residual_target_in_xprime=residual_b,
                residual_closure_max=closure_max,
                overlap_plus_one=overlap_plus,
                overlap_xprime=overlap_x,
                passed=max(residual_a, residual_b, closure_max) < tol,
            )
        )
    return results
