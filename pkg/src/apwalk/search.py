"""Search experiments: traces, the restricted protocol, sweeps, peaks, scaling.

Two experiment families are supported:

  * full-network search -- mark any node, evolve from the all-arcs uniform
    state, and watch the raw probability of measuring the marked position.
    Averaged over the nodes of one generation, these curves peak at very
    different steps for different generations, which is why a single fixed
    measurement time cannot serve arbitrary marked nodes.

  * restricted search -- the marked node is promised to lie in the newest
    generation.  Evolve, then *project* onto the subspace of last-generation
    positions (measurement with post-selection; the success probability sits
    near one half at the optimal step) and measure the position register.
    Because no two last-generation nodes are adjacent, a failed projection is
    retried once after a single shift, which moves the mass sitting on arcs
    that point *at* last-generation nodes into the subspace.

A note on the protocol's starting state: the evolution starts from the
*full* uniform superposition (every arc equally weighted).  That state is the
unique common +1 eigenvector of shift and coin, which is what makes the
marked-coin dynamics a slow rotation towards the target; starting from the
restricted superposition instead puts most of the weight on fast eigenphases
and the characteristic sqrt(N_last) peak never forms (see the spectral
module for the eigenspace checks).  ``InitSet.LAST_GENERATION`` is still
available for experiments on the restricted start.

Peak times follow T(K) ~ alpha * 3**(K/2), i.e. alpha * sqrt(N_last):
a quadratic speed-up over classical exhaustive search of the last
generation.  ``fit_alpha`` performs that one-parameter least-squares fit.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegenerateProjectionError, ParameterError
from .graphs import ApollonianNetwork, build_apollonian
from .walk import (
    ArcSpace,
    CoinSpec,
    apply_coin,
    build_arc_space,
    initial_state,
    full_uniform_state,
)

MAX_STEPS = 10**6
# Below this mass a projection is treated as impossible and the conditional
# distribution as undefined.
PROJECTION_EPS = 1e-15
PEAK_TIE_TOL = 1e-9


class InitSet(str, Enum):
    FULL = "full"
    LAST_GENERATION = "last"


class Channel(str, Enum):
    RAW = "raw"
    CONDITIONAL = "conditional"


class MarkedSet(str, Enum):
    ALL = "all"
    LAST_GENERATION = "last"


@dataclass(frozen=True)
class SearchConfig:
    generation: int
    marked: int
    steps: int
    init_set: InitSet = InitSet.FULL
    record_every: int = 1

    def __post_init__(self):
        if self.steps < 0 or self.steps > MAX_STEPS:
            raise ParameterError(f"steps must lie in 0..{MAX_STEPS}")
        if self.record_every < 1:
            raise ParameterError("record_every must be >= 1")


@dataclass
class ProbabilityTrace:
    """Per-step probabilities for one marked node (or a group average).

    ``p_conditional`` is NaN wherever the subspace mass is numerically zero
    (e.g. one step after a restricted start, when every arc points out of the
    subspace).
    """

    steps: np.ndarray
    p_marked: np.ndarray
    p_subspace: np.ndarray
    p_conditional: np.ndarray
    generation: int
    marked: int | None = None
    init_set: InitSet | None = None

    def __len__(self) -> int:
        return len(self.steps)

    def channel(self, channel: Channel) -> np.ndarray:
        return self.p_marked if channel is Channel.RAW else self.p_conditional


@dataclass(frozen=True)
class PeakReport:
    t_p: int
    p_at_peak: float
    channel: Channel


@dataclass(frozen=True)
class ComplexityFit:
    """Least-squares coefficient of T(K) = alpha * 3**(K/2)."""

    alpha: float
    residuals: tuple[tuple[int, float], ...]  # (generation, observed - fitted)

    def predict(self, generation: int) -> float:
        return self.alpha * 3.0 ** (generation / 2.0)


class ProjectionResult:
    """Outcome of projecting a state onto the last-generation position subspace."""

    def __init__(self, state: np.ndarray, subspace_mask: np.ndarray):
        self._state = state
        self._mask = subspace_mask
        sq = state * state
        self.success_prob = float(sq[subspace_mask].sum())
        self._complement_prob = float(sq[~subspace_mask].sum())

    @property
    def conditional_state(self) -> np.ndarray:
        """Renormalized restriction to the subspace; the post-selected state."""
        if self.success_prob < PROJECTION_EPS:
            raise DegenerateProjectionError(
                f"subspace mass {self.success_prob:.3e} is numerically zero"
            )
        out = np.where(self._mask, self._state, 0.0)
        return out / math.sqrt(self.success_prob)

    @property
    def complement_state(self) -> np.ndarray | None:
        """Renormalized remainder; None when the projection is (almost) certain."""
        if self._complement_prob < PROJECTION_EPS:
            return None
        out = np.where(self._mask, 0.0, self._state)
        return out / math.sqrt(self._complement_prob)


def project_last_generation(state: np.ndarray, space: ArcSpace) -> ProjectionResult:
    last = space.graph.last_generation_nodes()
    return ProjectionResult(state, space.arcs_with_tail_in(last))


def default_horizon(graph: ApollonianNetwork, restricted: bool) -> int:
    """Step budget bracketing the first peak with margin.

    Restricted-protocol peaks sit near 2*sqrt(N_last); full-search peaks of
    any one generation sit below a few sqrt(N).
    """
    if restricted and graph.generation >= 1:
        n_last = len(graph.last_generation_nodes())
        return math.ceil(4.0 * math.sqrt(n_last))
    return math.ceil(6.0 * math.sqrt(graph.n_nodes))


def _prepare(space: ArcSpace, init_set: InitSet) -> np.ndarray:
    if init_set is InitSet.FULL:
        return full_uniform_state(space)
    return initial_state(space, space.graph.last_generation_nodes())


def evolve_and_trace(
    config: SearchConfig,
    space: ArcSpace | None = None,
) -> ProbabilityTrace:
    """Evolve with the marked coin, recording probabilities every ``record_every``
    steps (step 0 is always included)."""
    if space is None:
        space = build_arc_space(build_apollonian(config.generation))
    graph = space.graph
    if not 0 <= config.marked < graph.n_nodes:
        raise ParameterError(
            f"marked node {config.marked} not in 0..{graph.n_nodes - 1}"
        )
    coin = CoinSpec(marked=config.marked)
    block = space.block(config.marked)
    sub_mask = space.arcs_with_tail_in(graph.last_generation_nodes()).astype(np.float64)
    rev = space.reverse_index

    n_records = config.steps // config.record_every + 1
    steps_out = np.empty(n_records, dtype=np.int64)
    pm = np.empty(n_records)
    ps = np.empty(n_records)

    state = _prepare(space, config.init_set)
    r = 0
    for t in range(config.steps + 1):
        if t:
            state = apply_coin(state, space, coin)[rev]
        if t % config.record_every == 0:
            sq = state * state
            steps_out[r] = t
            pm[r] = sq[block].sum()
            ps[r] = sub_mask @ sq
            r += 1
    with np.errstate(invalid="ignore", divide="ignore"):
        pc = np.where(ps > PROJECTION_EPS, pm / ps, np.nan)
    return ProbabilityTrace(
        steps=steps_out,
        p_marked=pm,
        p_subspace=ps,
        p_conditional=pc,
        generation=graph.generation,
        marked=config.marked,
        init_set=config.init_set,
    )


# -- restricted protocol (sampled) -------------------------------------------


@dataclass(frozen=True)
class RestrictedSearchResult:
    outcome: int | None  # measured node, None when both projections failed
    projection_succeeded: bool
    attempts: int  # 1 or 2 (a failed first projection is retried once)


def _evolved_protocol_state(
    space: ArcSpace, marked: int, steps: int, init_set: InitSet
) -> np.ndarray:
    if not 0 <= marked < space.n_nodes:
        raise ParameterError(f"marked node {marked} not in 0..{space.n_nodes - 1}")
    coin = CoinSpec(marked=marked)
    rev = space.reverse_index
    state = _prepare(space, init_set)
    for _ in range(steps):
        state = apply_coin(state, space, coin)[rev]
    return state


def _sample_position(rng, space: ArcSpace, conditional: np.ndarray) -> int:
    sq = conditional * conditional
    node_probs = np.add.reduceat(sq, space.block_offset[:-1])
    node_probs /= node_probs.sum()
    return int(rng.choice(space.n_nodes, p=node_probs))


def restricted_search(
    space: ArcSpace,
    marked: int,
    steps: int,
    seed: int | None = None,
    init_set: InitSet = InitSet.FULL,
) -> RestrictedSearchResult:
    """One sampled run of the restricted protocol.

    Prepare, evolve ``steps`` steps with the marked coin, project onto
    last-generation positions, and measure.  If the projection fails, apply
    one shift (which carries the arcs pointing at last-generation nodes into
    the subspace) and re-project; a second failure ends the attempt.
    """
    rng = np.random.default_rng(seed)
    state = _evolved_protocol_state(space, marked, steps, init_set)
    projection = project_last_generation(state, space)
    if rng.random() < projection.success_prob:
        return RestrictedSearchResult(
            outcome=_sample_position(rng, space, projection.conditional_state),
            projection_succeeded=True,
            attempts=1,
        )
    failed = projection.complement_state
    if failed is None:  # projection was (numerically) certain yet the draw failed
        return RestrictedSearchResult(outcome=None, projection_succeeded=False, attempts=1)
    shifted = failed[space.reverse_index]
    retry = project_last_generation(shifted, space)
    if rng.random() < retry.success_prob:
        return RestrictedSearchResult(
            outcome=_sample_position(rng, space, retry.conditional_state),
            projection_succeeded=True,
            attempts=2,
        )
    return RestrictedSearchResult(outcome=None, projection_succeeded=False, attempts=2)


@dataclass
class TrialStatistics:
    """Aggregate of many seeded restricted-search runs against one marked node."""

    n_trials: int
    first_projection_successes: int
    retry_successes: int
    failures: int
    marked_hits_first: int  # outcome == marked among first-projection successes
    marked_hits_retry: int
    exact_success_prob: float  # subspace mass of the evolved state
    exact_conditional: float  # marked share of the post-selected distribution


def restricted_search_trials(
    space: ArcSpace,
    marked: int,
    steps: int,
    n_trials: int,
    seed: int,
    init_set: InitSet = InitSet.FULL,
) -> TrialStatistics:
    """Vectorized trial harness: evolves once, then samples ``n_trials`` times."""
    rng = np.random.default_rng(seed)
    state = _evolved_protocol_state(space, marked, steps, init_set)
    projection = project_last_generation(state, space)
    ps = projection.success_prob

    first_success = rng.random(n_trials) < ps
    n_first = int(first_success.sum())

    def _node_probs(vec: np.ndarray) -> np.ndarray:
        sq = vec * vec
        p = np.add.reduceat(sq, space.block_offset[:-1])
        return p / p.sum()

    marked_hits_first = 0
    exact_conditional = 0.0
    if ps >= PROJECTION_EPS and n_first:
        cond_probs = _node_probs(projection.conditional_state)
        exact_conditional = float(cond_probs[marked])
        outcomes = rng.choice(space.n_nodes, size=n_first, p=cond_probs)
        marked_hits_first = int((outcomes == marked).sum())
    elif ps >= PROJECTION_EPS:
        exact_conditional = float(
            _node_probs(projection.conditional_state)[marked]
        )

    n_retry_attempts = n_trials - n_first
    retry_successes = 0
    marked_hits_retry = 0
    if n_retry_attempts:
        failed = projection.complement_state
        if failed is not None:
            shifted = failed[space.reverse_index]
            retry = project_last_generation(shifted, space)
            retry_hit = rng.random(n_retry_attempts) < retry.success_prob
            retry_successes = int(retry_hit.sum())
            if retry_successes and retry.success_prob >= PROJECTION_EPS:
                retry_probs = _node_probs(retry.conditional_state)
                outcomes = rng.choice(space.n_nodes, size=retry_successes, p=retry_probs)
                marked_hits_retry = int((outcomes == marked).sum())
    return TrialStatistics(
        n_trials=n_trials,
        first_projection_successes=n_first,
        retry_successes=retry_successes,
        failures=n_trials - n_first - retry_successes,
        marked_hits_first=marked_hits_first,
        marked_hits_retry=marked_hits_retry,
        exact_success_prob=ps,
        exact_conditional=exact_conditional,
    )


# -- peaks --------------------------------------------------------------------


def find_peak(trace: ProbabilityTrace, channel: Channel) -> PeakReport:
    """Earliest step attaining the channel maximum (ties within 1e-9)."""
    values = trace.channel(channel)
    finite = np.isfinite(values)
    if not finite.any():
        raise ParameterError(f"channel {channel.value} is undefined everywhere")
    vmax = np.nanmax(values)
    at_max = finite & (values >= vmax - PEAK_TIE_TOL)
    idx = int(np.flatnonzero(at_max)[0])
    return PeakReport(
        t_p=int(trace.steps[idx]), p_at_peak=float(values[idx]), channel=channel
    )


# -- sweeps --------------------------------------------------------------------


@dataclass
class SweepResult:
    """Group-averaged traces keyed by group label ("gen<g>", "last" or "all")."""

    generation: int
    init_set: InitSet
    groups: dict[str, ProbabilityTrace]
    group_members: dict[str, list[int]]
    warnings: list[str] = field(default_factory=list)
    seed: int | None = None


def _trace_worker(args) -> tuple[int, np.ndarray, np.ndarray]:
    generation, marked, steps, init_value = args
    space = _worker_space(generation)
    trace = evolve_and_trace(
        SearchConfig(
            generation=generation,
            marked=marked,
            steps=steps,
            init_set=InitSet(init_value),
        ),
        space=space,
    )
    return marked, trace.p_marked, trace.p_subspace


_WORKER_SPACES: dict[int, ArcSpace] = {}


def _worker_space(generation: int) -> ArcSpace:
    space = _WORKER_SPACES.get(generation)
    if space is None:
        space = build_arc_space(build_apollonian(generation))
        _WORKER_SPACES[generation] = space
    return space


def sweep(
    generation: int,
    marked_set: MarkedSet | list[int] = MarkedSet.LAST_GENERATION,
    init_set: InitSet = InitSet.FULL,
    steps: int | None = None,
    group_by_generation: bool = False,
    sample_per_group: int | None = None,
    seed: int | None = None,
    workers: int = 1,
    space: ArcSpace | None = None,
) -> SweepResult:
    """Average per-node traces over groups of marked nodes.

    Groups are generations when ``group_by_generation`` is set, otherwise the
    whole marked set forms one group.  Group curves are the pointwise
    arithmetic mean of the member traces, channel by channel (so the group
    conditional is the mean of per-node conditionals, not a ratio of means).
    Runs are independent; the reduction is performed in ascending node order,
    making results bit-stable for any ``workers`` count.  When a group is
    larger than ``sample_per_group``, a seeded uniform subsample is used and
    recorded in ``group_members``.
    """
    if space is None:
        space = build_arc_space(build_apollonian(generation))
    graph = space.graph

    if isinstance(marked_set, MarkedSet):
        if marked_set is MarkedSet.ALL:
            marked_nodes = list(range(graph.n_nodes))
        else:
            marked_nodes = graph.last_generation_nodes()
    else:
        marked_nodes = sorted(set(int(v) for v in marked_set))
        if marked_nodes and not 0 <= marked_nodes[0] <= marked_nodes[-1] < graph.n_nodes:
            raise ParameterError("explicit marked ids out of range")
    if not marked_nodes:
        raise ParameterError("marked set is empty")

    restricted = marked_set is MarkedSet.LAST_GENERATION
    if steps is None:
        steps = default_horizon(graph, restricted=restricted)

    if group_by_generation:
        groups: dict[str, list[int]] = {}
        by_gen = {g: [] for g in range(graph.generation + 1)}
        for node in marked_nodes:
            by_gen[int(graph.node_generation[node])].append(node)
        warnings = []
        for g in range(graph.generation + 1):
            if by_gen[g]:
                groups[f"gen{g}"] = by_gen[g]
            else:
                warnings.append(f"group gen{g} is empty; skipped")
    else:
        label = "last" if restricted else "all" if isinstance(marked_set, MarkedSet) else "custom"
        groups = {label: marked_nodes}
        warnings = []

    rng = np.random.default_rng(seed)
    for label in list(groups):
        members = groups[label]
        if sample_per_group is not None and len(members) > sample_per_group:
            picked = rng.choice(len(members), size=sample_per_group, replace=False)
            groups[label] = sorted(members[i] for i in picked)

    all_nodes = sorted({node for members in groups.values() for node in members})
    results: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    jobs = [(graph.generation, node, steps, init_set.value) for node in all_nodes]
    # Seed the per-process space cache before any fork so workers inherit it.
    _WORKER_SPACES[graph.generation] = space
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for marked, pm, ps in pool.map(_trace_worker, jobs, chunksize=8):
                results[marked] = (pm, ps)
    else:
        for job in jobs:
            marked, pm, ps = _trace_worker(job)
            results[marked] = (pm, ps)

    steps_axis = np.arange(steps + 1, dtype=np.int64)
    group_traces: dict[str, ProbabilityTrace] = {}
    for label in sorted(groups):
        members = groups[label]
        pm_sum = np.zeros(steps + 1)
        ps_sum = np.zeros(steps + 1)
        pc_sum = np.zeros(steps + 1)
        pc_count = np.zeros(steps + 1)
        for node in members:  # ascending ids: order-fixed reduction
            pm, ps = results[node]
            pm_sum += pm
            ps_sum += ps
            defined = ps > PROJECTION_EPS
            pc_sum[defined] += pm[defined] / ps[defined]
            pc_count[defined] += 1
        m = len(members)
        with np.errstate(invalid="ignore", divide="ignore"):
            pc_mean = np.where(pc_count == m, pc_sum / m, np.nan)
        group_traces[label] = ProbabilityTrace(
            steps=steps_axis,
            p_marked=pm_sum / m,
            p_subspace=ps_sum / m,
            p_conditional=pc_mean,
            generation=graph.generation,
            marked=None,
            init_set=init_set,
        )
    return SweepResult(
        generation=graph.generation,
        init_set=init_set,
        groups=group_traces,
        group_members={label: list(groups[label]) for label in sorted(groups)},
        warnings=warnings,
        seed=seed,
    )


# -- scaling -------------------------------------------------------------------


def fit_alpha(observations: list[tuple[int, float]]) -> ComplexityFit:
    """One-parameter least squares of T(K) = alpha * 3**(K/2).

    With x_K = 3**(K/2) the optimum is alpha = sum(T*x) / sum(x^2).
    """
    if len(observations) < 2:
        raise ParameterError("need at least 2 (generation, peak-step) points")
    ks = np.array([k for k, _ in observations], dtype=np.float64)
    ts = np.array([t for _, t in observations], dtype=np.float64)
    x = 3.0 ** (ks / 2.0)
    alpha = float((ts * x).sum() / (x * x).sum())
    residuals = tuple(
        (int(k), float(t - alpha * 3.0 ** (k / 2.0))) for k, t in observations
    )
    return ComplexityFit(alpha=alpha, residuals=residuals)


def expected_cost(t_p: float, p_at_peak: float) -> float:
    """Expected measurement cost T/p of running to the peak and repeating on failure."""
    if p_at_peak <= 0:
        raise ParameterError("peak probability must be positive")
    return t_p / p_at_peak
