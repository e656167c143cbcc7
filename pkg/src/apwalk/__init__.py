"""Quantum spatial search on Apollonian networks via coined walks on arcs.

Layers:

- :mod:`apwalk.graphs` -- deterministic and random Apollonian construction,
  closed-form size/degree counts, JSON (de)serialization with validation.
- :mod:`apwalk.walk` -- the arc-space engine: Grover coins with one optional
  negated (marked) block, flip-flop shift, O(arcs) stepping.
- :mod:`apwalk.search` -- probability traces, the restricted measurement
  protocol (project onto last-generation arcs, one retry after a shift),
  marked-set sweeps, peak finding and the square-root scaling fit.
- :mod:`apwalk.spectral` -- dense orthogonal-matrix spectral reports and the
  invariant-subspace residual checks behind the complexity argument.
- :mod:`apwalk.io` -- trace CSV / summary JSON / manifest formats.
- :mod:`apwalk.cli` -- ``apwalk`` command-line entry point.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    ContractViolation,
    DegenerateProjectionError,
    FormatError,
    ParameterError,
)
from .graphs import (
    ApollonianNetwork,
    GraphCounts,
    build_apollonian,
    build_random_apollonian,
    closed_form_counts,
    deserialize,
    serialize,
)
from .search import (
    Channel,
    ComplexityFit,
    InitSet,
    MarkedSet,
    PeakReport,
    ProbabilityTrace,
    SearchConfig,
    SweepResult,
    default_horizon,
    evolve_and_trace,
    expected_cost,
    find_peak,
    fit_alpha,
    project_last_generation,
    restricted_search,
    restricted_search_trials,
    sweep,
)
from .spectral import (
    Fact1Result,
    SpectralReport,
    dense_step_matrix,
    eigen_analysis,
    verify_fact1,
)
from .walk import (
    ArcSpace,
    CoinSpec,
    apply_coin,
    apply_shift,
    build_arc_space,
    full_uniform_state,
    grover_coin,
    initial_state,
    marked_target_state,
    position_distribution,
    step,
)

__all__ = [
    "ApollonianNetwork",
    "ArcSpace",
    "CapacityError",
    "Channel",
    "CoinSpec",
    "ComplexityFit",
    "ContractViolation",
    "DegenerateProjectionError",
    "Fact1Result",
    "FormatError",
    "GraphCounts",
    "InitSet",
    "MarkedSet",
    "ParameterError",
    "PeakReport",
    "ProbabilityTrace",
    "SearchConfig",
    "SpectralReport",
    "SweepResult",
    "apply_coin",
    "apply_shift",
    "build_apollonian",
    "build_arc_space",
    "build_random_apollonian",
    "closed_form_counts",
    "default_horizon",
    "dense_step_matrix",
    "deserialize",
    "eigen_analysis",
    "evolve_and_trace",
    "expected_cost",
    "find_peak",
    "fit_alpha",
    "full_uniform_state",
    "grover_coin",
    "initial_state",
    "marked_target_state",
    "position_distribution",
    "project_last_generation",
    "restricted_search",
    "restricted_search_trials",
    "serialize",
    "step",
    "sweep",
    "verify_fact1",
    "__version__",
]
