"""Simultaneous min-entropy smoothing of multipartite states."""

from .entropy import (
    CapSolution,
    SmoothingChannel,
    apply_extended,
    build_smoothing_channel,
    min_entropy,
    smooth_min_entropy_purified,
    smooth_min_entropy_trace,
    smooth_state,
    trace_cap_level,
)
from .operators import (
    ClassicalState,
    DensityOperator,
    Spectrum,
    StateError,
    apply_spectral_function,
    eigen_decompose,
    embed_local,
    generalized_fidelity,
    partial_trace,
    purified_distance,
    random_state,
    tensor_product,
    trace_distance,
)
from .smoother import (
    FamilyError,
    OverlapError,
    SmoothingReport,
    SubsetFamily,
    check_commuting_marginals,
    explore_overlapping,
    order_laminar,
    smooth_classical,
    smooth_laminar,
    smooth_two_party,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "CapSolution",
    "SmoothingChannel",
    "apply_extended",
    "build_smoothing_channel",
    "min_entropy",
    "smooth_min_entropy_purified",
    "smooth_min_entropy_trace",
    "smooth_state",
    "trace_cap_level",
    "ClassicalState",
    "DensityOperator",
    "Spectrum",
    "StateError",
    "apply_spectral_function",
    "eigen_decompose",
    "embed_local",
    "generalized_fidelity",
    "partial_trace",
    "purified_distance",
    "random_state",
    "tensor_product",
    "trace_distance",
    "FamilyError",
    "OverlapError",
    "SmoothingReport",
    "SubsetFamily",
    "check_commuting_marginals",
    "explore_overlapping",
    "order_laminar",
    "smooth_classical",
    "smooth_laminar",
    "smooth_two_party",
    "verify",
]
