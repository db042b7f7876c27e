"""Frequency-regulation sizing and allocation for virtual power plants.

Quantifies how much virtual inertia and damping an aggregation of
inverter-based resources must add for a grid to ride through a step power
deficit within security limits, and splits that requirement across the
resources with a Pareto/Nash bargaining allocator.
"""

from .allocator import (
    Allocation,
    AllocationProblem,
    BargainResult,
    ComparisonReport,
    IbrSpec,
    ObjectiveVector,
    ParetoPoint,
    compare_single_objective,
    evaluate_objectives,
    nash_bargain,
    non_dominated_mask,
    pareto_front,
    solve_scalarized,
    vpp_profit,
)
from .errors import (
    DeadbandExceedsLimitError,
    EmptyFrontError,
    InfeasibleError,
    MissingCompensationError,
    NeverActivatesError,
    NonFiniteError,
    OverdampedError,
    UnsatisfiableError,
    VppFreqError,
)
from .freq_model import (
    Disturbance,
    FreqMetrics,
    GridParams,
    SecondOrderCoeffs,
    VppParams,
    deadband_crossing_times,
    derive_coeffs,
    freq_response,
    metrics,
    nadir,
    qss,
    response_curve,
    rocof_max,
)
from .ode_oracle import SimConfig, Trajectory, simulate
from .requirements import (
    Requirement,
    SecurityLimits,
    determine_requirement,
    in_feasible_region,
    min_damping_for_qss,
    min_inertia_for_rocof,
)
from .scenario import Scenario, load_scenario, parse_scenario, scenario_to_dict

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "AllocationProblem",
    "BargainResult",
    "ComparisonReport",
    "Disturbance",
    "FreqMetrics",
    "GridParams",
    "IbrSpec",
    "ObjectiveVector",
    "ParetoPoint",
    "Requirement",
    "Scenario",
    "SecondOrderCoeffs",
    "SecurityLimits",
    "SimConfig",
    "Trajectory",
    "VppParams",
    "compare_single_objective",
    "deadband_crossing_times",
    "derive_coeffs",
    "determine_requirement",
    "evaluate_objectives",
    "freq_response",
    "in_feasible_region",
    "load_scenario",
    "metrics",
    "min_damping_for_qss",
    "min_inertia_for_rocof",
    "nadir",
    "nash_bargain",
    "non_dominated_mask",
    "pareto_front",
    "parse_scenario",
    "qss",
    "response_curve",
    "rocof_max",
    "scenario_to_dict",
    "simulate",
    "solve_scalarized",
    "vpp_profit",
    "DeadbandExceedsLimitError",
    "EmptyFrontError",
    "InfeasibleError",
    "MissingCompensationError",
    "NeverActivatesError",
    "NonFiniteError",
    "OverdampedError",
    "UnsatisfiableError",
    "VppFreqError",
    "__version__",
]
