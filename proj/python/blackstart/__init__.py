"""Black-start restoration planning with frequency-nadir constraints."""

from ._core import (
    Error,
    Network,
    NadirPrediction,
    ParseError,
    PlanningError,
    PlanResult,
    PlanSimulation,
    StepCheck,
    ValidationError,
    first_window_mps,
    first_window_objective,
    fnv1a64,
    load_network,
    max_disturbance,
    parse_network,
    plan,
    predict_nadir,
    simulate,
)

__all__ = [
    "Error",
    "Network",
    "NadirPrediction",
    "ParseError",
    "PlanningError",
    "PlanResult",
    "PlanSimulation",
    "StepCheck",
    "ValidationError",
    "first_window_mps",
    "first_window_objective",
    "fnv1a64",
    "load_network",
    "max_disturbance",
    "parse_network",
    "plan",
    "predict_nadir",
    "simulate",
]
