"""Hidden-measurement quantum machine: simulation and verification toolkit."""

__version__ = "0.1.0"

from .core import (
    BreakPoint,
    EpsilonMeasurement,
    MachineState,
    Outcome,
    OutcomeDistribution,
    UnitVector3,
    angle_between,
    collapse,
    measure,
    outcome_probabilities,
    resolve_outcome,
    sample_break_point,
    unit_vector,
)

__all__ = [
    "BreakPoint",
    "EpsilonMeasurement",
    "MachineState",
    "Outcome",
    "OutcomeDistribution",
    "UnitVector3",
    "angle_between",
    "collapse",
    "measure",
    "outcome_probabilities",
    "resolve_outcome",
    "sample_break_point",
    "unit_vector",
]
