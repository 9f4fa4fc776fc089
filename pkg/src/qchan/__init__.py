"""Quantum channel representations and superfidelity-based process distances."""
from .channel import (
    Channel,
    ChannelValidationError,
    ValidationReport,
    apply,
    compose,
    jamiolkowski,
    tensor,
    validate,
)
from .metrics import (
    MetricReport,
    fidelity,
    process_metrics,
    state_metrics,
    superfidelity,
    trace_distance,
)
from .random import RandomSource

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "ChannelValidationError",
    "MetricReport",
    "RandomSource",
    "ValidationReport",
    "apply",
    "compose",
    "fidelity",
    "jamiolkowski",
    "process_metrics",
    "state_metrics",
    "superfidelity",
    "tensor",
    "trace_distance",
    "validate",
]
