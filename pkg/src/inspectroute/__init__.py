"""Open-route TSP solvers and benchmarking for robotic inspection path planning."""
from .core import (
    ExpandedRoute,
    Instance,
    SolveResult,
    close_with_dummy,
    evaluate_route,
    expand_route,
    metric_completion,
    strip_dummy,
    validate_route,
)
from .kernels import BACKEND

__version__ = "0.1.0"
