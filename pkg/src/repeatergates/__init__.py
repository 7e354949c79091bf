"""Nonlocal bipartite gates over repeater chains: circuits, schedules and bounds."""
from .qudit import QuditState, DimensionError
from .timeline import LineTopology, build_schedule, TimelineError

__all__ = ["QuditState", "DimensionError", "LineTopology", "build_schedule", "TimelineError"]
__version__ = "0.1.0"
