"""Cognitive focal agents."""

from .cognitive import (
    AgentState,
    Perception,
    TraceEntry,
    candidate_positions,
    micro_decide,
    new_agent,
    observe,
    perceive,
    prediction_entropy,
    tick,
)

__all__ = [
    "AgentState", "Perception", "TraceEntry", "candidate_positions", "micro_decide", "new_agent", "observe",
    "perceive", "prediction_entropy", "tick",
]
