"""Cognitive agent-based evacuation wayfinding simulator."""

__version__ = "0.1.0"
