"""Information-source models producing route distributions."""

from .distributions import (
    PHYSICAL_SOURCES,
    SOURCE_ORDER,
    Observation,
    RouteObservation,
    SignSignal,
    SourceLevels,
    check_distribution,
    uniform,
)
from .levels import levels_to_distributions, perturb
from .models import MemoryBuffer, f_crowd, f_mem, f_sign, f_space, sign_distribution, sign_visibility

__all__ = [
    "PHYSICAL_SOURCES", "SOURCE_ORDER", "MemoryBuffer", "Observation", "RouteObservation", "SignSignal",
    "SourceLevels", "check_distribution", "f_crowd", "f_mem", "f_sign", "f_space", "levels_to_distributions",
    "perturb", "sign_distribution", "sign_visibility", "uniform",
]
