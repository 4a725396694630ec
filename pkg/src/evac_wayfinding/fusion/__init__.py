"""Information-theoretic fusion of source distributions."""

from .credibility import (
    FusionBreakdown,
    MacroDecision,
    avg_jsd,
    credibility_degrees,
    fuse,
    fuse_detailed,
    jsd,
    macro_decide,
    normalized_entropy,
    source_terms,
    support_degrees,
)

__all__ = [
    "FusionBreakdown", "MacroDecision", "avg_jsd", "credibility_degrees", "fuse", "fuse_detailed", "jsd",
    "macro_decide", "normalized_entropy", "source_terms", "support_degrees",
]
