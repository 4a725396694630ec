"""Credibility-weighted fusion of route distributions.

The pipeline turns an N x M source matrix (one route distribution per
information source) into a confidence distribution over routes:

1. pairwise Jensen-Shannon divergence between sources (bits),
2. average divergence of each source from the others,
3. support degree, the clamped inverse of that average,
4. credibility degree, normalised support scaled by overall agreement,
5. normalised Shannon entropy of each source,
6. the confidence ``G = sum_i Crd_i * (1 - H_i) * F_i``.

``G`` may sum to less than one; the macro-decision fires only when its
largest entry reaches the threshold.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import rel_entr
from scipy.stats import entropy

from ..exceptions import SourceError

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-5
DEFAULT_THETA = 0.5

_LN2 = math.log(2.0)
_SUM_TOL = 1e-9

# None means "no decision"
MacroDecision = Optional[int]


@dataclass(frozen=True, eq=False)
class FusionBreakdown:
    """Every intermediate quantity of one fusion."""

    pairwise: np.ndarray     # (N, N) divergences
    avg: np.ndarray          # (N,)
    support: np.ndarray      # (N,)
    credibility: np.ndarray  # (N,)
    entropy: np.ndarray      # (N,) normalised
    terms: np.ndarray        # (N, M) per-source contribution to G
    g: np.ndarray            # (M,)

    @property
    def source_count(self) -> int:
        return self.terms.shape[0]


def as_source_matrix(F) -> np.ndarray:
    """Validate a source matrix: 2-D, every row a probability distribution."""
    arr = np.asarray(F, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise SourceError(f"source matrix must be 2-D (sources x routes), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
        raise SourceError("source matrix has negative or non-finite entries")
    sums = arr.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > _SUM_TOL):
        raise SourceError(f"source matrix rows must sum to 1, got {sums}")
    return arr


def jsd(p, q) -> float:
    """Jensen-Shannon divergence in bits, with ``0 log 0 = 0``.

    Args:
        p: First distribution
        q: Second distribution over the same routes

    Returns:
        Divergence in ``[0, 1]``
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise SourceError(f"distributions differ in length: {p.shape} vs {q.shape}")
    return float(_pairwise(np.vstack([p, q]))[0, 1])


def _pairwise(F: np.ndarray) -> np.ndarray:
    p = F[:, None, :]
    q = F[None, :, :]
    mid = (p + q) / 2.0
    d = 0.5 * (rel_entr(p, mid) + rel_entr(q, mid)).sum(axis=-1) / _LN2
    np.fill_diagonal(d, 0.0)
    return np.clip(d, 0.0, 1.0)


def avg_jsd(F) -> np.ndarray:
    """Mean divergence of each source from every other source."""
    F = as_source_matrix(F)
    n = F.shape[0]
    if n < 2:
        raise SourceError("average divergence needs at least two sources")
    return _pairwise(F).sum(axis=1) / (n - 1)


def support_degrees(avg, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    return 1.0 / np.maximum(epsilon, np.asarray(avg, dtype=float))


def credibility_degrees(sup, avg) -> np.ndarray:
    """Normalised support scaled by ``1 - mean(avg)``; sums to ``1 - mean(avg)``."""
    sup = np.asarray(sup, dtype=float)
    avg = np.asarray(avg, dtype=float)
    return sup / sup.sum() * (1.0 - avg.mean())


def normalized_entropy(p) -> float:
    """Shannon entropy in bits divided by ``log2(M)``.

    Raises:
        SourceError: If there is only one route
    """
    return float(_normalized_entropies(np.atleast_2d(np.asarray(p, dtype=float)))[0])


def _normalized_entropies(F: np.ndarray) -> np.ndarray:
    m = F.shape[1]
    if m < 2:
        raise SourceError("entropy over a single route is undefined (no decision to make)")
    h = entropy(F, base=2, axis=1) / math.log2(m)
    h = np.clip(h, 0.0, 1.0)
    # Exactly uniform rows carry no information
    h[np.all(F == F[:, :1], axis=1)] = 1.0
    return h


def fuse_detailed(F, epsilon: float = DEFAULT_EPSILON) -> FusionBreakdown:
    """Run the whole fusion and keep every intermediate.

    A single source gets credibility 1, so ``G = (1 - H) * F``.

    Args:
        F: Source matrix, one row per information source
        epsilon: Support-degree clamp

    Returns:
        FusionBreakdown whose ``g`` is the confidence distribution
    """
    F = as_source_matrix(F)
    n = F.shape[0]
    if n == 1:
        pairwise = np.zeros((1, 1))
        avg = np.zeros(1)
        support = np.array([1.0 / epsilon])
        credibility = np.ones(1)
    else:
        pairwise = _pairwise(F)
        avg = pairwise.sum(axis=1) / (n - 1)
        support = support_degrees(avg, epsilon)
        credibility = credibility_degrees(support, avg)

    h = _normalized_entropies(F)
    terms = (credibility * (1.0 - h))[:, None] * F
    g = np.clip(terms.sum(axis=0), 0.0, 1.0)
    return FusionBreakdown(pairwise, avg, support, credibility, h, terms, g)


def source_terms(F, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Per-source contributions to the confidence distribution, shape (N, M)."""
    return fuse_detailed(F, epsilon).terms


def fuse(F, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    return fuse_detailed(F, epsilon).g


def macro_decide(g, theta: float = DEFAULT_THETA) -> MacroDecision:
    """Return the most confident route if its confidence reaches ``theta``.

    Ties go to the lowest route id.
    """
    if not 0.0 < theta <= 1.0:
        raise SourceError(f"threshold must be in (0, 1], got {theta}")
    g = np.asarray(g, dtype=float)
    best = int(np.argmax(g))
    return best if g[best] >= theta else None
