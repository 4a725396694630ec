"""Synthetic source rows from qualitative levels, and their per-tick perturbation."""

import numpy as np

from .distributions import INTENSITY_LEVELS, SourceLevels, uniform
from .models import sign_distribution


def levels_to_distributions(levels: SourceLevels, v_table: float = 0.8) -> np.ndarray:
    """Map qualitative levels to the physical-source rows (sign, crowd, space).

    Crowd and space levels are weighted High=3, Med=2, Low=1 and normalised
    across routes. A single ``Yes`` sign becomes the signage distribution with
    visibility ``v_table``; no ``Yes`` gives the uniform distribution.

    Args:
        levels: Validated per-route levels
        v_table: Visibility assigned to a ``Yes`` sign

    Returns:
        Array of shape (3, M)
    """
    m = levels.route_count
    if "Yes" in levels.sign:
        sign = sign_distribution(m, levels.sign.index("Yes"), v_table)
    else:
        sign = uniform(m)

    rows = [sign]
    for name in ("crowd", "space"):
        weights = np.array([INTENSITY_LEVELS[level] for level in getattr(levels, name)])
        rows.append(weights / weights.sum())
    return np.vstack(rows)


def perturb(rows: np.ndarray, rng: np.random.Generator, eta: float) -> np.ndarray:
    """Add uniform noise in ``[-eta, eta]`` to every entry, clip at 0 and renormalise each row.

    A row whose mass is clipped away entirely falls back to uniform.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if eta <= 0.0:
        return rows.copy()
    noisy = np.clip(rows + rng.uniform(-eta, eta, size=rows.shape), 0.0, None)
    totals = noisy.sum(axis=1, keepdims=True)
    m = rows.shape[1]
    return np.where(totals > 0.0, noisy / np.where(totals > 0.0, totals, 1.0), 1.0 / m)
