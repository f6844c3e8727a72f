"""Diagonal column weights for the weighted SVD."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .encode import EncodeStats

DEFAULT_KURTOSIS_CAP = 10.0


class WeightMode(str, enum.Enum):
    FAMD = "famd"
    KURTOSIS = "wfamd"


@dataclass(frozen=True)
class WeightVector:
    w: np.ndarray
    mode: WeightMode
    kappa_cap: float | None = None


def famd_weights(stats: EncodeStats) -> WeightVector:
    """Level proportions for indicator columns, one for continuous columns."""
    w = np.concatenate([stats.p, np.ones(stats.n_continuous)])
    return WeightVector(w, WeightMode.FAMD)


def kurtosis_weights(stats: EncodeStats, cap: float = DEFAULT_KURTOSIS_CAP) -> WeightVector:
    """Like :func:`famd_weights` but continuous columns get ``min(kappa, cap) / 3``.

    Heavy-tailed columns are up-weighted; there is deliberately no floor, so a
    two-point column (kappa = 1) gets weight 1/3.
    """
    if not cap > 0:
        raise ValueError(f"kurtosis cap must be positive, got {cap}")
    w = np.concatenate([stats.p, np.minimum(stats.kappa, cap) / 3.0])
    return WeightVector(w, WeightMode.KURTOSIS, float(cap))


def make_weights(stats: EncodeStats, mode: WeightMode | str, cap: float = DEFAULT_KURTOSIS_CAP) -> WeightVector:
    mode = WeightMode(mode)
    if mode is WeightMode.FAMD:
        return famd_weights(stats)
    return kurtosis_weights(stats, cap)
