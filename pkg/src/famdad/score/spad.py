"""SPAD: per-dimension histogram frequencies combined under independence.

A row's score is ``-sum(log p_hat)`` over dimensions, where ``p_hat`` is the
Laplace-smoothed frequency ``(count + 1) / (n + n_bins)`` of the bin (or
categorical level) the row falls in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..tabular import MixedTable
from .base import ScoreVector


def default_bins(n: int) -> int:
    """Sturges-style bin count ``ceil(log2 n) + 1``."""
    return math.ceil(math.log2(n)) + 1


@dataclass(frozen=True)
class SpadDimension:
    """One fitted dimension.

    Continuous dimensions have equal-width bins over ``[lo, hi]``; a constant
    dimension keeps a single bin. Categorical dimensions have ``lo = hi = None``
    and one bin per level.
    """

    log_prob: np.ndarray
    lo: float | None = None
    hi: float | None = None

    @property
    def n_bins(self) -> int:
        return self.log_prob.size

    @property
    def categorical(self) -> bool:
        return self.lo is None

    def assign(self, values: np.ndarray) -> np.ndarray:
        if self.categorical:
            return np.asarray(values, dtype=np.int64)
        if self.n_bins == 1:
            return np.zeros(len(values), dtype=np.int64)
        width = (self.hi - self.lo) / self.n_bins
        idx = np.floor((np.asarray(values, dtype=np.float64) - self.lo) / width)
        # values at hi (and out-of-range values) clamp into the edge bins
        return np.clip(idx, 0, self.n_bins - 1).astype(np.int64)


@dataclass(frozen=True)
class SpadModel:
    dims: tuple[SpadDimension, ...]
    n_train: int

    @property
    def n_dims(self) -> int:
        return len(self.dims)


def _smoothed_log_prob(counts: np.ndarray, n: int) -> np.ndarray:
    return np.log((counts + 1.0) / (n + counts.size))


def _fit_continuous(x: np.ndarray, bins: int) -> SpadDimension:
    lo, hi = float(x.min()), float(x.max())
    if not hi > lo:
        return SpadDimension(_smoothed_log_prob(np.array([float(x.size)]), x.size), lo, hi)
    proto = SpadDimension(np.zeros(bins), lo, hi)
    counts = np.bincount(proto.assign(x), minlength=bins).astype(np.float64)
    return SpadDimension(_smoothed_log_prob(counts, x.size), lo, hi)


def _fit_categorical(codes: np.ndarray, n_levels: int) -> SpadDimension:
    counts = np.bincount(codes, minlength=n_levels).astype(np.float64)
    return SpadDimension(_smoothed_log_prob(counts, codes.size))


def _columns(data: np.ndarray | MixedTable) -> list[tuple[np.ndarray, int | None]]:
    """``(values, n_levels)`` per dimension; ``n_levels`` is None for continuous."""
    if isinstance(data, MixedTable):
        cols: list[tuple[np.ndarray, int | None]] = [(c.codes, c.n_levels) for c in data.categorical]
        cols += [(c.values, None) for c in data.continuous]
        return cols
    X = np.asarray(data, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {X.shape}")
    return [(X[:, j], None) for j in range(X.shape[1])]


def spad_fit(data: np.ndarray | MixedTable, bins: int | None = None) -> SpadModel:
    """Fit SPAD on a numeric matrix or directly on a mixed table.

    For a :class:`MixedTable` categorical columns use their levels as bins and
    appear before the continuous columns.
    """
    cols = _columns(data)
    n = len(cols[0][0]) if cols else 0
    if n < 2:
        raise ValueError(f"need at least 2 rows, got {n}")
    if bins is None:
        bins = default_bins(n)
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    dims = tuple(
        _fit_categorical(values, levels) if levels is not None else _fit_continuous(values, bins)
        for values, levels in cols
    )
    return SpadModel(dims, n)


def spad_contributions(model: SpadModel, data: np.ndarray | MixedTable) -> np.ndarray:
    """Per-dimension ``-log p_hat`` terms, shape ``(n, n_dims)``."""
    cols = _columns(data)
    if len(cols) != model.n_dims:
        raise ValueError(f"model has {model.n_dims} dimensions, data has {len(cols)}")
    n = len(cols[0][0])
    out = np.empty((n, model.n_dims))
    for j, (dim, (values, levels)) in enumerate(zip(model.dims, cols)):
        if dim.categorical != (levels is not None):
            raise ValueError("column types do not match the fitted model")
        idx = dim.assign(values)
        if dim.categorical:
            # levels unseen at fit time get the smoothing floor
            floor = math.log(1.0 / (model.n_train + dim.n_bins))
            known = idx < dim.n_bins
            out[:, j] = -np.where(known, dim.log_prob[np.minimum(idx, dim.n_bins - 1)], floor)
        else:
            out[:, j] = -dim.log_prob[idx]
    return out


def sum_contributions(contrib: np.ndarray) -> np.ndarray:
    """Left-to-right column sum, so any column subset sums reproducibly."""
    total = np.zeros(contrib.shape[0])
    for j in range(contrib.shape[1]):
        total += contrib[:, j]
    return total


def spad_score(model: SpadModel, data: np.ndarray | MixedTable) -> ScoreVector:
    return ScoreVector(sum_contributions(spad_contributions(model, data)), "spad")
