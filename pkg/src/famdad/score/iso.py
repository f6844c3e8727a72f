"""Isolation Forest with deterministic per-tree random streams."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .base import ScoreVector

DEFAULT_TREES = 100
DEFAULT_PSI = 256


def average_path_length(m: int | np.ndarray) -> np.ndarray:
    """``c(m) = 2 H(m-1) - 2 (m-1) / m`` with ``c(0) = c(1) = 0``.

    ``H`` is the exact harmonic number, so ``c(2) = 1``.
    """
    m = np.asarray(m, dtype=np.int64)
    top = int(m.max()) if m.size else 0
    table = _path_length_table(top)
    return table[m]


def _path_length_table(max_size: int) -> np.ndarray:
    sizes = np.arange(max_size + 1, dtype=np.float64)
    # harmonic[m] = H(m - 1)
    harmonic = np.concatenate([[0.0, 0.0], np.cumsum(1.0 / np.arange(1, max_size))])[: max_size + 1]
    table = np.zeros(max_size + 1)
    big = sizes > 1
    table[big] = 2.0 * harmonic[big] - 2.0 * (sizes[big] - 1.0) / sizes[big]
    return table


@dataclass(frozen=True)
class IsoForestModel:
    """Trees stored as padded node arrays of shape ``(n_trees, 2 * psi - 1)``.

    Leaves have ``feature == -1``; ``size`` records how many training points
    reached each node.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    size: np.ndarray
    n_nodes: np.ndarray
    psi: int
    height_limit: int
    seed: int
    n_features: int

    @property
    def n_trees(self) -> int:
        return self.feature.shape[0]


def tree_rng(seed: int, tree_index: int) -> np.random.Generator:
    """Independent PCG64 stream for one tree, keyed on ``(seed, tree_index)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(tree_index,))))


def iso_fit(data: np.ndarray, n_trees: int = DEFAULT_TREES, psi: int = DEFAULT_PSI, seed: int = 0) -> IsoForestModel:
    X = np.ascontiguousarray(data, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {X.shape}")
    n, k = X.shape
    if n < 2 or k < 1:
        raise ValueError(f"need at least 2 rows and 1 column, got shape {X.shape}")
    if n_trees < 1:
        raise ValueError(f"n_trees must be >= 1, got {n_trees}")
    if psi < 2:
        raise ValueError(f"psi must be >= 2, got {psi}")
    psi = min(psi, n)
    height_limit = math.ceil(math.log2(psi))
    max_nodes = 2 * psi - 1

    feature = np.full((n_trees, max_nodes), _kernels.LEAF, dtype=np.int64)
    threshold = np.zeros((n_trees, max_nodes))
    left = np.full((n_trees, max_nodes), _kernels.LEAF, dtype=np.int64)
    right = np.full((n_trees, max_nodes), _kernels.LEAF, dtype=np.int64)
    size = np.zeros((n_trees, max_nodes), dtype=np.int64)
    n_nodes = np.zeros(n_trees, dtype=np.int64)
    for t in range(n_trees):
        rng = tree_rng(seed, t)
        rows = rng.choice(n, size=psi, replace=False)
        uniforms = rng.random(2 * psi)
        n_nodes[t] = _kernels.grow(
            np.ascontiguousarray(X[rows]), uniforms, height_limit,
            feature[t], threshold[t], left[t], right[t], size[t],
        )
    return IsoForestModel(feature, threshold, left, right, size, n_nodes, psi, height_limit, int(seed), k)


def mean_path_length(model: IsoForestModel, data: np.ndarray) -> np.ndarray:
    X = np.ascontiguousarray(data, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(f"model expects {model.n_features} columns, got shape {X.shape}")
    adjust = _path_length_table(model.psi)
    total = _kernels.path_lengths(X, model.feature, model.threshold, model.left, model.right, model.size, adjust)
    return total / model.n_trees


def iso_score(model: IsoForestModel, data: np.ndarray) -> ScoreVector:
    """Anomaly score ``2 ** (-E[h(x)] / c(psi))``, in (0, 1), higher is more anomalous."""
    h = mean_path_length(model, data)
    c_psi = float(average_path_length(model.psi))
    return ScoreVector(np.exp2(-h / c_psi), "iso")
