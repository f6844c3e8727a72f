"""Weighted SVD embedding and first / first-and-last subspace selection."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .encode import EncodedMatrix
from .weight import WeightMode, WeightVector

# Singular values at or below this fraction of the largest are treated as null.
RANK_RTOL = 1e-9


class SubspaceMode(str, enum.Enum):
    FIRST = "F"
    FIRST_LAST = "FL"


@dataclass(frozen=True)
class Embedding:
    """Result of the weighted SVD.

    ``F`` holds the principal coordinates ``Z diag(w)^(1/2) V``; with uniform
    row weights ``F.T @ F / n == diag(singular_values**2)``.
    """

    singular_values: np.ndarray
    V: np.ndarray
    F: np.ndarray
    effective_rank: int
    weight_mode: WeightMode

    @property
    def explained(self) -> np.ndarray:
        return self.singular_values**2


@dataclass(frozen=True)
class SubspaceSelection:
    mode: SubspaceMode
    k: int
    indices: tuple[int, ...]
    requested_k: int

    @property
    def clamped(self) -> bool:
        return self.k != self.requested_k


def _normalize_signs(V: np.ndarray) -> np.ndarray:
    # largest |entry| of each column made positive; argmax picks the lowest index on ties
    pivots = np.argmax(np.abs(V), axis=0)
    signs = np.where(V[pivots, np.arange(V.shape[1])] < 0, -1.0, 1.0)
    return V * signs


def fit_embedding(encoded: EncodedMatrix, weights: WeightVector, rank_rtol: float = RANK_RTOL) -> Embedding:
    Z = encoded.Z
    n, t = Z.shape
    if n == 0 or t == 0:
        raise ValueError(f"cannot embed an empty matrix of shape {Z.shape}")
    w = np.asarray(weights.w, dtype=np.float64)
    if w.shape != (t,):
        raise ValueError(f"weight vector has length {w.size}, matrix has {t} columns")
    if np.any(w < 0):
        raise ValueError("column weights must be non-negative")

    ZW = Z * np.sqrt(w)
    # LinAlgError on non-convergence is deliberately left to propagate
    _, s, Vt = np.linalg.svd(ZW / math.sqrt(n), full_matrices=False)
    V = _normalize_signs(Vt.T)
    F = ZW @ V
    rank = int(np.count_nonzero(s > rank_rtol * s[0])) if s.size and s[0] > 0 else 0
    return Embedding(s, V, F, rank, WeightMode(weights.mode))


def select_subspace(embedding: Embedding, mode: SubspaceMode | str, k: int) -> SubspaceSelection:
    """Pick ``k`` coordinate indices.

    ``F`` mode takes the leading ``k``; ``FL`` takes the leading ``ceil(k/2)``
    followed by the trailing ``floor(k/2)`` inside the effective rank. ``k``
    is clamped to the effective rank with a warning.
    """
    mode = SubspaceMode(mode)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    r = embedding.effective_rank
    if r == 0:
        raise ValueError("embedding has zero effective rank")
    requested = k
    if k > r:
        warnings.warn(f"k={k} exceeds effective rank {r}; using k={r}", stacklevel=2)
        k = r
    if mode is SubspaceMode.FIRST:
        idx = list(range(k))
    else:
        head, tail = (k + 1) // 2, k // 2
        idx = list(range(head)) + list(range(r - tail, r))
    return SubspaceSelection(mode, k, tuple(idx), requested)


def project(embedding: Embedding, selection: SubspaceSelection) -> np.ndarray:
    return embedding.F[:, list(selection.indices)]
