"""AUC ROC, per-dimension AUC sweeps and top-q overlap between scorers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .embed import Embedding
from .score import ScoreVector, spad_fit, spad_score


def _as_scores(scores: ScoreVector | np.ndarray) -> np.ndarray:
    if isinstance(scores, ScoreVector):
        return scores.scores
    return np.asarray(scores, dtype=np.float64)


def _check_labels(scores: np.ndarray, labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels, dtype=bool)
    if labels.shape != scores.shape:
        raise ValueError(f"scores have shape {scores.shape}, labels {labels.shape}")
    n_pos = int(labels.sum())
    if n_pos == 0 or n_pos == labels.size:
        raise ValueError("AUC needs at least one anomaly and one inlier")
    return labels


def auc_roc(scores: ScoreVector | np.ndarray, labels: np.ndarray) -> float:
    """Probability that a random anomaly outscores a random inlier, ties counted half.

    Computed from average ranks (Mann-Whitney U) in O(n log n).
    """
    s = _as_scores(scores)
    labels = _check_labels(s, labels)
    ranks = stats.rankdata(s, method="average")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    u = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def per_dimension_auc(embedding: Embedding, labels: np.ndarray, bins: int | None = None) -> np.ndarray:
    """SPAD AUC using each non-null embedding coordinate on its own."""
    out = np.empty(embedding.effective_rank)
    for d in range(embedding.effective_rank):
        column = embedding.F[:, d : d + 1]
        out[d] = auc_roc(spad_score(spad_fit(column, bins=bins), column), labels)
    return out


def top_indices(scores: ScoreVector | np.ndarray, q: float) -> np.ndarray:
    """Indices of the ``ceil(q n)`` highest scores; ties go to the lower row index."""
    s = _as_scores(scores)
    if not 0 < q <= 1:
        raise ValueError(f"q must lie in (0, 1], got {q}")
    m = max(1, math.ceil(q * s.size - 1e-9))
    return np.argsort(-s, kind="stable")[:m]


def top_overlap(s1: ScoreVector | np.ndarray, s2: ScoreVector | np.ndarray, q: float) -> float:
    a, b = _as_scores(s1), _as_scores(s2)
    if a.shape != b.shape:
        raise ValueError(f"score vectors differ in length: {a.size} vs {b.size}")
    top_a, top_b = top_indices(a, q), top_indices(b, q)
    return len(np.intersect1d(top_a, top_b)) / top_a.size


@dataclass(frozen=True)
class PairTable:
    """Comparison of several scorers on the same rows.

    ``overlap[q]`` is a methods x methods matrix with AUC on the diagonal (NaN
    without labels) and top-q overlap elsewhere. ``combined`` puts the first q
    above the diagonal and the second below it.
    """

    methods: tuple[str, ...]
    scores: np.ndarray
    labels: np.ndarray | None
    auc: np.ndarray
    overlap: dict[float, np.ndarray]
    combined: np.ndarray
    spearman: np.ndarray
    pearson: np.ndarray


def pair_table(
    scores: Sequence[ScoreVector],
    labels: np.ndarray | None = None,
    qs: tuple[float, float] = (0.05, 0.10),
) -> PairTable:
    if len(scores) < 2:
        raise ValueError("pair_table needs at least two score vectors")
    methods = tuple(s.method for s in scores)
    M = np.column_stack([s.scores for s in scores])
    m = len(methods)
    if labels is not None:
        auc = np.array([auc_roc(M[:, i], labels) for i in range(m)])
    else:
        auc = np.full(m, np.nan)

    overlap = {}
    for q in qs:
        mat = np.empty((m, m))
        for i in range(m):
            for j in range(m):
                mat[i, j] = auc[i] if i == j else top_overlap(M[:, i], M[:, j], q)
        overlap[q] = mat
    upper, lower = overlap[qs[0]], overlap[qs[1]]
    combined = np.where(np.triu(np.ones((m, m), dtype=bool), 1), upper, lower)
    np.fill_diagonal(combined, auc)

    spearman = np.atleast_2d(stats.spearmanr(M).statistic) if m > 2 else _pairwise(M, stats.spearmanr)
    pearson = np.corrcoef(M, rowvar=False)
    return PairTable(methods, M, None if labels is None else np.asarray(labels, dtype=bool),
                     auc, overlap, combined, spearman, pearson)


def _pairwise(M: np.ndarray, fn) -> np.ndarray:
    r = fn(M[:, 0], M[:, 1]).statistic
    return np.array([[1.0, r], [r, 1.0]])
