from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ScoreVector:
    """One anomaly score per row; higher always means more anomalous."""

    scores: np.ndarray
    method: str

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 1:
            raise ValueError(f"scores must be 1-D, got shape {scores.shape}")
        if not np.all(np.isfinite(scores)):
            raise ValueError("scores must be finite")
        object.__setattr__(self, "scores", scores)

    def __len__(self) -> int:
        return self.scores.size

    def renamed(self, method: str) -> ScoreVector:
        return ScoreVector(self.scores, method)
