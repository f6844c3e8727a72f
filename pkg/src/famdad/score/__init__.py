"""Anomaly scorers operating on embedded (or raw) data."""

from .base import ScoreVector
from .iso import IsoForestModel, average_path_length, iso_fit, iso_score
from .spad import SpadModel, default_bins, spad_contributions, spad_fit, spad_score, sum_contributions

__all__ = [
    "IsoForestModel",
    "ScoreVector",
    "SpadModel",
    "average_path_length",
    "default_bins",
    "iso_fit",
    "iso_score",
    "spad_contributions",
    "spad_fit",
    "spad_score",
    "sum_contributions",
]
