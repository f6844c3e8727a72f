"""Anomaly detection on mixed tabular data via (kurtosis-weighted) FAMD embeddings."""

__version__ = "0.1.0"

from .embed import Embedding, SubspaceMode, SubspaceSelection, fit_embedding, project, select_subspace
from .encode import EncodedMatrix, EncodeStats, encode
from .evaluate import auc_roc, pair_table, per_dimension_auc, top_overlap
from .score import ScoreVector, iso_fit, iso_score, spad_fit, spad_score
from .tabular import ColumnKind, MixedTable, Schema, infer_schema, load_csv, write_csv
from .weight import WeightMode, WeightVector, famd_weights, kurtosis_weights

__all__ = [
    "ColumnKind",
    "EncodeStats",
    "EncodedMatrix",
    "Embedding",
    "MixedTable",
    "Schema",
    "ScoreVector",
    "SubspaceMode",
    "SubspaceSelection",
    "WeightMode",
    "WeightVector",
    "auc_roc",
    "encode",
    "famd_weights",
    "fit_embedding",
    "infer_schema",
    "iso_fit",
    "iso_score",
    "kurtosis_weights",
    "load_csv",
    "pair_table",
    "per_dimension_auc",
    "project",
    "select_subspace",
    "spad_fit",
    "spad_score",
    "top_overlap",
    "write_csv",
]
