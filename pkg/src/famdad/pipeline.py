"""End-to-end runs: ingest, encode, weight, embed, select, score, evaluate."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__
from .embed import Embedding, SubspaceMode, SubspaceSelection, fit_embedding, project, select_subspace
from .encode import EncodedMatrix, encode, one_hot, standardize
from .evaluate import PairTable, auc_roc, per_dimension_auc
from .score import ScoreVector, iso_fit, iso_score, spad_contributions, spad_fit, spad_score, sum_contributions
from .simgen import SimKind, SimSpec, generate
from .tabular import MixedTable, load_csv, read_schema
from .weight import DEFAULT_KURTOSIS_CAP, WeightMode, make_weights

SCORERS = ("spad", "iso")
VARIANTS = (
    (WeightMode.FAMD, SubspaceMode.FIRST),
    (WeightMode.FAMD, SubspaceMode.FIRST_LAST),
    (WeightMode.KURTOSIS, SubspaceMode.FIRST),
    (WeightMode.KURTOSIS, SubspaceMode.FIRST_LAST),
)


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException) -> None:
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    """Everything needed to reproduce a run.

    Input is either ``csv`` + ``schema`` or a simulated dataset named by
    ``sim`` (whose generator parameters are the ``sim_*`` fields).
    """

    csv: str | None = None
    schema: str | None = None
    sim: str | None = None
    sim_c: int = 300
    sim_s: int = 10
    sim_sigma: float = 3.0
    sim_n_inliers: int = 1000
    sim_n_anomalies: int = 50
    sim_delta: float = 0.05
    sim_n: int = 2000
    sim_covariance: str = "random"
    weighting: str = WeightMode.KURTOSIS.value
    kurtosis_cap: float = DEFAULT_KURTOSIS_CAP
    mode: str = SubspaceMode.FIRST_LAST.value
    k: int = 5
    scorers: tuple[str, ...] = SCORERS
    trees: int = 100
    psi: int = 256
    bins: int | None = None
    seed: int = 0
    sweep_dims: bool = False
    out_dir: str | None = None

    def __post_init__(self) -> None:
        self.weighting = WeightMode(self.weighting).value
        self.mode = SubspaceMode(self.mode).value
        self.scorers = tuple(self.scorers)
        if not self.scorers or any(s not in SCORERS for s in self.scorers):
            raise ValueError(f"scorers must be a non-empty subset of {SCORERS}, got {self.scorers}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if (self.sim is None) == (self.csv is None):
            raise ValueError("give exactly one input source: csv (with schema) or sim")
        if self.csv is not None and self.schema is None:
            raise ValueError("csv input requires a schema file")
        if self.sim is not None:
            self.sim = SimKind(self.sim).value

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> PipelineConfig:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["scorers"] = list(self.scorers)
        return d

    def sim_spec(self) -> SimSpec:
        return SimSpec(
            kind=SimKind(self.sim), seed=self.seed, c=self.sim_c, s=self.sim_s, sigma=self.sim_sigma,
            n_inliers=self.sim_n_inliers, n_anomalies=self.sim_n_anomalies, delta=self.sim_delta,
            n=self.sim_n, covariance=self.sim_covariance,
        )


def load_config(path: str | Path) -> dict[str, Any]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return data


def load_input(cfg: PipelineConfig) -> MixedTable:
    if cfg.sim is not None:
        return generate(cfg.sim_spec())
    return load_csv(cfg.csv, read_schema(cfg.schema))


class _Stage:
    """Context manager re-raising any failure as :class:`PipelineError`."""

    def __init__(self, name: str) -> None:
        self.name = name

    def __enter__(self) -> None:
        return None

    def __exit__(self, exc_type, exc, tb) -> bool:
        if exc is not None and not isinstance(exc, PipelineError):
            raise PipelineError(self.name, exc) from exc
        return False


@dataclass
class RunResult:
    table: MixedTable
    scores: list[ScoreVector]
    auc: dict[str, float] | None = None
    encoded: EncodedMatrix | None = None
    embedding: Embedding | None = None
    selection: SubspaceSelection | None = None
    per_dim_auc: np.ndarray | None = None
    notes: list[str] = field(default_factory=list)
    files: dict[str, Path] = field(default_factory=dict)


def variant_name(weighting: WeightMode | str, mode: SubspaceMode | str) -> str:
    return f"{WeightMode(weighting).value}-{SubspaceMode(mode).value}"


def embed_table(table: MixedTable, weighting: str, cap: float) -> tuple[EncodedMatrix, Embedding]:
    with _Stage("encode"):
        encoded = encode(table.without_labels())
    with _Stage("weight"):
        weights = make_weights(encoded.stats, weighting, cap)
    with _Stage("embed"):
        embedding = fit_embedding(encoded, weights)
    return encoded, embedding


def ingest(cfg: PipelineConfig) -> MixedTable:
    with _Stage("ingest"):
        return load_input(cfg)


def select_with_notes(embedding: Embedding, mode: str, k: int, notes: list[str]) -> SubspaceSelection:
    with _Stage("select"), warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sel = select_subspace(embedding, mode, k)
    if sel.clamped:
        notes.append(f"k={sel.requested_k} clamped to effective rank {embedding.effective_rank}")
    return sel


def score_matrix(data: np.ndarray, scorers: Iterable[str], cfg: PipelineConfig, prefix: str) -> list[ScoreVector]:
    out = []
    for name in scorers:
        with _Stage(f"score:{name}"):
            if name == "spad":
                sv = spad_score(spad_fit(data, bins=cfg.bins), data)
            else:
                sv = iso_score(iso_fit(data, n_trees=cfg.trees, psi=cfg.psi, seed=cfg.seed), data)
        out.append(sv.renamed(f"{prefix}-{name}" if prefix else name))
    return out


def _evaluate(table: MixedTable, scores: Sequence[ScoreVector], notes: list[str]) -> dict[str, float] | None:
    if table.labels is None:
        notes.append("labels absent; AUC summary omitted")
        return None
    with _Stage("evaluate"):
        return {s.method: auc_roc(s, table.labels) for s in scores}


def run_pipeline(cfg: PipelineConfig, table: MixedTable | None = None) -> RunResult:
    """Run the embedded pipeline and, if ``cfg.out_dir`` is set, write its outputs."""
    notes: list[str] = []
    if table is None:
        table = ingest(cfg)
    encoded, embedding = embed_table(table, cfg.weighting, cfg.kurtosis_cap)
    selection = select_with_notes(embedding, cfg.mode, cfg.k, notes)
    data = project(embedding, selection)
    scores = score_matrix(data, cfg.scorers, cfg, variant_name(cfg.weighting, cfg.mode))
    auc = _evaluate(table, scores, notes)
    per_dim = None
    if cfg.sweep_dims:
        if table.labels is None:
            notes.append("labels absent; per-dimension AUC omitted")
        else:
            with _Stage("sweep-dims"):
                per_dim = per_dimension_auc(embedding, table.labels, bins=cfg.bins)
    result = RunResult(table, scores, auc, encoded, embedding, selection, per_dim, notes)
    if cfg.out_dir is not None:
        with _Stage("write"):
            write_run(cfg, result, Path(cfg.out_dir))
    return result


def run_baselines(cfg: PipelineConfig, table: MixedTable | None = None) -> RunResult:
    """SPAD on the raw mixed table and Isolation Forest on one-hot + standardized columns."""
    notes: list[str] = []
    if table is None:
        table = ingest(cfg)
    blind = table.without_labels()
    scores = []
    if "spad" in cfg.scorers:
        with _Stage("score:original-spad"):
            scores.append(spad_score(spad_fit(blind, bins=cfg.bins), blind).renamed("original-spad"))
    if "iso" in cfg.scorers:
        with _Stage("encode"):
            parts = [one_hot(blind)]
            if blind.n_continuous:
                parts.append(standardize(blind)[0])
            raw = np.hstack(parts)
        with _Stage("score:onehot-iso"):
            sv = iso_score(iso_fit(raw, n_trees=cfg.trees, psi=cfg.psi, seed=cfg.seed), raw)
        scores.append(sv.renamed("onehot-iso"))
    auc = _evaluate(table, scores, notes)
    result = RunResult(table, scores, auc, notes=notes)
    if cfg.out_dir is not None:
        with _Stage("write"):
            write_run(cfg, result, Path(cfg.out_dir))
    return result


@dataclass(frozen=True)
class GridResult:
    """SPAD AUC for every (variant, k); ``best`` maps variant to ``(k, auc)``."""

    curves: dict[str, np.ndarray]
    best: dict[str, tuple[int, float]]
    effective_rank: dict[str, int]


def spad_k_curve(embedding: Embedding, labels: np.ndarray, mode: str, k_max: int | None, bins: int | None = None) -> np.ndarray:
    """SPAD AUC for k = 1..min(k_max, effective rank) under ``mode``.

    SPAD is a sum over independently fitted dimensions, so the per-dimension
    terms are computed once and summed for each selection.
    """
    r = embedding.effective_rank
    top = r if k_max is None else min(k_max, r)
    coords = embedding.F[:, :r]
    contrib = spad_contributions(spad_fit(coords, bins=bins), coords)
    out = np.empty(top)
    for k in range(1, top + 1):
        sel = select_subspace(embedding, mode, k)
        out[k - 1] = auc_roc(sum_contributions(contrib[:, list(sel.indices)]), labels)
    return out


def grid_search_k(cfg: PipelineConfig, k_max: int | None = None, table: MixedTable | None = None) -> GridResult:
    """Best SPAD subspace size per embedding variant (needs labels).

    Ties resolve to the smallest ``k``.
    """
    if table is None:
        table = ingest(cfg)
    if table.labels is None:
        raise PipelineError("grid-k", ValueError("grid search needs labelled data"))
    curves, best, ranks = {}, {}, {}
    embeddings: dict[WeightMode, Embedding] = {}
    for weighting, mode in VARIANTS:
        if weighting not in embeddings:
            embeddings[weighting] = embed_table(table, weighting.value, cfg.kurtosis_cap)[1]
        emb = embeddings[weighting]
        name = variant_name(weighting, mode)
        with _Stage("grid-k"):
            curve = spad_k_curve(emb, table.labels, mode.value, k_max, cfg.bins)
        i = int(np.argmax(curve))
        curves[name], best[name], ranks[name] = curve, (i + 1, float(curve[i])), emb.effective_rank
    return GridResult(curves, best, ranks)


# ---------------------------------------------------------------------------
# output files

def _fmt(x: float) -> str:
    return repr(float(x))


def atomic_write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def scores_csv(scores: Sequence[ScoreVector]) -> str:
    rows = ((i, s.method, float(v)) for s in scores for i, v in enumerate(s.scores))
    return csv_text(("row_index", "score_method", "score"), rows)


def read_scores_csv(path: str | Path) -> list[ScoreVector]:
    by_method: dict[str, dict[int, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["row_index", "score_method", "score"]:
            raise ValueError(f"{path}: expected header row_index,score_method,score")
        for row in reader:
            by_method.setdefault(row["score_method"], {})[int(row["row_index"])] = float(row["score"])
    out = []
    for method, values in by_method.items():
        n = len(values)
        if sorted(values) != list(range(n)):
            raise ValueError(f"{path}: method {method!r} does not cover rows 0..{n - 1}")
        out.append(ScoreVector(np.array([values[i] for i in range(n)]), method))
    return out


def spectrum_csv(embedding: Embedding, selection: SubspaceSelection | None = None) -> str:
    chosen = set(selection.indices) if selection is not None else set()
    rows = (
        (i, float(s), float(s * s), int(i < embedding.effective_rank), int(i in chosen))
        for i, s in enumerate(embedding.singular_values)
    )
    return csv_text(("index", "singular_value", "squared", "non_null", "selected"), rows)


def coords_csv(embedding: Embedding, selection: SubspaceSelection) -> str:
    header = ["row_index"] + [f"dim_{i}" for i in selection.indices]
    data = project(embedding, selection)
    return csv_text(header, ([i, *map(float, row)] for i, row in enumerate(data)))


def auc_csv(auc: dict[str, float]) -> str:
    return csv_text(("score_method", "auc"), ((m, float(a)) for m, a in auc.items()))


def per_dim_csv(values: np.ndarray) -> str:
    return csv_text(("dimension", "auc"), ((i, float(a)) for i, a in enumerate(values)))


def grid_csvs(grid: GridResult) -> tuple[str, str]:
    curve = csv_text(
        ("variant", "k", "auc"),
        ((name, k + 1, float(a)) for name, c in grid.curves.items() for k, a in enumerate(c)),
    )
    best = csv_text(
        ("variant", "best_k", "best_auc", "effective_rank"),
        ((name, k, float(a), grid.effective_rank[name]) for name, (k, a) in grid.best.items()),
    )
    return curve, best


def pair_table_csvs(pt: PairTable) -> dict[str, str]:
    methods = list(pt.methods)

    def matrix(mat: np.ndarray) -> str:
        return csv_text(["method", *methods], ([m, *map(float, row)] for m, row in zip(methods, mat)))

    label_col = pt.labels if pt.labels is not None else [None] * pt.scores.shape[0]
    pairs = csv_text(
        ["row_index", "label", *methods],
        ([i, "" if lab is None else int(lab), *map(float, row)] for i, (lab, row) in enumerate(zip(label_col, pt.scores))),
    )
    out = {"pairs.csv": pairs, "overlap_combined.csv": matrix(pt.combined),
           "correlation_spearman.csv": matrix(pt.spearman), "correlation_pearson.csv": matrix(pt.pearson)}
    for q, mat in pt.overlap.items():
        out[f"overlap_top{round(q * 100):02d}.csv"] = matrix(mat)
    return out


def manifest_text(cfg: PipelineConfig, extra: dict[str, Any]) -> str:
    body = {"artifact_version": __version__, "config": cfg.to_dict(), "seed": cfg.seed, **extra}
    return json.dumps(body, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj: Any) -> Any:
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_run(cfg: PipelineConfig, result: RunResult, out_dir: Path) -> dict[str, Path]:
    files = {}
    files["scores"] = atomic_write(out_dir / "scores.csv", scores_csv(result.scores))
    if result.auc is not None:
        files["auc"] = atomic_write(out_dir / "auc.csv", auc_csv(result.auc))
    if result.embedding is not None:
        files["spectrum"] = atomic_write(out_dir / "spectrum.csv", spectrum_csv(result.embedding, result.selection))
    if result.per_dim_auc is not None:
        files["per_dim_auc"] = atomic_write(out_dir / "per_dim_auc.csv", per_dim_csv(result.per_dim_auc))
    extra: dict[str, Any] = {
        "n_rows": result.table.n,
        "methods": [s.method for s in result.scores],
        "notes": result.notes,
        "outputs": sorted(p.name for p in files.values()),
    }
    if result.embedding is not None:
        extra["effective_rank"] = result.embedding.effective_rank
        extra["selected_indices"] = list(result.selection.indices)
    files["manifest"] = atomic_write(out_dir / "manifest.json", manifest_text(cfg, extra))
    result.files.update(files)
    return files
