"""Command line interface.

Every subcommand writes CSV files (plus a JSON manifest) into ``--out``.
Settings resolve as: command-line flags, then ``--config`` JSON, then defaults.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .embed import SubspaceMode, project
from .evaluate import auc_roc, pair_table, per_dimension_auc
from .pipeline import (
    PipelineConfig,
    PipelineError,
    atomic_write,
    auc_csv,
    coords_csv,
    embed_table,
    grid_csvs,
    grid_search_k,
    ingest,
    load_config,
    manifest_text,
    pair_table_csvs,
    per_dim_csv,
    read_scores_csv,
    run_baselines,
    run_pipeline,
    score_matrix,
    scores_csv,
    select_with_notes,
    spectrum_csv,
    variant_name,
)
from .simgen import SimKind
from .tabular import TableError, write_csv, write_schema
from .weight import WeightMode

log = logging.getLogger("famdad")

# argparse dest -> PipelineConfig field
_FIELD = {
    "csv": "csv", "schema": "schema", "sim": "sim", "seed": "seed",
    "c": "sim_c", "s": "sim_s", "sigma": "sim_sigma", "n_inliers": "sim_n_inliers",
    "n_anomalies": "sim_n_anomalies", "delta": "sim_delta", "n": "sim_n", "covariance": "sim_covariance",
    "weighting": "weighting", "kurtosis_cap": "kurtosis_cap", "k": "k", "mode": "mode",
    "trees": "trees", "psi": "psi", "bins": "bins", "out": "out_dir", "sweep_dims": "sweep_dims",
}


def _input_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input")
    g.add_argument("--config", help="JSON config file; flags override its values")
    g.add_argument("--csv", help="input CSV file")
    g.add_argument("--schema", help="schema file (one name=kind per line)")
    g.add_argument("--sim", choices=[k.value for k in SimKind], help="use a simulated dataset instead of a CSV")
    g.add_argument("--seed", type=int, help="seed for simulation and Isolation Forest (default 0)")
    _sim_args(p)


def _sim_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("simulation parameters")
    g.add_argument("--c", type=int, help="latent dimension (sim3, unstructured)")
    g.add_argument("--s", type=int, help="anomalous subspace dimension (sim3)")
    g.add_argument("--sigma", type=float, help="anomaly scale (sim3, unstructured)")
    g.add_argument("--n-inliers", type=int, help="inlier count (sim3)")
    g.add_argument("--n-anomalies", type=int, help="anomaly count (sim3)")
    g.add_argument("--delta", type=float, help="anomaly fraction (unstructured)")
    g.add_argument("--n", type=int, help="total rows (unstructured)")
    g.add_argument("--covariance", choices=["random", "identity"], help="inlier correlation (unstructured)")


def _embed_args(p: argparse.ArgumentParser, subspace: bool = True) -> None:
    g = p.add_argument_group("embedding")
    g.add_argument("--weighting", choices=[m.value for m in WeightMode], help="column weights (default wfamd)")
    g.add_argument("--kurtosis-cap", type=float, help="cap on kurtosis for wfamd weights (default 10)")
    if subspace:
        g.add_argument("--k", type=int, help="number of embedding dimensions (default 5)")
        g.add_argument("--mode", choices=[m.value for m in SubspaceMode], help="F: first k, FL: first and last (default FL)")


def _scorer_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scoring")
    g.add_argument("--scorer", choices=["spad", "iso", "both"], help="scorer(s) to run (default both)")
    g.add_argument("--trees", type=int, help="Isolation Forest trees (default 100)")
    g.add_argument("--psi", type=int, help="Isolation Forest subsample size (default 256)")
    g.add_argument("--bins", type=int, help="SPAD bins per continuous dimension (default ceil(log2 n)+1)")


def _out_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", required=False, help="output directory (default ./famdad-out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="famdad", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic dataset (CSV + schema)")
    p.add_argument("--kind", required=True, choices=[k.value for k in SimKind])
    p.add_argument("--seed", type=int, default=0)
    _sim_args(p)
    _out_arg(p)

    p = sub.add_parser("embed", help="write selected principal coordinates and the spectrum")
    _input_args(p)
    _embed_args(p)
    _out_arg(p)

    p = sub.add_parser("score", help="embed, select and score")
    _input_args(p)
    _embed_args(p)
    _scorer_args(p)
    _out_arg(p)

    p = sub.add_parser("eval", help="AUC, top-q overlaps and correlations for a scores CSV")
    p.add_argument("--scores", required=True, help="scores CSV (row_index,score_method,score)")
    _input_args(p)
    _out_arg(p)

    p = sub.add_parser("sweep-dims", help="SPAD AUC of every single embedding dimension")
    _input_args(p)
    _embed_args(p, subspace=False)
    p.add_argument("--bins", type=int)
    _out_arg(p)

    p = sub.add_parser("grid-k", help="best SPAD subspace size per embedding variant")
    _input_args(p)
    p.add_argument("--kurtosis-cap", type=float)
    p.add_argument("--bins", type=int)
    p.add_argument("--k-max", type=int, help="largest k to try (default: effective rank)")
    _out_arg(p)

    p = sub.add_parser("pipeline", help="full run: scores, AUC, spectrum, manifest")
    _input_args(p)
    _embed_args(p)
    _scorer_args(p)
    p.add_argument("--sweep-dims", action="store_true", default=None, help="also write per-dimension AUC")
    _out_arg(p)

    p = sub.add_parser("baselines", help="original-data SPAD and one-hot Isolation Forest")
    _input_args(p)
    _scorer_args(p)
    _out_arg(p)
    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    values: dict[str, Any] = {}
    if getattr(args, "config", None):
        values.update(load_config(args.config))
    for dest, name in _FIELD.items():
        v = getattr(args, dest, None)
        if v is not None:
            values[name] = v
    scorer = getattr(args, "scorer", None)
    if scorer is not None:
        values["scorers"] = ("spad", "iso") if scorer == "both" else (scorer,)
    # a flag-given source replaces a file-given one
    if getattr(args, "csv", None) is not None:
        values.pop("sim", None)
    elif getattr(args, "sim", None) is not None:
        values.pop("csv", None)
        values.pop("schema", None)
    values.setdefault("out_dir", "famdad-out")
    return PipelineConfig.from_dict(values)


def _write(out: Path, name: str, text: str) -> None:
    path = atomic_write(out / name, text)
    log.info("wrote %s", path)


def cmd_simulate(args: argparse.Namespace) -> None:
    cfg = resolve_config(argparse.Namespace(**{**vars(args), "sim": args.kind}))
    table = ingest(cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    schema = write_csv(table, out / "data.csv")
    write_schema(schema, out / "schema.txt")
    _write(out, "manifest.json", manifest_text(cfg, {"n_rows": table.n, "outputs": ["data.csv", "schema.txt"]}))


def cmd_embed(args: argparse.Namespace) -> None:
    cfg = resolve_config(args)
    table = ingest(cfg)
    notes: list[str] = []
    _, emb = embed_table(table, cfg.weighting, cfg.kurtosis_cap)
    sel = select_with_notes(emb, cfg.mode, cfg.k, notes)
    out = Path(cfg.out_dir)
    _write(out, "coords.csv", coords_csv(emb, sel))
    _write(out, "spectrum.csv", spectrum_csv(emb, sel))
    _write(out, "manifest.json", manifest_text(cfg, {
        "effective_rank": emb.effective_rank, "selected_indices": list(sel.indices), "notes": notes,
        "outputs": ["coords.csv", "spectrum.csv"],
    }))


def cmd_score(args: argparse.Namespace) -> None:
    cfg = resolve_config(args)
    table = ingest(cfg)
    notes: list[str] = []
    _, emb = embed_table(table, cfg.weighting, cfg.kurtosis_cap)
    sel = select_with_notes(emb, cfg.mode, cfg.k, notes)
    scores = score_matrix(project(emb, sel), cfg.scorers, cfg, variant_name(cfg.weighting, cfg.mode))
    out = Path(cfg.out_dir)
    _write(out, "scores.csv", scores_csv(scores))
    _write(out, "manifest.json", manifest_text(cfg, {
        "methods": [s.method for s in scores], "notes": notes, "outputs": ["scores.csv"],
    }))


def cmd_eval(args: argparse.Namespace) -> None:
    cfg = resolve_config(args)
    table = ingest(cfg)
    if table.labels is None:
        raise PipelineError("eval", TableError("input has no label column"))
    scores = read_scores_csv(args.scores)
    for s in scores:
        if len(s) != table.n:
            raise PipelineError("eval", ValueError(f"{s.method} has {len(s)} scores, table has {table.n} rows"))
    out = Path(cfg.out_dir)
    _write(out, "auc.csv", auc_csv({s.method: auc_roc(s, table.labels) for s in scores}))
    if len(scores) >= 2:
        for name, text in pair_table_csvs(pair_table(scores, table.labels)).items():
            _write(out, name, text)


def cmd_sweep_dims(args: argparse.Namespace) -> None:
    cfg = resolve_config(args)
    table = ingest(cfg)
    if table.labels is None:
        raise PipelineError("sweep-dims", TableError("input has no label column"))
    _, emb = embed_table(table, cfg.weighting, cfg.kurtosis_cap)
    out = Path(cfg.out_dir)
    _write(out, "per_dim_auc.csv", per_dim_csv(per_dimension_auc(emb, table.labels, bins=cfg.bins)))
    _write(out, "spectrum.csv", spectrum_csv(emb))


def cmd_grid_k(args: argparse.Namespace) -> None:
    cfg = resolve_config(args)
    grid = grid_search_k(cfg, args.k_max)
    curve, best = grid_csvs(grid)
    out = Path(cfg.out_dir)
    _write(out, "grid_k.csv", curve)
    _write(out, "grid_k_best.csv", best)


def cmd_pipeline(args: argparse.Namespace) -> None:
    result = run_pipeline(resolve_config(args))
    for note in result.notes:
        log.warning(note)
    if result.auc:
        for method, auc in result.auc.items():
            print(f"{method}\t{auc:.4f}")


def cmd_baselines(args: argparse.Namespace) -> None:
    result = run_baselines(resolve_config(args))
    for note in result.notes:
        log.warning(note)
    if result.auc:
        for method, auc in result.auc.items():
            print(f"{method}\t{auc:.4f}")


COMMANDS = {
    "simulate": cmd_simulate,
    "embed": cmd_embed,
    "score": cmd_score,
    "eval": cmd_eval,
    "sweep-dims": cmd_sweep_dims,
    "grid-k": cmd_grid_k,
    "pipeline": cmd_pipeline,
    "baselines": cmd_baselines,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except PipelineError as exc:
        print(f"famdad {args.command}: {exc}", file=sys.stderr)
        return 2
    except (TableError, ValueError, OSError) as exc:
        print(f"famdad {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
