import json
import subprocess
import sys

import pytest

from famdad.cli import build_parser, main, resolve_config


def run(*argv):
    return main([str(a) for a in argv])


def outputs(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_config_precedence(tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"sim": "sim3", "k": 7, "mode": "F", "trees": 50}))
    args = build_parser().parse_args(["pipeline", "--config", str(cfg_file), "--k", "3"])
    cfg = resolve_config(args)
    assert (cfg.sim, cfg.k, cfg.mode, cfg.trees, cfg.psi) == ("sim3", 3, "F", 50, 256)
    args = build_parser().parse_args(["pipeline", "--config", str(cfg_file), "--sim", "sim1", "--scorer", "iso"])
    cfg = resolve_config(args)
    assert cfg.sim == "sim1" and cfg.scorers == ("iso",)


def test_simulate_then_pipeline_on_csv(tmp_path):
    sim_dir, csv_out, sim_out = tmp_path / "sim", tmp_path / "csv-run", tmp_path / "sim-run"
    assert run("simulate", "--kind", "sim1", "--seed", 4, "--out", sim_dir) == 0
    assert {"data.csv", "schema.txt", "manifest.json"} <= set(outputs(sim_dir))
    assert run("pipeline", "--csv", sim_dir / "data.csv", "--schema", sim_dir / "schema.txt", "--seed", 4, "--out", csv_out) == 0
    assert run("pipeline", "--sim", "sim1", "--seed", 4, "--out", sim_out) == 0
    auc_csv = (csv_out / "auc.csv").read_text()
    assert auc_csv.splitlines()[0] == "score_method,auc"
    assert auc_csv == (sim_out / "auc.csv").read_text()
    assert (csv_out / "scores.csv").read_bytes() == (sim_out / "scores.csv").read_bytes()


def test_every_subcommand_runs(tmp_path):
    base = ["--sim", "sim1", "--seed", 1]
    assert run("embed", *base, "--k", 4, "--out", tmp_path / "embed") == 0
    assert (tmp_path / "embed" / "coords.csv").read_text().startswith("row_index,")
    assert run("score", *base, "--scorer", "both", "--out", tmp_path / "score") == 0
    scores = tmp_path / "score" / "scores.csv"
    assert run("eval", *base, "--scores", scores, "--out", tmp_path / "eval") == 0
    assert {"auc.csv", "pairs.csv", "overlap_combined.csv", "correlation_spearman.csv",
            "correlation_pearson.csv"} <= set(outputs(tmp_path / "eval"))
    assert run("sweep-dims", *base, "--out", tmp_path / "sweep") == 0
    assert run("grid-k", *base, "--k-max", 3, "--out", tmp_path / "grid") == 0
    assert (tmp_path / "grid" / "grid_k_best.csv").read_text().count("\n") == 5
    assert run("baselines", *base, "--out", tmp_path / "base") == 0


def test_repeated_runs_are_byte_identical(tmp_path):
    out = tmp_path / "run"
    argv = ["pipeline", "--sim", "sim3", "--c", 40, "--s", 4, "--sweep-dims", "--seed", 8, "--out", out]
    assert run(*argv) == 0
    first = outputs(out)
    assert run(*argv) == 0
    assert outputs(out) == first


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["pipeline", "--csv", "nope.csv", "--schema", "nope.txt"], "stage 'ingest' failed"),
        (["eval", "--sim", "sim1", "--scores", "nope.csv"], "nope.csv"),
        (["pipeline", "--sim", "sim1", "--k", "0"], "k must be"),
    ],
)
def test_errors_exit_two(tmp_path, capsys, argv, fragment):
    assert main(argv + ["--out", str(tmp_path)]) == 2
    assert fragment in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "famdad", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("famdad ")
