import json

import numpy as np
import pytest

from famdad.pipeline import (
    PipelineConfig,
    PipelineError,
    grid_search_k,
    read_scores_csv,
    run_baselines,
    run_pipeline,
    scores_csv,
    variant_name,
)
from famdad.tabular import MixedTable

from conftest import random_mixed_table


def sim_cfg(**kw):
    return PipelineConfig(sim=kw.pop("sim", "sim1"), **kw)


def test_config_validation():
    with pytest.raises(ValueError, match="exactly one input"):
        PipelineConfig()
    with pytest.raises(ValueError, match="schema"):
        PipelineConfig(csv="x.csv")
    with pytest.raises(ValueError, match="scorers"):
        sim_cfg(scorers=("lof",))
    with pytest.raises(ValueError, match="unknown config keys"):
        PipelineConfig.from_dict({"sim": "sim1", "banana": 1})
    with pytest.raises(ValueError):
        sim_cfg(weighting="pca")


def test_config_roundtrip():
    cfg = sim_cfg(k=3, mode="F", scorers=("iso",), seed=9)
    assert PipelineConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_run_names_methods_and_reports_auc():
    result = run_pipeline(sim_cfg(seed=1))
    assert [s.method for s in result.scores] == ["wfamd-FL-spad", "wfamd-FL-iso"]
    assert set(result.auc) == {"wfamd-FL-spad", "wfamd-FL-iso"}
    assert result.selection.indices == (0, 1, 2, 6, 7)
    assert variant_name("famd", "F") == "famd-F"


def test_labels_never_reach_scoring(rng):
    table = random_mixed_table(rng, 120, 3, 3)
    cfg = sim_cfg(k=3)
    labeled = run_pipeline(cfg, table)
    blind = run_pipeline(cfg, table.without_labels())
    flipped = run_pipeline(cfg, MixedTable(table.continuous, table.categorical, ~table.labels))
    assert scores_csv(labeled.scores) == scores_csv(blind.scores) == scores_csv(flipped.scores)
    assert blind.auc is None and any("labels absent" in n for n in blind.notes)


def test_clamp_note_on_sim2():
    result = run_pipeline(sim_cfg(sim="sim2"))
    assert result.embedding.effective_rank == 4
    assert any("clamped to effective rank 4" in n for n in result.notes)


def test_written_outputs_and_manifest_reproduce(tmp_path):
    cfg = sim_cfg(seed=3, sweep_dims=True, out_dir=str(tmp_path / "a"))
    result = run_pipeline(cfg)
    out = tmp_path / "a"
    assert {p.name for p in out.iterdir()} == {"scores.csv", "auc.csv", "spectrum.csv", "per_dim_auc.csv", "manifest.json"}
    manifest = json.loads((out / "manifest.json").read_text())
    replay_cfg = PipelineConfig.from_dict({**manifest["config"], "out_dir": None})
    replay = run_pipeline(replay_cfg)
    assert scores_csv(replay.scores) == (out / "scores.csv").read_text()
    back = read_scores_csv(out / "scores.csv")
    for a, b in zip(back, result.scores):
        assert a.method == b.method
        np.testing.assert_array_equal(a.scores, b.scores)
    header = (out / "spectrum.csv").read_text().splitlines()[0]
    assert header == "index,singular_value,squared,non_null,selected"


def test_stage_errors_are_named(tmp_path):
    schema = tmp_path / "s.txt"
    schema.write_text("x=continuous\n")
    cfg = PipelineConfig(csv=str(tmp_path / "missing.csv"), schema=str(schema))
    with pytest.raises(PipelineError) as info:
        run_pipeline(cfg)
    assert info.value.stage == "ingest"


def test_baselines():
    result = run_baselines(sim_cfg(sim="sim2", seed=0))
    assert [s.method for s in result.scores] == ["original-spad", "onehot-iso"]
    assert all(0 <= v <= 1 for v in result.auc.values())


def test_grid_search_k():
    cfg = sim_cfg(seed=0)
    degenerate = grid_search_k(cfg, k_max=1)
    assert all(k == 1 for k, _ in degenerate.best.values())
    grid = grid_search_k(cfg)
    assert set(grid.best) == {"famd-F", "famd-FL", "wfamd-F", "wfamd-FL"}
    for name, (k, auc) in grid.best.items():
        curve = grid.curves[name]
        assert curve.size == grid.effective_rank[name]
        assert auc == curve.max() and auc >= curve[4]
        assert k == int(np.argmax(curve)) + 1


def test_grid_search_matches_direct_pipeline():
    cfg = sim_cfg(seed=2)
    grid = grid_search_k(cfg, k_max=6)
    for weighting, mode in [("famd", "F"), ("wfamd", "FL")]:
        for k in (2, 5):
            direct = run_pipeline(sim_cfg(seed=2, weighting=weighting, mode=mode, k=k, scorers=("spad",)))
            assert grid.curves[f"{weighting}-{mode}"][k - 1] == pytest.approx(next(iter(direct.auc.values())), abs=1e-12)


def test_grid_search_needs_labels(rng):
    with pytest.raises(PipelineError):
        grid_search_k(sim_cfg(), table=random_mixed_table(rng, 30, 2, 1).without_labels())
