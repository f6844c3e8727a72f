import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from famdad.embed import Embedding
from famdad.evaluate import auc_roc, pair_table, per_dimension_auc, top_indices, top_overlap
from famdad.pipeline import PipelineConfig, embed_table, ingest
from famdad.score import ScoreVector
from famdad.weight import WeightMode


def brute_auc(scores, labels):
    pos, neg = scores[labels], scores[~labels]
    wins = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
    return wins / (pos.size * neg.size)


@pytest.mark.parametrize(
    "scores, labels, expected",
    [
        ([0.1, 0.2, 0.9, 0.8], [0, 0, 1, 1], 1.0),
        ([1, 1, 1, 1], [0, 1, 0, 1], 0.5),
        ([3, 1, 2, 2], [1, 0, 0, 1], 0.875),
        ([0.9, 0.8, 0.1, 0.2], [0, 0, 1, 1], 0.0),
    ],
)
def test_auc_examples(scores, labels, expected):
    assert auc_roc(np.array(scores, float), np.array(labels, bool)) == expected


def test_auc_errors():
    with pytest.raises(ValueError, match="at least one"):
        auc_roc(np.arange(3.0), np.zeros(3, bool))
    with pytest.raises(ValueError, match="shape"):
        auc_roc(np.arange(3.0), np.array([True, False]))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 100), levels=st.integers(1, 6))
def test_auc_matches_brute_force_and_transforms(seed, n, levels):
    rng = np.random.default_rng(seed)
    s = rng.integers(0, levels, n).astype(float)
    labels = rng.random(n) < 0.3
    labels[0], labels[-1] = True, False
    auc = auc_roc(s, labels)
    assert auc == brute_auc(s, labels)
    assert auc_roc(np.exp(s) * 2 + 1, labels) == pytest.approx(auc, abs=1e-12)
    assert auc_roc(-s, labels) == pytest.approx(1 - auc, abs=1e-12)


def test_top_indices_and_overlap():
    s = np.array([5.0, 1, 5, 3, 0, 2, 4, 6, 7, 8])
    np.testing.assert_array_equal(top_indices(s, 0.3), [9, 8, 7])
    # ties resolved toward the lower row index
    np.testing.assert_array_equal(top_indices(np.array([1.0, 2, 2, 2]), 0.5), [1, 2])
    assert top_overlap(s, s, 0.2) == 1.0
    assert top_overlap(s, -s, 0.2) == 0.0
    assert top_indices(np.arange(100.0), 0.05).size == 5
    assert top_indices(np.arange(101.0), 0.05).size == 6
    with pytest.raises(ValueError):
        top_indices(s, 0.0)
    with pytest.raises(ValueError, match="length"):
        top_overlap(s, s[:5], 0.1)


def test_pair_table_properties(rng):
    labels = np.zeros(200, bool)
    labels[:10] = True
    base = rng.normal(size=200) + 3 * labels
    scores = [ScoreVector(base, "a"), ScoreVector(base + rng.normal(scale=0.5, size=200), "b"),
              ScoreVector(rng.normal(size=200), "c")]
    pt = pair_table(scores, labels)
    assert pt.methods == ("a", "b", "c")
    for q, mat in pt.overlap.items():
        np.testing.assert_allclose(mat, mat.T)
        np.testing.assert_allclose(np.diag(mat), pt.auc)
        assert np.all((mat >= 0) & (mat <= 1))
    assert pt.combined[0, 1] == pt.overlap[0.05][0, 1]
    assert pt.combined[1, 0] == pt.overlap[0.10][1, 0]
    np.testing.assert_allclose(np.diag(pt.spearman), 1.0)
    np.testing.assert_allclose(np.diag(pt.pearson), 1.0)
    assert pt.spearman.shape == (3, 3)


def test_pair_table_two_methods_without_labels(rng):
    x = rng.normal(size=50)
    pt = pair_table([ScoreVector(x, "a"), ScoreVector(x**3, "b")])
    assert np.isnan(pt.auc).all()
    assert pt.spearman[0, 1] == pytest.approx(1.0)
    assert pt.pearson[0, 1] < 1.0
    with pytest.raises(ValueError):
        pair_table([ScoreVector(x, "a")])


def test_per_dimension_auc_oracle_and_noise(rng):
    n = 2000
    labels = np.zeros(n, bool)
    labels[rng.choice(n, 100, replace=False)] = True
    oracle = np.where(labels, 0.0, rng.normal(10, 0.1, n))
    noise = rng.normal(size=n)
    F = np.column_stack([oracle, noise])
    emb = Embedding(np.array([1.0, 1.0]), np.eye(2), F, 2, WeightMode.FAMD)
    auc = per_dimension_auc(emb, labels)
    assert auc[0] == 1.0
    assert abs(auc[1] - 0.5) <= 0.1


def test_per_dimension_auc_sim3_shape():
    table = ingest(PipelineConfig(sim="sim3", seed=0))
    _, emb = embed_table(table.without_labels(), "famd", 10.0)
    auc = per_dimension_auc(emb, table.labels)
    assert auc.size == emb.effective_rank
    assert auc[:10].mean() >= 0.7
    middle = auc[49:250]
    assert abs(middle.mean() - 0.5) <= 0.1
    # single-dimension AUC over 50 anomalies has sd near 0.04, so a few stray past 0.1
    assert np.mean(np.abs(middle - 0.5) <= 0.1) >= 0.9
