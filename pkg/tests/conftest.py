from __future__ import annotations

import numpy as np
import pytest

from famdad.tabular import CategoricalColumn, ContinuousColumn, MixedTable

_ACCEPTANCE: list[tuple[str, bool, str]] = []


def random_mixed_table(rng: np.random.Generator, n: int, n_cont: int, n_cat: int, max_levels: int = 5,
                       constant_cols: int = 0) -> MixedTable:
    """Random mixed table; ``constant_cols`` of the continuous columns are constant."""
    cont = []
    mix = rng.standard_normal((n_cont, n_cont))
    X = rng.standard_normal((n, n_cont)) @ mix if n_cont else np.empty((n, 0))
    for j in range(n_cont):
        values = np.full(n, 2.5) if j < constant_cols else X[:, j] * rng.uniform(0.1, 10) + rng.normal()
        cont.append(ContinuousColumn(f"x{j}", values))
    cats = []
    for j in range(n_cat):
        b = int(rng.integers(1, max_levels + 1))
        probs = rng.dirichlet(np.ones(b))
        codes = rng.choice(b, size=n, p=probs)
        cats.append(CategoricalColumn.from_values(f"c{j}", [f"L{v}" for v in codes]))
    labels = np.zeros(n, dtype=bool)
    labels[rng.choice(n, size=max(1, n // 20), replace=False)] = True
    return MixedTable(tuple(cont), tuple(cats), labels)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(name: str, passed: bool, detail: str) -> None:
        _ACCEPTANCE.append((name, bool(passed), detail))

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
