"""Transform a mixed table into the centred and scaled matrix ``Z = [Z_D, Z_C]``.

All moments use the population (``1/n``) convention so that the FAMD inertia
identities hold exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tabular import MixedTable, TableError

# Relative tolerance below which a continuous column is treated as constant.
DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class EncodeStats:
    """Statistics fitted while encoding.

    Attributes:
        p: category proportions, concatenated in variable then level order.
        mu, sigma, kappa: per continuous column mean, population standard
            deviation and (non-excess) kurtosis.
        block_sizes: number of levels of each categorical variable.
        degenerate: mask of constant continuous columns.
    """

    p: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray
    kappa: np.ndarray
    block_sizes: tuple[int, ...]
    degenerate: np.ndarray

    @property
    def n_discrete(self) -> int:
        return len(self.p)

    @property
    def n_continuous(self) -> int:
        return len(self.mu)


@dataclass(frozen=True)
class ColumnMeta:
    variable: str
    level: str | None = None
    proportion: float | None = None

    @property
    def is_continuous(self) -> bool:
        return self.level is None


@dataclass(frozen=True)
class EncodedMatrix:
    Z: np.ndarray
    column_meta: tuple[ColumnMeta, ...]
    stats: EncodeStats

    @property
    def n(self) -> int:
        return self.Z.shape[0]

    @property
    def t(self) -> int:
        return self.Z.shape[1]


def proportions(table: MixedTable) -> np.ndarray:
    """Fraction of rows taking each level, concatenated across variables."""
    if table.n < 1:
        raise TableError("table has no rows")
    parts = [np.bincount(c.codes, minlength=c.n_levels) / table.n for c in table.categorical]
    return np.concatenate(parts) if parts else np.empty(0)


def one_hot(table: MixedTable) -> np.ndarray:
    """Indicator matrix ``Y`` with one column per (variable, level)."""
    blocks = []
    for c in table.categorical:
        block = np.zeros((table.n, c.n_levels))
        block[np.arange(table.n), c.codes] = 1.0
        blocks.append(block)
    return np.hstack(blocks) if blocks else np.empty((table.n, 0))


def scale_onehot(Y: np.ndarray, p: np.ndarray) -> np.ndarray:
    """``Y / p - 1``: zero-mean indicator columns inflated for rare levels."""
    p = np.asarray(p, dtype=np.float64)
    if np.any(p <= 0) or np.any(p > 1):
        raise ValueError("proportions must lie in (0, 1]")
    return np.asarray(Y, dtype=np.float64) / p - 1.0


def _degenerate_mask(X: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    if X.shape[1] == 0:
        return np.zeros(0, dtype=bool)
    scale = np.maximum(np.abs(X).max(axis=0), 1.0)
    return sigma <= DEGENERATE_RTOL * scale


def standardize(table: MixedTable) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Centre and scale continuous columns to unit population variance.

    Returns ``(Z_C, mu, sigma, degenerate)``. Constant columns come back as
    zeros with ``sigma = 0`` and ``degenerate`` set.
    """
    if table.n < 2:
        raise TableError(f"need at least 2 rows to standardize, got {table.n}")
    X = table.continuous_matrix()
    mu = X.mean(axis=0)
    centred = X - mu
    sigma = np.sqrt((centred**2).mean(axis=0))
    degenerate = _degenerate_mask(X, sigma)
    sigma = np.where(degenerate, 0.0, sigma)
    Zc = np.zeros_like(centred)
    ok = ~degenerate
    Zc[:, ok] = centred[:, ok] / sigma[ok]
    return Zc, mu, sigma, degenerate


def kurtosis(table: MixedTable) -> np.ndarray:
    """Non-excess sample kurtosis ``m4 / m2**2``; constant columns get 3."""
    if table.n < 2:
        raise TableError(f"need at least 2 rows for kurtosis, got {table.n}")
    X = table.continuous_matrix()
    centred = X - X.mean(axis=0)
    m2 = (centred**2).mean(axis=0)
    m4 = (centred**4).mean(axis=0)
    degenerate = _degenerate_mask(X, np.sqrt(m2))
    out = np.full(X.shape[1], 3.0)
    ok = ~degenerate
    out[ok] = m4[ok] / m2[ok] ** 2
    return out


def encode(table: MixedTable) -> EncodedMatrix:
    if table.n_categorical + table.n_continuous == 0:
        raise TableError("table has no feature columns")
    if table.n < 2:
        raise TableError(f"need at least 2 rows, got {table.n}")
    p = proportions(table)
    Zd = scale_onehot(one_hot(table), p)
    Zc, mu, sigma, degenerate = standardize(table)
    kappa = kurtosis(table)

    meta = []
    offset = 0
    for c in table.categorical:
        for q, level in enumerate(c.levels):
            meta.append(ColumnMeta(c.name, level, float(p[offset + q])))
        offset += c.n_levels
    meta.extend(ColumnMeta(c.name) for c in table.continuous)

    stats = EncodeStats(
        p=p,
        mu=mu,
        sigma=sigma,
        kappa=kappa,
        block_sizes=tuple(c.n_levels for c in table.categorical),
        degenerate=degenerate,
    )
    return EncodedMatrix(np.hstack([Zd, Zc]), tuple(meta), stats)
