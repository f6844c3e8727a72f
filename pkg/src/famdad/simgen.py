"""Seeded generators for the synthetic benchmark datasets.

Randomness comes from numpy's PCG64 seeded through ``SeedSequence``, so a
given seed yields the same table on every platform. Inlier rows come first,
anomaly rows last.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .tabular import CategoricalColumn, ContinuousColumn, MixedTable


class SimKind(str, enum.Enum):
    SIM1 = "sim1"
    SIM2 = "sim2"
    SIM3 = "sim3"
    UNSTRUCTURED = "unstructured"


@dataclass(frozen=True)
class SimSpec:
    """Parameters for :func:`generate`.

    ``c``, ``s``, ``sigma``, ``n_inliers`` and ``n_anomalies`` drive Sim3;
    ``c``, ``sigma``, ``delta``, ``n`` and ``covariance`` drive the
    unstructured model. Sim1 and Sim2 only use ``seed``.
    """

    kind: SimKind = SimKind.SIM1
    seed: int = 0
    c: int = 300
    s: int = 10
    sigma: float = 3.0
    n_inliers: int = 1000
    n_anomalies: int = 50
    delta: float = 0.05
    n: int = 2000
    covariance: np.ndarray | str = "random"

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", SimKind(self.kind))
        if self.c < 1:
            raise ValueError(f"c must be >= 1, got {self.c}")
        if self.kind is SimKind.SIM3 and not 1 <= self.s <= self.c:
            raise ValueError(f"need 1 <= s <= c, got s={self.s}, c={self.c}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _continuous_columns(X: np.ndarray, prefix: str = "X") -> tuple[ContinuousColumn, ...]:
    return tuple(ContinuousColumn(f"{prefix}{j + 1}", X[:, j]) for j in range(X.shape[1]))


SIM1_ANOMALIES = np.array(
    [
        [-1.75, 0.34, 0, 0, 0, 0, 0, 0, 0, 0],
        [0.98, 0.51, 0, 1, 0, 1, 1, 1, 1, 0],
        [5.0, 5.0, 0, 1, 1, 1, 1, 1, 1, 1],
        [-4.0, -4.0, 1, 0, 1, 1, 1, 1, 1, 1],
    ]
)


def gen_sim1(seed: int = 0) -> MixedTable:
    """100 inliers plus the four fixed anomaly rows; X3..X10 are binary categoricals."""
    rng = _rng(seed)
    n_in = 100
    cont = rng.standard_normal((n_in, 2))
    bern = rng.integers(0, 2, size=(n_in, 4))
    ones = np.ones((n_in, 4), dtype=np.int64)
    X = np.vstack([np.hstack([cont, bern, ones]), SIM1_ANOMALIES])
    continuous = _continuous_columns(X[:, :2])
    categorical = tuple(
        CategoricalColumn.from_values(f"X{j + 1}", [str(int(v)) for v in X[:, j]]) for j in range(2, 10)
    )
    labels = np.r_[np.zeros(n_in, dtype=bool), np.ones(len(SIM1_ANOMALIES), dtype=bool)]
    return MixedTable(continuous, categorical, labels)


SIM2_CLUSTERS = ((22, 5.0, "1"), (28, 5.0, "2"), (33, -5.0, "3"), (17, -5.0, "4"))
SIM2_ANOMALIES = ((0.0, "3"), (5.0, "3"), (-5.0, "1"))
SIM2_SD = 0.1


def gen_sim2(seed: int = 0) -> MixedTable:
    """Four tight clusters keyed by a 4-level category plus three interplay anomalies."""
    rng = _rng(seed)
    x1, x2 = [], []
    for size, mean, level in SIM2_CLUSTERS:
        x1.extend(rng.normal(mean, SIM2_SD, size))
        x2.extend([level] * size)
    n_in = len(x1)
    for value, level in SIM2_ANOMALIES:
        x1.append(value)
        x2.append(level)
    labels = np.r_[np.zeros(n_in, dtype=bool), np.ones(len(SIM2_ANOMALIES), dtype=bool)]
    return MixedTable(
        (ContinuousColumn("X1", np.array(x1)),),
        (CategoricalColumn.from_values("X2", x2),),
        labels,
    )


def random_subspace(rng: np.random.Generator, c: int, s: int, max_tries: int = 10) -> np.ndarray:
    """Orthonormal ``c x s`` basis from the QR factor of a Gaussian matrix."""
    for _ in range(max_tries):
        Q, R = np.linalg.qr(rng.standard_normal((c, s)))
        diag = np.abs(np.diag(R))
        if diag.min() > 1e-8 * diag.max():
            return Q
    raise np.linalg.LinAlgError(f"QR of a random {c}x{s} matrix was rank deficient {max_tries} times")


def gen_sim3(spec: SimSpec) -> MixedTable:
    """Isotropic inliers; anomalies ``(I + sigma Q Q') r`` inflated on a random subspace."""
    rng = _rng(spec.seed)
    Q = random_subspace(rng, spec.c, spec.s)
    inliers = rng.standard_normal((spec.n_inliers, spec.c))
    r = rng.standard_normal((spec.n_anomalies, spec.c))
    anomalies = r + spec.sigma * (r @ Q) @ Q.T
    X = np.vstack([inliers, anomalies])
    labels = np.r_[np.zeros(spec.n_inliers, dtype=bool), np.ones(spec.n_anomalies, dtype=bool)]
    return MixedTable(_continuous_columns(X), (), labels)


def random_correlation(rng: np.random.Generator, c: int) -> np.ndarray:
    """``G G'`` for a ``c x c`` Gaussian ``G``, rescaled to unit diagonal."""
    G = rng.standard_normal((c, c))
    S = G @ G.T
    d = np.sqrt(np.diag(S))
    C = S / np.outer(d, d)
    np.fill_diagonal(C, 1.0)
    return C


def validate_correlation(C: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    C = np.asarray(C, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"covariance must be square, got shape {C.shape}")
    if not np.allclose(C, C.T, atol=tol, rtol=0):
        raise ValueError("covariance must be symmetric")
    if np.max(np.abs(np.diag(C) - 1.0)) > tol:
        raise ValueError("covariance must have unit diagonal")
    if np.linalg.eigvalsh(C).min() < -tol:
        raise ValueError("covariance must be positive semi-definite")
    return C


def gen_unstructured(spec: SimSpec) -> MixedTable:
    """Inliers ``N(0, C)`` with unit-diagonal ``C``; anomalies ``N(0, sigma^2 I)``.

    Exactly ``round(delta * n)`` rows (at least one) are anomalies.
    """
    rng = _rng(spec.seed)
    if isinstance(spec.covariance, str):
        if spec.covariance == "random":
            C = random_correlation(rng, spec.c)
        elif spec.covariance == "identity":
            C = np.eye(spec.c)
        else:
            raise ValueError(f"unknown covariance spec {spec.covariance!r}")
    else:
        C = validate_correlation(spec.covariance)
        if C.shape[0] != spec.c:
            raise ValueError(f"covariance is {C.shape[0]}x{C.shape[0]}, expected c={spec.c}")
    n_anom = max(1, int(round(spec.delta * spec.n)))
    n_in = spec.n - n_anom
    if n_in < 1:
        raise ValueError("no inliers left; increase n or decrease delta")
    evals, evecs = np.linalg.eigh(C)
    root = evecs * np.sqrt(np.clip(evals, 0.0, None))
    inliers = rng.standard_normal((n_in, spec.c)) @ root.T
    anomalies = spec.sigma * rng.standard_normal((n_anom, spec.c))
    X = np.vstack([inliers, anomalies])
    labels = np.r_[np.zeros(n_in, dtype=bool), np.ones(n_anom, dtype=bool)]
    return MixedTable(_continuous_columns(X), (), labels)


def generate(spec: SimSpec) -> MixedTable:
    if spec.kind is SimKind.SIM1:
        return gen_sim1(spec.seed)
    if spec.kind is SimKind.SIM2:
        return gen_sim2(spec.seed)
    if spec.kind is SimKind.SIM3:
        return gen_sim3(spec)
    return gen_unstructured(spec)
