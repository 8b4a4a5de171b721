"""Unbiased MMD and permutation two-sample tests on precomputed Gram matrices."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from math import ceil
from typing import Sequence

import numpy as np

from .kernel import DEFAULT_NORMALIZATION, NormalizationConfig, gram_matrix


@dataclass(frozen=True)
class TestConfig:
    """Level, number of permutations and seed of a permutation test."""

    __test__ = False  # not a pytest class

    alpha: float = 0.05
    permutations: int = 2000
    seed: int | None = None

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.permutations < 100:
            raise ValueError(f"need at least 100 permutations, got {self.permutations}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TestReport:
    """Outcome of one two-sample test; ``reject`` iff ``mmd > threshold``."""

    __test__ = False

    mmd: float
    threshold: float
    p_value: float
    reject: bool
    alpha: float
    permutations: int
    seed: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "TestReport":
        return cls(
            float(doc["mmd"]),
            float(doc["threshold"]),
            float(doc["p_value"]),
            bool(doc["reject"]),
            float(doc["alpha"]),
            int(doc["permutations"]),
            doc.get("seed"),
        )


def _as_array(gram) -> np.ndarray:
    K = np.asarray(gram, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"Gram matrix must be square, got shape {K.shape}")
    return K


def mmd_unbiased(gram, n: int, m: int) -> float:
    """Unbiased MMD^2 estimate; the first ``n`` rows of ``gram`` are sample X.

    The value can be negative.
    """
    K = _as_array(gram)
    if n < 2 or m < 2:
        raise ValueError(f"need at least two samples per group, got n={n}, m={m}")
    if K.shape[0] != n + m:
        raise ValueError(f"Gram matrix has size {K.shape[0]}, expected n + m = {n + m}")
    Kxx, Kyy, Kxy = K[:n, :n], K[n:, n:], K[:n, n:]
    xx = (Kxx.sum() - np.trace(Kxx)) / (n * (n - 1))
    yy = (Kyy.sum() - np.trace(Kyy)) / (m * (m - 1))
    return float(xx + yy - 2.0 * Kxy.sum() / (n * m))


def _mmd_from_labels(K: np.ndarray, labels: np.ndarray, n: int, m: int) -> np.ndarray:
    """MMD^2 for each row of the 0/1 membership matrix ``labels`` (1 = sample X)."""
    K0 = K - np.diag(np.diag(K))
    a = labels.astype(float)
    b = 1.0 - a
    Ka0, Kb0 = a @ K0, b @ K0
    xx = np.einsum("pi,pi->p", Ka0, a)
    yy = np.einsum("pi,pi->p", Kb0, b)
    xy = np.einsum("pi,pi->p", a @ K, b)
    return xx / (n * (n - 1)) + yy / (m * (m - 1)) - 2.0 * xy / (n * m)


def null_distribution(gram, n: int, m: int, permutations: int, rng) -> np.ndarray:
    """MMD^2 under ``permutations`` random relabelings of the pooled sample."""
    K = _as_array(gram)
    rng = np.random.default_rng(rng)
    base = np.zeros(n + m, dtype=np.int8)
    base[:n] = 1
    labels = rng.permuted(np.broadcast_to(base, (permutations, n + m)), axis=1)
    out = np.empty(permutations)
    chunk = 512
    for start in range(0, permutations, chunk):
        out[start : start + chunk] = _mmd_from_labels(K, labels[start : start + chunk], n, m)
    return out


def quantile_threshold(null: np.ndarray, alpha: float) -> float:
    """The ``ceil((1 - alpha) P)``-th smallest of ``P`` null values (at least the 1st)."""
    ordered = np.sort(np.asarray(null, dtype=float))
    k = max(ceil((1.0 - alpha) * len(ordered) - 1e-9), 1)
    return float(ordered[k - 1])


def permutation_test(gram, n: int, m: int, cfg: TestConfig = TestConfig(), rng=None):
    """Permutation test of ``H0: X and Y share a distribution``.

    Each permutation re-indexes the same Gram matrix. ``rng`` overrides
    ``cfg.seed`` when given (a Generator or anything ``default_rng`` accepts).

    Returns
    -------
    report : TestReport
    null : ndarray
        The permuted MMD values, for histograms.
    """
    observed = mmd_unbiased(gram, n, m)
    null = null_distribution(gram, n, m, cfg.permutations, cfg.seed if rng is None else rng)
    threshold = quantile_threshold(null, cfg.alpha)
    report = TestReport(
        mmd=observed,
        threshold=threshold,
        p_value=float(np.mean(null >= observed)),
        reject=bool(observed > threshold),
        alpha=cfg.alpha,
        permutations=cfg.permutations,
        seed=cfg.seed,
    )
    return report, null


def two_sample_test(
    paths_x: Sequence,
    paths_y: Sequence,
    M: int,
    kernel: str = "horner",
    normalized: bool = False,
    cfg: TestConfig = TestConfig(),
    normalization: NormalizationConfig = DEFAULT_NORMALIZATION,
    mode: str | None = None,
    rng=None,
    n_jobs: int | None = None,
) -> TestReport:
    """Signature-kernel MMD permutation test between two sets of paths."""
    paths_x, paths_y = list(paths_x), list(paths_y)
    specs = {p.spec for p in paths_x + paths_y if hasattr(p, "spec")}
    if len(specs) > 1:
        raise ValueError(f"all paths must share one group, got {specs}")
    gram = gram_matrix(
        paths_x + paths_y, M, kernel, normalized, normalization, mode, n_jobs=n_jobs
    )
    report, _ = permutation_test(gram, len(paths_x), len(paths_y), cfg, rng)
    return report
