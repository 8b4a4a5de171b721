"""Signature kernels, tensor normalization and Gram matrices."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._parallel import parallel_map
from .signature import as_derivative, signature, signature_matrix, split_levels
from .tensor_algebra import TruncatedTensor, tt_inner

log = logging.getLogger(__name__)

KERNELS = ("horner", "naive")


PSI_PROFILES = ("printed", "squared")


@dataclass(frozen=True)
class NormalizationConfig:
    """Parameters of the bounded norm profile ``psi``.

    With ``Mp = psi_cap`` and ``a = psi_decay``, ``psi(x) = x**2`` up to
    ``sqrt(Mp)``. Beyond that point the ``"printed"`` profile continues as
    ``Mp + Mp**(1+a) * (Mp**-a - x**-a) / a``, while the ``"squared"`` profile
    uses ``x**(-2a)`` in place of ``x**-a``. Both tails tend to
    ``Mp * (1 + 1/a)``.

    The printed tail is discontinuous at ``sqrt(Mp)`` and dips below 1 just
    after it (on ``(2, 16/7)`` for the defaults). There the defining equation
    of :func:`tensor_normalize` has no root and the dilation is set to 0. The
    squared tail is continuous and increasing, so every tensor has a root.
    """

    psi_cap: float = 4.0
    psi_decay: float = 1.0
    tol: float = 1e-12
    profile: str = "printed"

    def __post_init__(self):
        if not self.psi_cap > 1:
            raise ValueError(f"psi_cap must be > 1, got {self.psi_cap}")
        if not self.psi_decay > 0:
            raise ValueError(f"psi_decay must be > 0, got {self.psi_decay}")
        if not self.tol > 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if self.profile not in PSI_PROFILES:
            raise ValueError(f"profile must be one of {PSI_PROFILES}, got {self.profile!r}")

    @property
    def sup(self) -> float:
        return self.psi_cap * (1.0 + 1.0 / self.psi_decay)

    def to_dict(self) -> dict:
        doc = {"M": self.psi_cap, "a": self.psi_decay}
        if self.profile != "printed":
            doc["profile"] = self.profile
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "NormalizationConfig":
        unknown = set(doc) - {"M", "a", "profile"}
        if unknown:
            raise ValueError(f"unknown psi fields: {sorted(unknown)}")
        return cls(
            psi_cap=float(doc.get("M", 4.0)),
            psi_decay=float(doc.get("a", 1.0)),
            profile=doc.get("profile", "printed"),
        )


DEFAULT_NORMALIZATION = NormalizationConfig()


def psi(x, cfg: NormalizationConfig = DEFAULT_NORMALIZATION):
    """Norm profile used by :func:`tensor_normalize`; defined for ``x >= 1``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 1):
        raise ValueError("psi is only defined on [1, inf)")
    Mp, a = cfg.psi_cap, cfg.psi_decay
    power = a if cfg.profile == "printed" else 2.0 * a
    with np.errstate(over="ignore", divide="ignore"):
        tail = Mp + Mp ** (1 + a) * (Mp**-a - x**-power) / a
        out = np.where(x <= np.sqrt(Mp), x**2, tail)
    return float(out) if out.ndim == 0 else out


def _solve_dilation(sq_norms: np.ndarray, cfg: NormalizationConfig) -> np.ndarray:
    """Bisection for ``lam`` in ``1 + sum_k lam^{2k} ||t_k||^2 = psi(||t||)``.

    ``sq_norms`` has shape ``(B, M+1)`` with level-0 norms equal to 1. Rows
    whose target is below 1 have no root; they get ``lam = 0``, the
    minimiser of the residual.
    """
    total = np.sqrt(sq_norms.sum(axis=1))
    lam = np.ones(len(total))
    active = (total > np.sqrt(cfg.psi_cap)) & np.any(sq_norms[:, 1:] > 0, axis=1)
    if not np.any(active):
        return lam
    target = psi(total[active], cfg)
    infeasible = target < 1.0
    if np.any(infeasible):
        log.info(
            "%d tensor(s) have psi(||t||) < 1 and are dilated to level 0", infeasible.sum()
        )
        idx = np.flatnonzero(active)
        lam[idx[infeasible]] = 0.0
        active[idx[infeasible]] = False
        target = target[~infeasible]
        if not np.any(active):
            return lam
    sq = sq_norms[active]
    powers = 2 * np.arange(sq.shape[1])
    lo, hi = np.zeros(len(target)), np.ones(len(target))
    mid = 0.5 * (lo + hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        val = (sq * mid[:, None] ** powers).sum(axis=1)
        done = np.abs(val - target) <= cfg.tol * target
        if np.all(done):
            break
        above = val > target
        hi = np.where(above & ~done, mid, hi)
        lo = np.where(~above & ~done, mid, lo)
    lam[active] = mid
    return lam


def tensor_normalize(
    t: TruncatedTensor, cfg: NormalizationConfig = DEFAULT_NORMALIZATION
) -> tuple[float, TruncatedTensor]:
    """Dilate ``t`` so that its squared norm becomes ``psi(||t||)``.

    Returns
    -------
    lam : float
        The dilation factor, in ``(0, 1]``; exactly 1 when ``||t|| <= sqrt(psi_cap)``.
    normalized : TruncatedTensor
        ``tt_dilate(lam, t)``.
    """
    if abs(t.coeffs[0][0] - 1.0) > 1e-12:
        raise ValueError(f"tensor normalization needs constant term 1, got {t.coeffs[0][0]}")
    sq = np.array([[np.dot(c, c) for c in t.coeffs]])
    lam = float(_solve_dilation(sq, cfg)[0])
    if lam == 1.0:
        return 1.0, t
    return lam, TruncatedTensor(
        t.ambient_dim, t.level, tuple(lam**m * c for m, c in enumerate(t.coeffs))
    )


def normalize_features(
    features: np.ndarray, N: int, M: int, cfg: NormalizationConfig = DEFAULT_NORMALIZATION
) -> np.ndarray:
    """Row-wise :func:`tensor_normalize` of flattened signatures."""
    levels = split_levels(np.asarray(features, dtype=float), N, M)
    sq = np.stack([(lv**2).sum(axis=1) for lv in levels], axis=1)
    lam = _solve_dilation(sq, cfg)
    return np.concatenate([lv * lam[:, None] ** m for m, lv in enumerate(levels)], axis=1)


def normalized_signature(
    path, M: int, cfg: NormalizationConfig = DEFAULT_NORMALIZATION, mode: str = "continuous"
) -> TruncatedTensor:
    return tensor_normalize(signature(path, M, mode), cfg)[1]


def kernel_naive(
    alpha,
    beta,
    M: int,
    normalized: bool = False,
    cfg: NormalizationConfig = DEFAULT_NORMALIZATION,
    mode: str = "continuous",
) -> float:
    """Inner product of explicitly computed (optionally normalized) signatures."""
    sa, sb = signature(alpha, M, mode), signature(beta, M, mode)
    if sa.ambient_dim != sb.ambient_dim:
        raise ValueError("paths have different algebra dimensions")
    if normalized:
        sa, sb = tensor_normalize(sa, cfg)[1], tensor_normalize(sb, cfg)[1]
    return tt_inner(sa, sb)


def _exclusive_cumsum2(A: np.ndarray) -> np.ndarray:
    """``out[..., i, j] = sum_{i' < i, j' < j} A[..., i', j']``."""
    out = np.zeros_like(A)
    out[..., 1:, 1:] = np.cumsum(np.cumsum(A, axis=-2), axis=-1)[..., :-1, :-1]
    return out


def _horner(K: np.ndarray, M: int) -> np.ndarray:
    """Discrete signature kernel from increment inner products ``K[..., s, t]``."""
    if M == 0:
        return np.ones(K.shape[:-2])
    A = K
    for _ in range(2, M + 1):
        A = K * (1.0 + _exclusive_cumsum2(A))
    return 1.0 + A.sum(axis=(-2, -1))


def kernel_horner(alpha, beta, M: int) -> float:
    """Discrete signature kernel ``<S^_M(alpha), S^_M(beta)>`` in ``O(T S M)``.

    Horner-style recursion over the ``T x S`` matrix of increment inner
    products; the prefix sums exclude the current row and column so that only
    strictly increasing index tuples contribute. Paths may differ in length.
    """
    a, b = as_derivative(alpha), as_derivative(beta)
    if a.shape[1] != b.shape[1]:
        raise ValueError("paths have different algebra dimensions")
    if a.shape[0] == 0 or b.shape[0] == 0:
        return 1.0
    # a fixed argument order makes the result exactly symmetric
    if (a.shape[0], a.tobytes()) > (b.shape[0], b.tobytes()):
        a, b = b, a
    return float(_horner(a @ b.T, M))


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Pairwise kernel values with the settings that produced them."""

    values: np.ndarray
    level: int
    kernel: str
    normalized: bool
    mode: str = "continuous"
    normalization: NormalizationConfig = field(default=DEFAULT_NORMALIZATION)
    ids: tuple | None = None

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def metadata(self) -> dict:
        return {
            "n": self.size,
            "M": self.level,
            "kernel": self.kernel,
            "normalized": self.normalized,
            "mode": self.mode,
            "psi": self.normalization.to_dict(),
        }


def _resolve_mode(kernel: str, mode: str | None) -> str:
    if kernel not in KERNELS:
        raise ValueError(f"kernel must be one of {KERNELS}, got {kernel!r}")
    if kernel == "horner":
        if mode not in (None, "discrete"):
            raise ValueError("the Horner kernel is defined for discrete signatures only")
        return "discrete"
    return mode or "continuous"


def kernel_matrix(
    X: Sequence,
    Y: Sequence | None = None,
    M: int = 4,
    kernel: str = "horner",
    normalized: bool = False,
    cfg: NormalizationConfig = DEFAULT_NORMALIZATION,
    mode: str | None = None,
    n_jobs: int | None = None,
) -> np.ndarray:
    """Kernel values between every path of ``X`` and every path of ``Y``.

    Raw Horner kernels are evaluated pairwise. Naive and normalized kernels go
    through explicit (normalized) signature features.
    """
    mode = _resolve_mode(kernel, mode)
    symmetric = Y is None
    dX = [as_derivative(p) for p in X]
    dY = dX if symmetric else [as_derivative(p) for p in Y]
    if kernel == "horner" and not normalized:

        def row(i):
            start = i if symmetric else 0
            return [kernel_horner(dX[i], dY[j], M) for j in range(start, len(dY))]

        rows = parallel_map(row, range(len(dX)), n_jobs)
        G = np.empty((len(dX), len(dY)))
        for i, r in enumerate(rows):
            if symmetric:
                G[i, i:] = r
                G[i:, i] = r
            else:
                G[i] = r
        return G
    FX = signature_matrix(dX, M, mode)
    N = dX[0].shape[1]
    if normalized:
        FX = normalize_features(FX, N, M, cfg)
    if symmetric:
        G = FX @ FX.T
        return 0.5 * (G + G.T)
    FY = signature_matrix(dY, M, mode)
    if normalized:
        FY = normalize_features(FY, N, M, cfg)
    return FX @ FY.T


def gram_matrix(
    paths: Sequence,
    M: int,
    kernel: str = "horner",
    normalized: bool = False,
    cfg: NormalizationConfig = DEFAULT_NORMALIZATION,
    mode: str | None = None,
    ids: Sequence[str] | None = None,
    n_jobs: int | None = None,
) -> GramMatrix:
    """Symmetric Gram matrix of the chosen signature kernel over ``paths``."""
    paths = list(paths)
    if not paths:
        raise ValueError("no paths given")
    values = kernel_matrix(paths, None, M, kernel, normalized, cfg, mode, n_jobs)
    return GramMatrix(
        values,
        M,
        kernel,
        normalized,
        _resolve_mode(kernel, mode),
        cfg,
        None if ids is None else tuple(ids),
    )
