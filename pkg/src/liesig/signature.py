"""Path signatures of discrete Lie group valued time series.

Two signatures are provided:

* the *continuous* signature of the piecewise exponential interpolation,
  ``exp(p'_1) ⊗ ... ⊗ exp(p'_T)`` (the default everywhere), and
* the *discrete* (iterated sums) signature, summing products of increments over
  strictly increasing time indices.

Every function accepts either a :class:`~liesig.paths.DiscretePath` or its
``(T, N)`` derivative array.
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from .paths import DiscretePath, discrete_derivative
from .tensor_algebra import TruncatedTensor, batch_mul_exp, check_budget, sig_term

MODES = ("continuous", "discrete")
BRUTE_FORCE_MAX_STEPS = 12


def as_derivative(x) -> np.ndarray:
    if isinstance(x, DiscretePath):
        return discrete_derivative(x)
    d = np.asarray(x, dtype=float)
    if d.ndim != 2:
        raise ValueError(f"derivative must be a (T, N) array, got shape {d.shape}")
    return d


def continuous_levels(derivs: np.ndarray, M: int, budget: int | None = None) -> list:
    """Batched continuous signatures of ``derivs`` with shape ``(B, T, N)``.

    Returns ``levels`` with ``levels[m]`` of shape ``(B, N**m)``.
    """
    B, T, N = derivs.shape
    check_budget(N, M, budget)
    levels = [np.ones((B, 1))] + [np.zeros((B, N**m)) for m in range(1, M + 1)]
    for t in range(T):
        batch_mul_exp(levels, derivs[:, t])
    return levels


def discrete_levels(derivs: np.ndarray, M: int, budget: int | None = None) -> list:
    """Batched discrete signatures by forward recursion.

    ``partial[:, t]`` holds the level-``m`` sums over index tuples ending at or
    before ``t``. Extending to level ``m+1`` multiplies ``partial[:, t-1]`` (an
    exclusive prefix, so indices stay strictly increasing) by ``p'_t`` and
    accumulates over ``t``.
    """
    B, T, N = derivs.shape
    check_budget(N, M, budget)
    if T == 0:
        return [np.ones((B, 1))] + [np.zeros((B, N**m)) for m in range(1, M + 1)]
    levels = [np.ones((B, 1))]
    if M == 0:
        return levels
    partial = np.cumsum(derivs, axis=1)
    levels.append(partial[:, -1].copy())
    for m in range(2, M + 1):
        shifted = np.zeros_like(partial)
        shifted[:, 1:] = partial[:, :-1]
        step = (shifted[..., :, None] * derivs[..., None, :]).reshape(B, T, -1)
        partial = np.cumsum(step, axis=1)
        levels.append(partial[:, -1].copy())
    return levels


def _levels_to_tensor(levels: list, N: int, i: int = 0) -> TruncatedTensor:
    return TruncatedTensor(N, len(levels) - 1, tuple(lv[i] for lv in levels))


def signature_continuous(path, M: int, budget: int | None = None) -> TruncatedTensor:
    """Signature of the piecewise exponential interpolation, truncated at ``M``."""
    d = as_derivative(path)
    return _levels_to_tensor(continuous_levels(d[None], M, budget), d.shape[1])


def signature_discrete(path, M: int, budget: int | None = None) -> TruncatedTensor:
    """Discrete signature over strictly increasing index tuples."""
    d = as_derivative(path)
    return _levels_to_tensor(discrete_levels(d[None], M, budget), d.shape[1])


def signature(path, M: int, mode: str = "continuous", budget: int | None = None):
    if mode == "continuous":
        return signature_continuous(path, M, budget)
    if mode == "discrete":
        return signature_discrete(path, M, budget)
    raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def signature_brute_force(deriv, M: int) -> TruncatedTensor:
    """Discrete signature by literal enumeration of strictly increasing tuples.

    Exponential in ``T``; only meant as a test oracle.
    """
    d = as_derivative(deriv)
    T, N = d.shape
    if T > BRUTE_FORCE_MAX_STEPS:
        raise ValueError(f"brute force limited to T <= {BRUTE_FORCE_MAX_STEPS}, got {T}")
    check_budget(N, M)
    coeffs = [np.ones(1)]
    for m in range(1, M + 1):
        acc = np.zeros((N,) * m)
        for times in itertools.combinations(range(T), m):
            term = d[times[0]]
            for t in times[1:]:
                term = np.multiply.outer(term, d[t])
            acc += term
        coeffs.append(acc.ravel())
    return TruncatedTensor(N, M, tuple(coeffs))


def signature_matrix(
    paths: Sequence, M: int, mode: str = "continuous", budget: int | None = None
) -> np.ndarray:
    """Stack the flattened signatures of many paths into an ``(n, size)`` array.

    Paths of equal length are computed together in one batch.
    """
    derivs = [as_derivative(p) for p in paths]
    if not derivs:
        raise ValueError("no paths given")
    dims = {d.shape[1] for d in derivs}
    if len(dims) != 1:
        raise ValueError(f"paths have different algebra dimensions: {sorted(dims)}")
    N = dims.pop()
    compute = {"continuous": continuous_levels, "discrete": discrete_levels}.get(mode)
    if compute is None:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    size = sum(N**m for m in range(M + 1))
    out = np.empty((len(derivs), size))
    by_len: dict[int, list[int]] = {}
    for i, d in enumerate(derivs):
        by_len.setdefault(d.shape[0], []).append(i)
    for idx in by_len.values():
        levels = compute(np.stack([derivs[i] for i in idx]), M, budget)
        out[idx] = np.concatenate(levels, axis=1)
    return out


def split_levels(flat: np.ndarray, N: int, M: int) -> list:
    """Inverse of concatenation: cut the last axis of ``flat`` into levels."""
    bounds = np.cumsum([N**m for m in range(M + 1)])[:-1]
    return np.split(flat, bounds, axis=-1)


def level2_matrix(path, mode: str = "continuous") -> np.ndarray:
    """Level-2 signature as an ``N x N`` matrix with entry ``(i, j) = S^{(i, j)}``."""
    if isinstance(path, TruncatedTensor):
        t = path
    else:
        t = signature(path, 2, mode)
    if t.level < 2:
        raise ValueError("level-2 features need a tensor truncated at level >= 2")
    return t.level_array(2).copy()


def lead_matrix(path, mode: str = "continuous") -> np.ndarray:
    """Antisymmetrized level-2 signature ``(S^{ij} - S^{ji}) / 2``."""
    L2 = level2_matrix(path, mode)
    return 0.5 * (L2 - L2.T)


__all__ = [
    "signature_continuous",
    "signature_discrete",
    "signature",
    "signature_brute_force",
    "signature_matrix",
    "continuous_levels",
    "discrete_levels",
    "split_levels",
    "level2_matrix",
    "lead_matrix",
    "sig_term",
    "as_derivative",
]
