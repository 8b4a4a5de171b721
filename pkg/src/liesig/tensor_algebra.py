"""Truncated tensor algebra over R^N.

A :class:`TruncatedTensor` of level ``M`` stores one flat coefficient array per
level ``m = 0..M``. Level ``m`` has ``N**m`` entries; multi-index
``(i_1, ..., i_m)`` (0-based) sits at its row-major position, so
``coeffs[m].reshape((N,) * m)[I]`` is the coefficient of ``I``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, factorial
from typing import Sequence

import numpy as np

from .exceptions import BudgetExceeded, SpecMismatch

DEFAULT_COEFF_BUDGET = 10**8


def check_budget(ambient_dim: int, level: int, budget: int | None = None) -> None:
    """Raise :class:`BudgetExceeded` if level ``level`` needs too many coefficients."""
    budget = DEFAULT_COEFF_BUDGET if budget is None else budget
    if level > 0 and ambient_dim**level > budget:
        raise BudgetExceeded(ambient_dim, level, budget)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TruncatedTensor:
    """Element of the truncated tensor algebra ``T^{<=M}(R^N)``.

    Parameters
    ----------
    ambient_dim : int
        Dimension ``N`` of the underlying vector space.
    level : int
        Truncation level ``M``.
    coeffs : tuple of ndarray
        ``coeffs[m]`` is a flat float array of length ``N**m``.

    Instances are immutable; arithmetic returns new tensors.
    """

    ambient_dim: int
    level: int
    coeffs: tuple

    def __post_init__(self):
        N, M = self.ambient_dim, self.level
        if N < 1 or M < 0:
            raise ValueError(f"need ambient_dim >= 1 and level >= 0, got {N}, {M}")
        coeffs = tuple(_frozen(np.ravel(c)) for c in self.coeffs)
        if len(coeffs) != M + 1:
            raise ValueError(f"expected {M + 1} levels, got {len(coeffs)}")
        for m, c in enumerate(coeffs):
            if c.size != N**m:
                raise ValueError(f"level {m} must have {N ** m} entries, got {c.size}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_levels(cls, levels: Sequence) -> "TruncatedTensor":
        """Build from per-level arrays, inferring ``N`` from level 1."""
        levels = [np.asarray(c, dtype=float) for c in levels]
        if len(levels) == 1:
            raise ValueError("cannot infer ambient_dim from a level-0 tensor")
        return cls(int(np.size(levels[1])), len(levels) - 1, tuple(levels))

    @property
    def size(self) -> int:
        return sum(c.size for c in self.coeffs)

    def level_array(self, m: int) -> np.ndarray:
        """Level ``m`` reshaped to an ``m``-dimensional ``N x ... x N`` array."""
        return tt_project(self, m).reshape((self.ambient_dim,) * m)

    def to_vector(self) -> np.ndarray:
        return np.concatenate(self.coeffs)

    def __getitem__(self, index) -> float:
        return sig_term(self, index)

    def __add__(self, other):
        return tt_add(self, other)

    def __sub__(self, other):
        return tt_add(self, tt_scale(-1.0, other))

    def __neg__(self):
        return tt_scale(-1.0, self)

    def __mul__(self, other):
        if isinstance(other, TruncatedTensor):
            return tt_mul(self, other)
        return tt_scale(other, self)

    def __rmul__(self, other):
        return tt_scale(other, self)

    def allclose(self, other: "TruncatedTensor", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        _check_compatible(self, other)
        return all(
            np.allclose(a, b, atol=atol, rtol=rtol) for a, b in zip(self.coeffs, other.coeffs)
        )

    def __repr__(self):
        return f"TruncatedTensor(ambient_dim={self.ambient_dim}, level={self.level})"


def _check_compatible(s: TruncatedTensor, t: TruncatedTensor) -> None:
    if s.ambient_dim != t.ambient_dim or s.level != t.level:
        raise SpecMismatch(
            f"tensor shapes differ: (N={s.ambient_dim}, M={s.level}) vs "
            f"(N={t.ambient_dim}, M={t.level})"
        )


def tt_zero(N: int, M: int) -> TruncatedTensor:
    return TruncatedTensor(N, M, tuple(np.zeros(N**m) for m in range(M + 1)))


def tt_one(N: int, M: int) -> TruncatedTensor:
    """Unit of the truncated tensor product."""
    coeffs = [np.zeros(N**m) for m in range(M + 1)]
    coeffs[0][0] = 1.0
    return TruncatedTensor(N, M, tuple(coeffs))


def tt_add(s: TruncatedTensor, t: TruncatedTensor) -> TruncatedTensor:
    _check_compatible(s, t)
    return TruncatedTensor(s.ambient_dim, s.level, tuple(a + b for a, b in zip(s.coeffs, t.coeffs)))


def tt_scale(c: float, t: TruncatedTensor) -> TruncatedTensor:
    return TruncatedTensor(t.ambient_dim, t.level, tuple(c * a for a in t.coeffs))


def _outer_flat(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.multiply.outer(a, b).ravel()


def tt_mul(s: TruncatedTensor, t: TruncatedTensor) -> TruncatedTensor:
    """Truncated tensor product ``s ⊗ t``; levels above ``M`` are dropped."""
    _check_compatible(s, t)
    out = []
    for m in range(s.level + 1):
        acc = np.zeros(s.ambient_dim**m)
        for j in range(m + 1):
            acc += _outer_flat(s.coeffs[j], t.coeffs[m - j])
        out.append(acc)
    return TruncatedTensor(s.ambient_dim, s.level, tuple(out))


def tt_exp(v, M: int, budget: int | None = None) -> TruncatedTensor:
    """Tensor exponential: level ``m`` is ``v^{⊗m} / m!``."""
    v = np.asarray(v, dtype=float).ravel()
    N = v.size
    check_budget(N, M, budget)
    coeffs = [np.ones(1)]
    for m in range(1, M + 1):
        coeffs.append(_outer_flat(coeffs[-1], v) / m)
    return TruncatedTensor(N, M, tuple(coeffs))


def tt_dilate(lam: float, t: TruncatedTensor) -> TruncatedTensor:
    """Dilation ``δ_λ``: scale level ``m`` by ``λ**m``."""
    if lam < 0:
        raise ValueError(f"dilation factor must be non-negative, got {lam}")
    return TruncatedTensor(
        t.ambient_dim, t.level, tuple(lam**m * c for m, c in enumerate(t.coeffs))
    )


def tt_inner(s: TruncatedTensor, t: TruncatedTensor) -> float:
    """Coefficient-wise inner product (the basis is orthonormal)."""
    _check_compatible(s, t)
    return float(sum(np.dot(a, b) for a, b in zip(s.coeffs, t.coeffs)))


def tt_norm(t: TruncatedTensor) -> float:
    return float(np.sqrt(sum(np.dot(c, c) for c in t.coeffs)))


def level_norms(t: TruncatedTensor) -> np.ndarray:
    """Euclidean norm of each level."""
    return np.array([np.linalg.norm(c) for c in t.coeffs])


def tt_project(t: TruncatedTensor, m: int) -> np.ndarray:
    """Level-``m`` coefficient array (flat, row-major)."""
    if not 0 <= m <= t.level:
        raise IndexError(f"level {m} out of range 0..{t.level}")
    return t.coeffs[m]


def sig_term(t: TruncatedTensor, index) -> float:
    """Coefficient of the multi-index ``index`` (0-based entries)."""
    index = tuple(int(i) for i in index)
    m = len(index)
    if m > t.level:
        raise IndexError(f"multi-index of length {m} exceeds truncation level {t.level}")
    if any(not 0 <= i < t.ambient_dim for i in index):
        raise IndexError(f"multi-index {index} has entries outside 0..{t.ambient_dim - 1}")
    if m == 0:
        return float(t.coeffs[0][0])
    return float(t.coeffs[m][np.ravel_multi_index(index, (t.ambient_dim,) * m)])


def shuffle(I: Sequence[int], J: Sequence[int]) -> list[tuple[int, ...]]:
    """All ``C(k+l, k)`` interleavings of ``I`` and ``J``, with multiplicity.

    Each result keeps the relative order of the entries of ``I`` and of ``J``.
    """
    I, J = tuple(I), tuple(J)
    k, n = len(I), len(I) + len(J)
    out = []
    for positions in itertools.combinations(range(n), k):
        word = [None] * n
        for p, x in zip(positions, I):
            word[p] = x
        rest = iter(J)
        out.append(tuple(x if x is not None else next(rest) for x in word))
    assert len(out) == comb(n, k)
    return out


def tt_pushforward(F, t: TruncatedTensor) -> TruncatedTensor:
    """Push ``t`` forward along the linear map ``F`` (shape ``N2 x N1``).

    Level ``m`` is acted on by ``F`` in each of its ``m`` tensor slots; level 1
    becomes ``F @ t_1`` and level 2 becomes ``F @ t_2 @ F.T``.
    """
    F = np.asarray(F, dtype=float)
    if F.ndim != 2 or F.shape[1] != t.ambient_dim:
        raise SpecMismatch(
            f"linear map of shape {F.shape} cannot act on R^{t.ambient_dim}"
        )
    N2 = F.shape[0]
    out = [t.coeffs[0].copy()]
    for m in range(1, t.level + 1):
        arr = t.level_array(m)
        for axis in range(m):
            arr = np.moveaxis(np.tensordot(F, arr, axes=([1], [axis])), 0, axis)
        out.append(arr.ravel())
    return TruncatedTensor(N2, t.level, tuple(out))


def exp_norm_squared(v, M: int) -> float:
    """Closed form of ``||exp_⊗(v)||^2 = sum_m ||v||^{2m} / (m!)^2``."""
    r2 = float(np.dot(v, v))
    return sum(r2**m / factorial(m) ** 2 for m in range(M + 1))


def batch_mul_exp(levels: list, v: np.ndarray) -> None:
    """In place ``S <- S ⊗ exp_⊗(v)`` for a batch of tensors.

    ``levels[m]`` has shape ``(B, N**m)`` and ``v`` has shape ``(B, N)``.
    Levels are updated from the top down with Horner's rule, so each new level
    only reads old lower levels.
    """
    B = v.shape[0]
    M = len(levels) - 1
    for m in range(M, 0, -1):
        acc = levels[0] * (v / m)
        for j in range(1, m):
            acc = acc + levels[j]
            acc = (acc[:, :, None] * v[:, None, :]).reshape(B, -1) / (m - j)
        levels[m] = levels[m] + acc
