"""Discrete group-valued time series and operations on them.

A :class:`DiscretePath` stores its points leaf-wise: for every leaf factor of
the group there is one array whose first axis runs over the ``T + 1`` samples
(``(T+1, 3, 3)`` for SO(3), ``(T+1, n)`` for R^n). Derivatives are plain
``(T, N)`` arrays of Lie algebra coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import SpecMismatch
from .lie_groups import (
    ANTIPODAL_EPS,
    GroupPoint,
    GroupSpec,
    Euclidean,
    Product,
    group_identity,
    so3_exp,
    so3_log,
)


@dataclass(frozen=True, eq=False)
class DiscretePath:
    """Sampled path ``p_0, ..., p_T`` on the group ``spec``.

    Parameters
    ----------
    spec : GroupSpec
    blocks : tuple of ndarray
        One array per leaf of ``spec``, each with leading axis of length ``T+1``.
    timestamps : ndarray, optional
        Strictly increasing sample times. Only :func:`transform_time` reads them.
    """

    spec: GroupSpec
    blocks: tuple
    timestamps: np.ndarray | None = None

    def __post_init__(self):
        shapes = self.spec.block_shapes()
        blocks = tuple(np.array(b, dtype=float) for b in self.blocks)
        if len(blocks) != len(shapes):
            raise SpecMismatch(f"{self.spec!r} needs {len(shapes)} blocks, got {len(blocks)}")
        lengths = {b.shape[0] for b in blocks}
        if len(lengths) != 1:
            raise SpecMismatch("all leaf blocks need the same number of points")
        n = lengths.pop()
        if n < 1:
            raise ValueError("a path needs at least one point")
        for b, shape in zip(blocks, shapes):
            if b.shape[1:] != shape:
                raise SpecMismatch(f"block of shape {b.shape[1:]} per point, expected {shape}")
            b.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)
        if self.timestamps is not None:
            ts = np.array(self.timestamps, dtype=float)
            if ts.shape != (n,):
                raise ValueError(f"expected {n} timestamps, got shape {ts.shape}")
            if np.any(np.diff(ts) <= 0):
                raise ValueError("timestamps must be strictly increasing")
            ts.setflags(write=False)
            object.__setattr__(self, "timestamps", ts)

    @classmethod
    def from_points(cls, points: Sequence[GroupPoint], timestamps=None) -> "DiscretePath":
        points = list(points)
        if not points:
            raise ValueError("a path needs at least one point")
        spec = points[0].spec
        for p in points:
            if p.spec != spec:
                raise SpecMismatch(f"mixed groups in path: {spec!r} vs {p.spec!r}")
        blocks = tuple(np.stack([p.blocks[k] for p in points]) for k in range(len(spec.leaves)))
        return cls(spec, blocks, timestamps)

    @classmethod
    def from_flat(cls, spec: GroupSpec, rows, timestamps=None) -> "DiscretePath":
        """Build from a ``(T+1, point_size)`` array of flattened points."""
        rows = np.asarray(rows, dtype=float)
        if rows.ndim == 1 and spec.point_size() == 1:
            rows = rows[:, None]
        if rows.ndim != 2 or rows.shape[1] != spec.point_size():
            raise SpecMismatch(
                f"{spec!r} points flatten to {spec.point_size()} values, got array {rows.shape}"
            )
        blocks, start = [], 0
        for shape in spec.block_shapes():
            n = int(np.prod(shape))
            blocks.append(rows[:, start : start + n].reshape((rows.shape[0],) + shape))
            start += n
        return cls(spec, tuple(blocks), timestamps)

    @classmethod
    def euclidean(cls, rows, timestamps=None) -> "DiscretePath":
        rows = np.asarray(rows, dtype=float)
        if rows.ndim == 1:
            rows = rows[:, None]
        return cls(Euclidean(rows.shape[1]), (rows,), timestamps)

    @classmethod
    def so3(cls, matrices, timestamps=None) -> "DiscretePath":
        return cls(GroupSpec.so3(), (np.asarray(matrices, dtype=float),), timestamps)

    def to_flat(self) -> np.ndarray:
        n = self.n_points
        return np.concatenate([b.reshape(n, -1) for b in self.blocks], axis=1)

    @property
    def n_points(self) -> int:
        return self.blocks[0].shape[0]

    @property
    def n_steps(self) -> int:
        return self.n_points - 1

    def __len__(self):
        return self.n_points

    def point(self, i: int) -> GroupPoint:
        return GroupPoint(self.spec, tuple(b[i] for b in self.blocks))

    def points(self) -> list[GroupPoint]:
        return [self.point(i) for i in range(self.n_points)]

    def slice(self, start: int, stop: int) -> "DiscretePath":
        """Sub-path with points ``start..stop`` inclusive."""
        ts = None if self.timestamps is None else self.timestamps[start : stop + 1]
        return DiscretePath(self.spec, tuple(b[start : stop + 1] for b in self.blocks), ts)

    def allclose(self, other: "DiscretePath", atol: float = 1e-9) -> bool:
        if self.spec != other.spec or self.n_points != other.n_points:
            return False
        return all(np.allclose(a, b, atol=atol, rtol=0) for a, b in zip(self.blocks, other.blocks))


def _check_same(a: DiscretePath, b: DiscretePath) -> None:
    if a.spec != b.spec:
        raise SpecMismatch(f"paths live on different groups: {a.spec!r} vs {b.spec!r}")


def discrete_derivative(path: DiscretePath, eps: float = ANTIPODAL_EPS) -> np.ndarray:
    """Lie algebra increments ``log(p_i^{-1} p_{i+1})`` as a ``(T, N)`` array.

    Raises
    ------
    AntipodalRotation
        With ``step`` set to the first offending ``i``.
    """
    cols = []
    for leaf, b in zip(path.spec.leaves, path.blocks):
        if leaf.kind == "so3":
            rel = np.swapaxes(b[:-1], -1, -2) @ b[1:]
            cols.append(so3_log(rel, eps))
        else:
            cols.append(np.diff(b, axis=0))
    return np.concatenate(cols, axis=1)


def integrate(
    spec: GroupSpec, deriv, initial: GroupPoint | None = None, timestamps=None
) -> DiscretePath:
    """Rebuild a path from increments: ``p_{i+1} = p_i exp(v_i)``.

    ``initial`` may be a :class:`GroupPoint` or its flat coordinates.
    """
    deriv = np.asarray(deriv, dtype=float)
    if deriv.ndim != 2 or deriv.shape[1] != spec.algebra_dim:
        raise SpecMismatch(f"derivative must be (T, {spec.algebra_dim}), got {deriv.shape}")
    if initial is None:
        initial = group_identity(spec)
    elif not isinstance(initial, GroupPoint):
        initial = GroupPoint.from_flat(spec, initial)
    elif initial.spec != spec:
        raise SpecMismatch(f"initial point on {initial.spec!r}, path on {spec!r}")
    T = deriv.shape[0]
    blocks = []
    for leaf, sl, g0 in zip(spec.leaves, spec.leaf_slices, initial.blocks):
        v = deriv[:, sl]
        if leaf.kind == "so3":
            steps = so3_exp(v)
            out = np.empty((T + 1, 3, 3))
            out[0] = g0
            for i in range(T):
                out[i + 1] = out[i] @ steps[i]
        else:
            out = np.concatenate([g0[None], g0 + np.cumsum(v, axis=0)])
        blocks.append(out)
    return DiscretePath(spec, tuple(blocks), timestamps)


def scale_path(path: DiscretePath, lam: float) -> DiscretePath:
    """Lie algebra scaling: multiply every increment by ``lam``, keep ``p_0``."""
    if lam < 0:
        raise ValueError(f"scale factor must be non-negative, got {lam}")
    return integrate(path.spec, lam * discrete_derivative(path), path.point(0), path.timestamps)


def to_euclidean(path: DiscretePath) -> DiscretePath:
    """Euclidean counterpart: cumulative sums of the increments, from the origin."""
    d = discrete_derivative(path)
    rows = np.concatenate([np.zeros((1, d.shape[1])), np.cumsum(d, axis=0)])
    return DiscretePath(Euclidean(d.shape[1]), (rows,), path.timestamps)


def from_euclidean(
    spec: GroupSpec, path: DiscretePath, initial: GroupPoint | None = None
) -> DiscretePath:
    """Inverse of :func:`to_euclidean`: integrate the R^N differences on ``spec``."""
    if not path.spec.is_abelian or path.spec.algebra_dim != spec.algebra_dim:
        raise SpecMismatch(f"need a Euclidean({spec.algebra_dim}) path, got {path.spec!r}")
    return integrate(spec, np.diff(path.to_flat(), axis=0), initial, path.timestamps)


def left_translate(path: DiscretePath, g: GroupPoint) -> DiscretePath:
    """Pointwise ``g * p_i``."""
    if g.spec != path.spec:
        raise SpecMismatch(f"translation by {g.spec!r} on a {path.spec!r} path")
    blocks = tuple(
        h @ b if leaf.kind == "so3" else h + b
        for leaf, h, b in zip(path.spec.leaves, g.blocks, path.blocks)
    )
    return DiscretePath(path.spec, blocks, path.timestamps)


def conjugate(path: DiscretePath, g: GroupPoint) -> DiscretePath:
    """Pointwise ``g p_i g^{-1}``; Euclidean leaves are unchanged."""
    if g.spec != path.spec:
        raise SpecMismatch(f"conjugation by {g.spec!r} on a {path.spec!r} path")
    blocks = tuple(
        h @ b @ h.T if leaf.kind == "so3" else b
        for leaf, h, b in zip(path.spec.leaves, g.blocks, path.blocks)
    )
    return DiscretePath(path.spec, blocks, path.timestamps)


def _default_times(path: DiscretePath) -> np.ndarray:
    if path.timestamps is not None:
        return np.asarray(path.timestamps)
    return np.arange(path.n_points, dtype=float)


def transform_time(path: DiscretePath) -> DiscretePath:
    """Append the sample time as an extra R^1 factor."""
    t = _default_times(path)
    return DiscretePath(Product(path.spec, Euclidean(1)), path.blocks + (t[:, None],), t)


def transform_idinit(path: DiscretePath) -> DiscretePath:
    """Prepend the identity element."""
    e = group_identity(path.spec)
    blocks = tuple(np.concatenate([eb[None], b]) for eb, b in zip(e.blocks, path.blocks))
    ts = None
    if path.timestamps is not None:
        t = path.timestamps
        step = t[1] - t[0] if t.size > 1 else 1.0
        ts = np.concatenate([[t[0] - step], t])
    return DiscretePath(path.spec, blocks, ts)


def transform_sliding_window(
    path: DiscretePath, lags: int, padding: str = "identity"
) -> DiscretePath:
    """Sliding window with ``lags`` lags: point ``i`` becomes ``(p_i, ..., p_{i-lags})``.

    Indices before the start are filled with the identity (``padding="identity"``)
    or with ``p_0`` (``padding="first_point"``).
    """
    if lags < 0:
        raise ValueError(f"lags must be non-negative, got {lags}")
    if padding == "identity":
        pad = group_identity(path.spec)
    elif padding == "first_point":
        pad = path.point(0)
    else:
        raise ValueError(f"padding must be 'identity' or 'first_point', got {padding!r}")
    blocks = []
    for k in range(lags + 1):
        for pb, b in zip(pad.blocks, path.blocks):
            head = np.repeat(pb[None], min(k, path.n_points), axis=0)
            blocks.append(np.concatenate([head, b[: max(path.n_points - k, 0)]]))
    spec = Product(*([path.spec] * (lags + 1)))
    return DiscretePath(spec, tuple(blocks), path.timestamps)


def concat(alpha: DiscretePath, beta: DiscretePath) -> DiscretePath:
    """Concatenation: ``beta`` translated by ``alpha_T beta_0^{-1}`` follows ``alpha``."""
    _check_same(alpha, beta)
    blocks = []
    for leaf, a, b in zip(alpha.spec.leaves, alpha.blocks, beta.blocks):
        if leaf.kind == "so3":
            shift = a[-1] @ b[0].T
            tail = shift @ b[1:]
        else:
            tail = b[1:] - b[0] + a[-1]
        blocks.append(np.concatenate([a, tail]))
    return DiscretePath(alpha.spec, tuple(blocks))


def reverse(path: DiscretePath) -> DiscretePath:
    return DiscretePath(path.spec, tuple(b[::-1] for b in path.blocks))


def one_variation(path: DiscretePath) -> float:
    """Length of the piecewise geodesic interpolation: ``sum_i ||p'_i||``."""
    return float(np.linalg.norm(discrete_derivative(path), axis=1).sum())


def path_distance(alpha: DiscretePath, beta: DiscretePath) -> float:
    """1-variation distance between the Euclidean counterparts of two paths."""
    _check_same(alpha, beta)
    if alpha.n_points != beta.n_points:
        raise ValueError(
            f"paths have different lengths: {alpha.n_points} vs {beta.n_points} points"
        )
    diff = discrete_derivative(alpha) - discrete_derivative(beta)
    return float(np.linalg.norm(diff, axis=1).sum())


def matrix_representation(path: DiscretePath) -> DiscretePath:
    """View each point as a flat vector of matrix entries (SO(3) blocks row-major).

    SO(3) walks become paths in R^9; mixed products become R^point_size paths.
    """
    return DiscretePath(Euclidean(path.spec.point_size()), (path.to_flat(),), path.timestamps)


def duplicate_point(path: DiscretePath, i: int) -> DiscretePath:
    """Repeat sample ``i`` once (a pure reparametrization)."""
    blocks = tuple(np.insert(b, i, b[i], axis=0) for b in path.blocks)
    return DiscretePath(path.spec, blocks)


def parse_transform(name: str | None) -> tuple[str, int]:
    """Parse ``none | time | idinit | swin:<lags>`` into ``(kind, lags)``."""
    if name is None or name == "none":
        return "none", 0
    if name in ("time", "idinit"):
        return name, 0
    if name.startswith("swin:"):
        try:
            lags = int(name.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad sliding-window transform {name!r}; use swin:<lags>") from None
        if lags < 1:
            raise ValueError(f"sliding window needs at least one lag, got {lags}")
        return "swin", lags
    raise ValueError(f"unknown transform {name!r}; use none, time, idinit or swin:<lags>")


def apply_transform(path: DiscretePath, name: str | None, padding: str = "identity"):
    kind, lags = parse_transform(name)
    if kind == "time":
        return transform_time(path)
    if kind == "idinit":
        return transform_idinit(path)
    if kind == "swin":
        return transform_sliding_window(path, lags, padding)
    return path
