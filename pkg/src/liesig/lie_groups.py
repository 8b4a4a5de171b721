"""Matrix Lie group primitives for SO(3), R^N and their products.

Lie algebra elements are handled as coordinate vectors in a fixed basis. For
so(3) the basis is

    e1 = [[0,-1,0],[1,0,0],[0,0,0]]   (rotation about z)
    e2 = [[0,0,1],[0,0,0],[-1,0,0]]   (rotation about y)
    e3 = [[0,0,0],[0,0,-1],[0,1,0]]   (rotation about x)

and is declared orthonormal. Product groups concatenate factor coordinates in
factor order; nested products are flattened into their leaf factors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import AntipodalRotation, SpecMismatch

ANTIPODAL_EPS = 1e-6
SO3_ORTHO_TOL = 1e-9
_TAYLOR_THETA = 1e-7

SO3_BASIS = np.array(
    [
        [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
        [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
        [[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]],
    ]
)
SO3_BASIS.setflags(write=False)

# so(3) coordinates (a, b, c) are the axis vector (c, b, a) of the usual hat map.
_REVERSE3 = np.eye(3)[::-1]


# -- vectorized SO(3) kernels ------------------------------------------------


def so3_hat(v: np.ndarray) -> np.ndarray:
    """``(..., 3)`` coordinates to ``(..., 3, 3)`` skew matrices."""
    v = np.asarray(v, dtype=float)
    a, b, c = v[..., 0], v[..., 1], v[..., 2]
    z = np.zeros_like(a)
    return np.stack(
        [np.stack([z, -a, b], -1), np.stack([a, z, -c], -1), np.stack([-b, c, z], -1)], -2
    )


def so3_vee(S: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if np.any(np.abs(S + np.swapaxes(S, -1, -2)) > tol):
        raise ValueError("matrix is not skew-symmetric")
    return np.stack([S[..., 1, 0], S[..., 0, 2], S[..., 2, 1]], -1)


def so3_exp(v: np.ndarray) -> np.ndarray:
    """Rodrigues formula, vectorized over leading axes."""
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v, axis=-1)
    small = theta < _TAYLOR_THETA
    safe = np.where(small, 1.0, theta)
    t2 = theta**2
    a = np.where(small, 1.0 - t2 / 6.0, np.sin(safe) / safe)
    b = np.where(small, 0.5 - t2 / 24.0, 2.0 * np.sin(safe / 2.0) ** 2 / safe**2)
    K = so3_hat(v)
    return np.eye(3) + a[..., None, None] * K + b[..., None, None] * (K @ K)


def so3_angle(R: np.ndarray) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    S = 0.5 * (R - np.swapaxes(R, -1, -2))
    s = np.linalg.norm(np.stack([S[..., 1, 0], S[..., 0, 2], S[..., 2, 1]], -1), axis=-1)
    c = 0.5 * (np.trace(R, axis1=-2, axis2=-1) - 1.0)
    return np.arctan2(s, c)


def so3_log(R: np.ndarray, eps: float = ANTIPODAL_EPS) -> np.ndarray:
    """Principal logarithm, vectorized over leading axes.

    Raises :class:`AntipodalRotation` for the first matrix (in C order of the
    leading axes) whose angle is within ``eps`` of pi; its flat position is
    stored in ``step``.
    """
    R = np.asarray(R, dtype=float)
    theta = so3_angle(R)
    bad = theta >= np.pi - eps
    if np.any(bad):
        flat = int(np.flatnonzero(bad.ravel())[0])
        raise AntipodalRotation(float(theta.ravel()[flat]), flat if R.ndim > 2 else None)
    S = 0.5 * (R - np.swapaxes(R, -1, -2))
    w = np.stack([S[..., 1, 0], S[..., 0, 2], S[..., 2, 1]], -1)
    small = theta < _TAYLOR_THETA
    safe = np.where(small, 1.0, theta)
    f = np.where(small, 1.0 + theta**2 / 6.0, safe / np.sin(safe))
    return w * f[..., None]


def so3_adjoint(R: np.ndarray) -> np.ndarray:
    """Matrix of ``X -> R X R^T`` on so(3) in basis coordinates."""
    R = np.asarray(R, dtype=float)
    return _REVERSE3 @ R @ _REVERSE3


def is_rotation(R: np.ndarray, tol: float = SO3_ORTHO_TOL) -> bool:
    R = np.asarray(R, dtype=float)
    if R.shape[-2:] != (3, 3):
        return False
    ortho = np.linalg.norm(R @ np.swapaxes(R, -1, -2) - np.eye(3), axis=(-2, -1))
    return bool(np.all(ortho < tol) and np.all(np.linalg.det(R) > 0))


# -- group descriptions ------------------------------------------------------


@dataclass(frozen=True)
class GroupSpec:
    """Description of a supported matrix Lie group.

    Use the constructors :meth:`so3`, :meth:`euclidean` and :meth:`product`
    rather than instantiating directly.
    """

    kind: str
    dim: int = 0
    factors: tuple = ()

    def __post_init__(self):
        if self.kind == "euclidean":
            if self.dim < 1:
                raise ValueError(f"Euclidean dimension must be >= 1, got {self.dim}")
        elif self.kind == "so3":
            object.__setattr__(self, "dim", 3)
        elif self.kind == "product":
            if not self.factors:
                raise ValueError("product group needs at least one factor")
            object.__setattr__(self, "factors", tuple(self.factors))
            object.__setattr__(self, "dim", sum(f.algebra_dim for f in self.factors))
        else:
            raise ValueError(f"unknown group kind {self.kind!r}")

    @classmethod
    def so3(cls) -> "GroupSpec":
        return cls("so3")

    @classmethod
    def euclidean(cls, n: int) -> "GroupSpec":
        return cls("euclidean", int(n))

    @classmethod
    def product(cls, *factors: "GroupSpec") -> "GroupSpec":
        return cls("product", factors=tuple(factors))

    @property
    def algebra_dim(self) -> int:
        return self.dim

    @cached_property
    def leaves(self) -> tuple:
        """Non-product factors in order, with nested products flattened."""
        if self.kind != "product":
            return (self,)
        return tuple(leaf for f in self.factors for leaf in f.leaves)

    @cached_property
    def leaf_slices(self) -> tuple:
        """Coordinate slice of each leaf inside the algebra vector."""
        out, start = [], 0
        for leaf in self.leaves:
            out.append(slice(start, start + leaf.dim))
            start += leaf.dim
        return tuple(out)

    @property
    def is_abelian(self) -> bool:
        return all(leaf.kind == "euclidean" for leaf in self.leaves)

    @cached_property
    def structure_constants(self) -> np.ndarray:
        """Array ``c[k, i, j]`` with ``[e_i, e_j] = sum_k c[k, i, j] e_k``."""
        N = self.dim
        c = np.zeros((N, N, N))
        for leaf, sl in zip(self.leaves, self.leaf_slices):
            if leaf.kind != "so3":
                continue
            for i in range(3):
                for j in range(3):
                    Ei, Ej = SO3_BASIS[i], SO3_BASIS[j]
                    c[sl, sl.start + i, sl.start + j] = so3_vee(Ei @ Ej - Ej @ Ei)
        c.setflags(write=False)
        return c

    def block_shapes(self) -> tuple:
        return tuple((3, 3) if leaf.kind == "so3" else (leaf.dim,) for leaf in self.leaves)

    def point_size(self) -> int:
        """Number of scalars in a flattened point (SO(3) blocks count 9)."""
        return sum(int(np.prod(s)) for s in self.block_shapes())

    def to_dict(self) -> dict:
        if self.kind == "so3":
            return {"kind": "so3"}
        if self.kind == "euclidean":
            return {"kind": "euclidean", "dim": self.dim}
        return {"kind": "product", "factors": [f.to_dict() for f in self.factors]}

    @classmethod
    def from_dict(cls, doc: dict) -> "GroupSpec":
        kind = doc.get("kind")
        if kind == "so3":
            return cls.so3()
        if kind == "euclidean":
            return cls.euclidean(int(doc["dim"]))
        if kind == "product":
            return cls.product(*(cls.from_dict(f) for f in doc["factors"]))
        raise ValueError(f"unknown group kind {kind!r}")

    def __repr__(self):
        if self.kind == "so3":
            return "SO3"
        if self.kind == "euclidean":
            return f"Euclidean({self.dim})"
        return "Product(" + ", ".join(map(repr, self.factors)) + ")"


SO3 = GroupSpec.so3()


def Euclidean(n: int) -> GroupSpec:
    return GroupSpec.euclidean(n)


def Product(*factors: GroupSpec) -> GroupSpec:
    return GroupSpec.product(*factors)


def _check_same_spec(a: GroupSpec, b: GroupSpec) -> None:
    if a != b:
        raise SpecMismatch(f"group mismatch: {a!r} vs {b!r}")


@dataclass(frozen=True, eq=False)
class GroupPoint:
    """A point of ``spec``: one block per leaf factor.

    SO(3) blocks are 3x3 rotation matrices and Euclidean blocks are vectors.
    """

    spec: GroupSpec
    blocks: tuple

    def __post_init__(self):
        shapes = self.spec.block_shapes()
        blocks = tuple(np.array(b, dtype=float) for b in self.blocks)
        if len(blocks) != len(shapes):
            raise SpecMismatch(f"{self.spec!r} needs {len(shapes)} blocks, got {len(blocks)}")
        for leaf, b, shape in zip(self.spec.leaves, blocks, shapes):
            if b.shape != shape:
                raise SpecMismatch(f"block of shape {b.shape} does not fit {leaf!r}")
            if leaf.kind == "so3" and not is_rotation(b):
                raise ValueError("SO(3) block is not a rotation matrix")
            b.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_flat(cls, spec: GroupSpec, flat) -> "GroupPoint":
        """Build from a flat vector (SO(3) blocks as row-major 9-vectors)."""
        flat = np.asarray(flat, dtype=float).ravel()
        if flat.size != spec.point_size():
            raise SpecMismatch(f"{spec!r} points have {spec.point_size()} entries, got {flat.size}")
        blocks, start = [], 0
        for shape in spec.block_shapes():
            n = int(np.prod(shape))
            blocks.append(flat[start : start + n].reshape(shape))
            start += n
        return cls(spec, tuple(blocks))

    def to_flat(self) -> np.ndarray:
        return np.concatenate([b.ravel() for b in self.blocks])

    def allclose(self, other: "GroupPoint", atol: float = 1e-12) -> bool:
        _check_same_spec(self.spec, other.spec)
        return all(np.allclose(a, b, atol=atol, rtol=0) for a, b in zip(self.blocks, other.blocks))

    def __matmul__(self, other: "GroupPoint") -> "GroupPoint":
        return group_mul(self, other)


def group_identity(spec: GroupSpec) -> GroupPoint:
    return GroupPoint(
        spec,
        tuple(np.eye(3) if leaf.kind == "so3" else np.zeros(leaf.dim) for leaf in spec.leaves),
    )


def group_mul(g: GroupPoint, h: GroupPoint) -> GroupPoint:
    _check_same_spec(g.spec, h.spec)
    return GroupPoint(
        g.spec,
        tuple(
            a @ b if leaf.kind == "so3" else a + b
            for leaf, a, b in zip(g.spec.leaves, g.blocks, h.blocks)
        ),
    )


def group_inv(g: GroupPoint) -> GroupPoint:
    return GroupPoint(
        g.spec,
        tuple(a.T if leaf.kind == "so3" else -a for leaf, a in zip(g.spec.leaves, g.blocks)),
    )


def _coords(spec: GroupSpec, v) -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    if v.size != spec.algebra_dim:
        raise SpecMismatch(f"{spec!r} has algebra dimension {spec.algebra_dim}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("algebra coordinates must be finite")
    return v


def group_exp(spec: GroupSpec, v) -> GroupPoint:
    """Lie exponential of the algebra element with coordinates ``v``."""
    v = _coords(spec, v)
    return GroupPoint(
        spec,
        tuple(
            so3_exp(v[sl]) if leaf.kind == "so3" else v[sl].copy()
            for leaf, sl in zip(spec.leaves, spec.leaf_slices)
        ),
    )


def group_log(spec: GroupSpec, g: GroupPoint, eps: float = ANTIPODAL_EPS) -> np.ndarray:
    """Logarithm closest to the origin, as basis coordinates.

    Raises
    ------
    AntipodalRotation
        If an SO(3) block has rotation angle ``>= pi - eps``.
    """
    _check_same_spec(spec, g.spec)
    return np.concatenate(
        [
            so3_log(b, eps) if leaf.kind == "so3" else b.copy()
            for leaf, b in zip(spec.leaves, g.blocks)
        ]
    )


def hat(spec: GroupSpec, coords) -> tuple:
    """Basis coordinates to per-leaf algebra blocks (skew matrices / vectors)."""
    v = _coords(spec, coords)
    return tuple(
        so3_hat(v[sl]) if leaf.kind == "so3" else v[sl].copy()
        for leaf, sl in zip(spec.leaves, spec.leaf_slices)
    )


def vee(spec: GroupSpec, blocks, tol: float = 1e-9) -> np.ndarray:
    """Inverse of :func:`hat`; rejects non-skew SO(3) blocks."""
    blocks = tuple(blocks)
    if len(blocks) != len(spec.leaves):
        raise SpecMismatch(f"{spec!r} needs {len(spec.leaves)} blocks, got {len(blocks)}")
    return np.concatenate(
        [
            so3_vee(b, tol) if leaf.kind == "so3" else np.asarray(b, dtype=float).ravel()
            for leaf, b in zip(spec.leaves, blocks)
        ]
    )


def quaternion_to_matrix(q: np.ndarray) -> np.ndarray:
    """Unit quaternions ``(..., 4)`` as ``(w, x, y, z)`` to rotation matrices."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)], -1),
            np.stack([2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)], -1),
            np.stack([2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)], -1),
        ],
        -2,
    )


def sample_uniform_so3_matrices(rng: np.random.Generator, size=None) -> np.ndarray:
    """Haar-uniform rotation matrices from normalized Gaussian quaternions."""
    shape = () if size is None else (size,) if np.isscalar(size) else tuple(size)
    q = rng.standard_normal(shape + (4,))
    q /= np.linalg.norm(q, axis=-1, keepdims=True)
    return quaternion_to_matrix(q)


def sample_uniform_so3(rng: np.random.Generator) -> GroupPoint:
    return GroupPoint(SO3, (sample_uniform_so3_matrices(rng),))


def closed_form_indices(spec: GroupSpec) -> set:
    """Basis indices ``i`` whose dual left-invariant 1-form is closed.

    ``omega_i`` is closed iff ``omega_i([X, Y]) = 0`` for all ``X, Y``, i.e. the
    structure constants ``c[i, :, :]`` all vanish. Indices are 0-based.
    """
    c = spec.structure_constants
    return {i for i in range(spec.algebra_dim) if not np.any(c[i])}
