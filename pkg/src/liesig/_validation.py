"""Input coercion shared by the estimators and the CLI."""

from __future__ import annotations

import numbers

import numpy as np

from .lie_groups import SO3
from .paths import DiscretePath


def _as_path(x) -> DiscretePath:
    if isinstance(x, DiscretePath):
        return x
    a = np.asarray(x, dtype=float)
    if a.ndim == 3 and a.shape[1:] == (3, 3):
        return DiscretePath(SO3, (a,))
    if a.ndim in (1, 2):
        return DiscretePath.euclidean(a)
    raise ValueError(
        f"cannot interpret array of shape {a.shape} as a path; expected (T+1, d) "
        "for R^d or (T+1, 3, 3) for SO(3)"
    )


def check_paths(X, spec=None) -> list[DiscretePath]:
    """Coerce ``X`` to a non-empty list of paths on a single group.

    Accepts a sequence of :class:`DiscretePath`, a sequence of arrays, or one
    stacked array of shape ``(n, T+1, d)`` or ``(n, T+1, 3, 3)``.
    """
    if isinstance(X, DiscretePath):
        raise TypeError("expected a collection of paths, got a single DiscretePath")
    paths = [_as_path(x) for x in X]
    if not paths:
        raise ValueError("at least one path is required")
    specs = {p.spec for p in paths}
    if len(specs) != 1:
        raise ValueError(f"paths live on different groups: {sorted(map(repr, specs))}")
    if spec is not None and paths[0].spec != spec:
        raise ValueError(f"expected paths on {spec!r}, got {paths[0].spec!r}")
    return paths


def check_level(level, minimum: int = 0) -> int:
    if isinstance(level, bool) or not isinstance(level, numbers.Integral):
        raise TypeError(f"truncation level must be an integer, got {level!r}")
    if level < minimum:
        raise ValueError(f"truncation level must be >= {minimum}, got {level}")
    return int(level)
