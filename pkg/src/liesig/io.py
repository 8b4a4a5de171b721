"""Reading and writing documents (JSON) and matrices (CSV).

Document layouts
----------------
tensor : ``{"ambient_dim": N, "level": M, "levels": [[...], ...]}``
path   : ``{"spec": <group>, "timestamps": [...]?, "points": [[...], ...]}``
         with SO(3) blocks flattened row-major to 9 numbers
group  : ``{"kind": "so3"} | {"kind": "euclidean", "dim": N}
         | {"kind": "product", "factors": [...]}``

Floats are written with ``repr`` so every value round-trips exactly.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from .lie_groups import GroupSpec
from .paths import DiscretePath
from .tensor_algebra import TruncatedTensor


class DocumentError(ValueError):
    """A document or CSV file could not be parsed."""


def tensor_to_dict(t: TruncatedTensor) -> dict:
    return {
        "ambient_dim": t.ambient_dim,
        "level": t.level,
        "levels": [c.tolist() for c in t.coeffs],
    }


def tensor_from_dict(doc: dict) -> TruncatedTensor:
    try:
        return TruncatedTensor(int(doc["ambient_dim"]), int(doc["level"]), tuple(doc["levels"]))
    except (KeyError, TypeError, ValueError) as err:
        raise DocumentError(f"invalid tensor document: {err}") from err


def path_to_dict(path: DiscretePath) -> dict:
    doc = {"spec": path.spec.to_dict(), "points": path.to_flat().tolist()}
    if path.timestamps is not None:
        doc["timestamps"] = path.timestamps.tolist()
    return doc


def path_from_dict(doc: dict) -> DiscretePath:
    try:
        spec = GroupSpec.from_dict(doc["spec"])
        rows = np.asarray(doc["points"], dtype=float)
        if rows.ndim == 1:
            rows = rows[:, None]
        return DiscretePath.from_flat(spec, rows, doc.get("timestamps"))
    except (KeyError, TypeError, ValueError) as err:
        raise DocumentError(f"invalid path document: {err}") from err


def atomic_write_text(target, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    target = Path(target)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def read_document(source) -> dict:
    try:
        with open(source) as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise DocumentError(f"{source}: not a valid document ({err})") from err


def write_document(target, doc) -> None:
    atomic_write_text(target, dumps(doc))


def read_path(source) -> DiscretePath:
    """Load a path document, or a Euclidean path from a ``.csv`` file."""
    if str(source).lower().endswith(".csv"):
        return read_euclidean_csv(source)
    return path_from_dict(read_document(source))


def write_path(target, path: DiscretePath) -> None:
    write_document(target, path_to_dict(path))


def read_tensor(source) -> TruncatedTensor:
    return tensor_from_dict(read_document(source))


def write_tensor(target, t: TruncatedTensor) -> None:
    write_document(target, tensor_to_dict(t))


def _parse_row(row: list[str], where: str) -> list[float]:
    try:
        return [float(x) for x in row]
    except ValueError as err:
        raise DocumentError(f"{where}: non-numeric entry ({err})") from err


def read_euclidean_csv(source) -> DiscretePath:
    """One row per time step; a non-numeric first row is taken as a header."""
    with open(source, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(x.strip() for x in r)]
    if not rows:
        raise DocumentError(f"{source}: empty CSV")
    try:
        [float(x) for x in rows[0]]
    except ValueError:
        rows = rows[1:]
    data = [_parse_row(r, f"{source}:{i + 1}") for i, r in enumerate(rows)]
    if len({len(r) for r in data}) != 1:
        raise DocumentError(f"{source}: rows have different lengths")
    return DiscretePath.euclidean(np.array(data))


def format_csv(matrix: np.ndarray, header: Sequence[str] | None = None) -> str:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    lines = []
    if header is not None:
        lines.append(",".join(header))
    for row in matrix:
        lines.append(",".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def write_matrix_csv(target, matrix: np.ndarray, header: Sequence[str] | None = None) -> None:
    atomic_write_text(target, format_csv(matrix, header))


def read_matrix_csv(source, header: bool = False):
    """Read a numeric CSV matrix; with ``header`` also return the header row."""
    with open(source, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    names = None
    if header:
        if not rows:
            raise DocumentError(f"{source}: missing header row")
        names, rows = rows[0], rows[1:]
    data = np.array([_parse_row(r, str(source)) for r in rows], dtype=float)
    return (data, names) if header else data
