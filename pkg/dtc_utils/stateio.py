"""Reading and writing states as JSON.

The format is a single object

    {"dims": [2, 2], "labels": ["A", "B"], "matrix": [[[re, im], ...], ...]}

with a dense, row-major matrix of [real, imaginary] pairs. "labels" is
optional. Floats are written with repr(), which round-trips exactly.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from os import PathLike
from pathlib import Path
from typing import Any

import numpy as np

from .config import Settings
from .exc import StateFileError
from .state import MultipartiteState, make_state
from .types import ComplexMatrix


def state_to_json(s: MultipartiteState) -> dict[str, Any]:
    return {
        "dims": list(s.dims),
        "labels": list(s.labels),
        "matrix": [
            [[float(z.real), float(z.imag)] for z in row] for row in s.matrix
        ],
    }


def write_state(s: MultipartiteState, path: PathLike[str] | str) -> None:
    with open(path, "w") as f:
        json.dump(state_to_json(s), f, indent=1)
        f.write("\n")


def read_state(
    path: PathLike[str] | str, *, settings: Settings | None = None
) -> MultipartiteState:
    """Load and validate a state file.

    Raise StateFileError for unreadable or malformed files; validation
    errors from make_state() propagate unchanged.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise StateFileError(path, exc.strerror or str(exc)) from exc
    except UnicodeDecodeError as exc:
        raise StateFileError(
            path, f"not valid UTF-8 at byte {exc.start}"
        ) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(
            path, exc.msg, line=exc.lineno, column=exc.colno
        ) from exc
    return state_from_json(doc, path=path, settings=settings)


def state_from_json(
    doc: Any,
    *,
    path: PathLike[str] | str = "<json>",
    settings: Settings | None = None,
) -> MultipartiteState:
    if not isinstance(doc, Mapping):
        raise StateFileError(path, "top-level value must be an object")
    for key in ("dims", "matrix"):
        if key not in doc:
            raise StateFileError(path, f"missing key '{key}'")
    dims = doc["dims"]
    if not isinstance(dims, list) or not all(
        isinstance(d, int) and not isinstance(d, bool) for d in dims
    ):
        raise StateFileError(path, "'dims' must be a list of integers")
    labels = doc.get("labels")
    if labels is not None and not (
        isinstance(labels, list) and all(isinstance(x, str) for x in labels)
    ):
        raise StateFileError(path, "'labels' must be a list of strings")
    return make_state(
        _parse_matrix(doc["matrix"], path), dims, labels, settings=settings
    )


def _parse_matrix(rows: Any, path: PathLike[str] | str) -> ComplexMatrix:
    if not isinstance(rows, list) or not rows:
        raise StateFileError(path, "'matrix' must be a non-empty list of rows")
    width = len(rows)
    out = np.zeros((width, width), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != width:
            raise StateFileError(
                path, f"matrix row {i} must have {width} entries"
            )
        for j, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(_is_number(x) for x in entry)
            ):
                raise StateFileError(
                    path,
                    f"matrix entry [{i}][{j}] must be a [re, im] pair "
                    f"of numbers, got {entry!r}",
                )
            try:
                out[i, j] = complex(entry[0], entry[1])
            except OverflowError:
                raise StateFileError(
                    path, f"matrix entry [{i}][{j}] is out of range"
                ) from None
    return out


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)
