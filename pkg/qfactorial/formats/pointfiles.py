"""Readers and writers for the plain and structured point-set formats."""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import List, Tuple, Union

from pydantic import ValidationError

from qfactorial.core.errors import InputError, PointFileError
from qfactorial.projgeom import ProjPoint
from qfactorial.formats.schemas import PointSetFile

_HEADER = re.compile(r"^#\s*P\s+(\d+)\s*$")


def parse_plain(text: str) -> PointSetFile:
    """``# P <dim>`` header, then one whitespace-separated integer tuple per line."""
    dim = None
    points: List[List[int]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if dim is None:
            header = _HEADER.match(line)
            if not header:
                raise PointFileError(f"line {number}: expected a '# P <dim>' header")
            dim = int(header.group(1))
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            row = [int(token) for token in line.split()]
        except ValueError:
            raise PointFileError(f"line {number}: coordinates must be integers") from None
        if len(row) != dim + 1:
            raise PointFileError(f"line {number}: expected {dim + 1} coordinates, got {len(row)}")
        points.append(row)
    if dim is None:
        raise PointFileError("empty point file")
    return _validated({"ambient_dim": dim, "points": points})


def format_plain(pointset: PointSetFile) -> str:
    lines = [f"# P {pointset.ambient_dim}"]
    lines += [" ".join(str(c) for c in row) for row in pointset.points]
    return "\n".join(lines) + "\n"


def parse_structured(text: str) -> PointSetFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PointFileError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return _validated(data)


def format_structured(pointset: PointSetFile) -> str:
    return json.dumps(pointset.model_dump(exclude_none=True), sort_keys=True, indent=2) + "\n"


def _validated(data: object) -> PointSetFile:
    try:
        return PointSetFile.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise PointFileError(f"invalid point set: {first['msg']}") from None


def parse_points_text(text: str) -> PointSetFile:
    if text.lstrip().startswith("{"):
        return parse_structured(text)
    return parse_plain(text)


def load_point_file(path: Union[str, Path]) -> PointSetFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise PointFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse_points_text(text)


def points_of(pointset: PointSetFile) -> Tuple[ProjPoint, ...]:
    """Normalized points; the field descriptor decides the normalization."""
    field = pointset.field_descriptor()
    try:
        return tuple(ProjPoint.of(row, field) for row in pointset.points)
    except InputError as exc:
        raise PointFileError(str(exc)) from None


__all__ = [
    "parse_plain",
    "format_plain",
    "parse_structured",
    "format_structured",
    "parse_points_text",
    "load_point_file",
    "points_of",
]
