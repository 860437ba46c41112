"""Text formats for codes and arcs.

Code files are line-oriented and self-describing: a version tag, the tower
(p, the degree of F_q over F_p, h, and both defining polynomials, coefficients
low to high), then the generator as rows of top-field integer codes.  The
integer codes are the base-p digit encoding fixed by the field tables, so a
file only means the same code when read with the same polynomials — which is
why they are part of the format.

Arc files are single JSON objects carrying the subspace universe parameters
(field, ambient dimension, subspace dimension) and the sorted ids.  Ids index
the universe's enumeration order, which is canonical (sorted packed keys), so
they are stable across runs.

serialize(parse(text)) == text for files produced here (canonical layout).
"""

from __future__ import annotations

import json

import numpy as np

from . import linalg as la
from .codes import AdditiveCode
from .gf import FieldTower, make_field, make_tower

FORMAT_TAG = "addmds-code v1"
ARC_FORMAT = 1


class FileFormatError(ValueError):
    """Malformed code or arc file; carries a line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


def code_to_text(code: AdditiveCode) -> str:
    tw = code.tower
    lines = [
        FORMAT_TAG,
        f"p {tw.p}",
        f"q-degree {tw.e}",
        f"h {tw.h}",
        "q-poly " + " ".join(str(c) for c in tw.mid.poly),
        "top-poly " + " ".join(str(c) for c in tw.top.poly),
        f"generator {code.G.shape[0]} {code.n}",
    ]
    for row in code.G:
        lines.append(" ".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


def _ints(value: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in value.split()]
    except ValueError:
        raise FileFormatError("expected integers", lineno) from None


def code_from_text(text: str) -> AdditiveCode:
    lines = text.splitlines()
    if not lines or lines[0].strip() != FORMAT_TAG:
        raise FileFormatError(f"missing format tag {FORMAT_TAG!r}", 1)
    fields: dict = {}
    idx = 1
    order = ("p", "q-degree", "h", "q-poly", "top-poly", "generator")
    for key in order:
        if idx >= len(lines):
            raise FileFormatError(f"missing {key!r} line", len(lines))
        name, _, value = lines[idx].partition(" ")
        if name != key:
            raise FileFormatError(f"expected {key!r}, found {name!r}", idx + 1)
        fields[key] = _ints(value, idx + 1)
        idx += 1
    (p,), (e,), (h,) = fields["p"], fields["q-degree"], fields["h"]
    try:
        tower = make_tower(p, e, h, qpoly=fields["q-poly"],
                           top_poly=fields["top-poly"])
    except Exception as exc:
        raise FileFormatError(f"bad field descriptor: {exc}", 2) from None
    kh, n = fields["generator"]
    rows = []
    for r in range(kh):
        if idx >= len(lines):
            raise FileFormatError("generator row missing", len(lines))
        row = _ints(lines[idx], idx + 1)
        if len(row) != n:
            raise FileFormatError(f"expected {n} entries", idx + 1)
        if any(x < 0 or x >= tower.top.order for x in row):
            raise FileFormatError("entry out of range for the top field", idx + 1)
        rows.append(row)
        idx += 1
    for extra in range(idx, len(lines)):
        if lines[extra].strip():
            raise FileFormatError("trailing content after generator", extra + 1)
    try:
        return AdditiveCode(tower, np.array(rows, dtype=np.uint8))
    except ValueError as exc:
        raise FileFormatError(str(exc), 8) from None


def save_code(path: str, code: AdditiveCode) -> None:
    with open(path, "w") as fh:
        fh.write(code_to_text(code))


def load_code(path: str) -> AdditiveCode:
    with open(path) as fh:
        return code_from_text(fh.read())


# -- arcs -----------------------------------------------------------------------

def arc_to_text(universe: la.SubspaceUniverse, ids) -> str:
    obj = {
        "format": ARC_FORMAT,
        "p": universe.field.p,
        "m": universe.field.m,
        "poly": list(universe.field.poly),
        "n_vec": universe.n_vec,
        "r": universe.r,
        "ids": sorted(int(i) for i in ids),
    }
    return json.dumps(obj, sort_keys=True) + "\n"


def arc_from_text(text: str):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"bad JSON: {exc.msg}", exc.lineno) from None
    try:
        if obj["format"] != ARC_FORMAT:
            raise FileFormatError(f"unsupported arc format {obj['format']}")
        field = make_field(obj["p"], obj["m"], obj["poly"])
        uni = la.subspace_universe(field, obj["n_vec"], obj["r"])
        ids = [int(i) for i in obj["ids"]]
    except (KeyError, TypeError) as exc:
        raise FileFormatError(f"missing or bad arc field: {exc}") from None
    if any(i < 0 or i >= uni.count for i in ids):
        raise FileFormatError("subspace id out of range")
    return uni, tuple(sorted(ids))


def save_arc(path: str, universe: la.SubspaceUniverse, ids) -> None:
    with open(path, "w") as fh:
        fh.write(arc_to_text(universe, ids))


def load_arc(path: str):
    with open(path) as fh:
        return arc_from_text(fh.read())
