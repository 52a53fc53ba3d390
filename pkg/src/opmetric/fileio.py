"""JSON files for operators and generators.

An operator file::

    {"rows": 1, "cols": 2, "dimH": 2, "dimK": 1,
     "data": [[1.0, 0.0], [0.5, -0.25]]}

``data`` lists ``[re, im]`` pairs in row-major order; ``rows = dimK`` and
``cols = dimH``. A generator file carries ``dimH``, ``dimK`` and three matrix
blocks ``A`` (dimH x dimK), ``U`` (dimH x dimH) and ``V`` (dimK x dimK) in the
same ``rows``/``cols``/``data`` layout.

Floats are written with 17 significant digits, so writing then reading gives the
same entries bit for bit.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .ball import BallAutomorphism, BallPoint
from .chk import ClosedOperator
from .dynamics import HBiholomorphicMap
from .errors import DimensionMismatch, NonFiniteEntry, ParseError


def _line_of(text: str, key: str) -> int | None:
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


def _where(source: str, text: str, key: str) -> str:
    line = _line_of(text, key)
    return f"{source}:{line}" if line is not None else source


def _load(text: str, source: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{source}:1: expected a JSON object")
    return doc


def _int_field(doc: dict, key: str, source: str, text: str) -> int:
    if key not in doc:
        raise ParseError(f"{source}: missing field {key!r}")
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ParseError(f"{_where(source, text, key)}: {key!r} must be a positive integer")
    return v


def _matrix_block(block, rows: int, cols: int, key: str, source: str, text: str) -> np.ndarray:
    where = _where(source, text, key)
    if not isinstance(block, dict):
        raise ParseError(f"{where}: {key!r} must be an object")
    r = _int_field(block, "rows", source, text)
    c = _int_field(block, "cols", source, text)
    if (r, c) != (rows, cols):
        raise DimensionMismatch(f"{where}: {key!r} is {r} x {c}, expected {rows} x {cols}")
    return _entries(block.get("data"), rows, cols, where)


def _entries(data, rows: int, cols: int, where: str) -> np.ndarray:
    if not isinstance(data, list):
        raise ParseError(f"{where}: 'data' must be a list of [re, im] pairs")
    if len(data) != rows * cols:
        raise DimensionMismatch(f"{where}: {len(data)} entries for a {rows} x {cols} matrix")
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, pair in enumerate(data):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
        ):
            raise ParseError(f"{where}: entry {i} is not an [re, im] pair of numbers")
        re, im = float(pair[0]), float(pair[1])
        if not (math.isfinite(re) and math.isfinite(im)):
            raise NonFiniteEntry(f"{where}: entry {i} is not finite")
        out[i] = complex(re, im)
    return out.reshape(rows, cols)


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror or e}") from None


def parse_operator(text: str, source: str = "<string>") -> ClosedOperator:
    doc = _load(text, source)
    rows = _int_field(doc, "rows", source, text)
    cols = _int_field(doc, "cols", source, text)
    dim_h = _int_field(doc, "dimH", source, text)
    dim_k = _int_field(doc, "dimK", source, text)
    if (rows, cols) != (dim_k, dim_h):
        raise DimensionMismatch(
            f"{_where(source, text, 'rows')}: rows x cols = {rows} x {cols} "
            f"but dimK x dimH = {dim_k} x {dim_h}"
        )
    return ClosedOperator(_entries(doc.get("data"), rows, cols, _where(source, text, "data")))


def parse_operator_file(path) -> ClosedOperator:
    return parse_operator(_read_text(path), str(path))


def parse_generator(text: str, source: str = "<string>") -> HBiholomorphicMap:
    doc = _load(text, source)
    m = _int_field(doc, "dimH", source, text)
    n = _int_field(doc, "dimK", source, text)
    blocks = {}
    for key, shape in (("A", (m, n)), ("U", (m, m)), ("V", (n, n))):
        if key not in doc:
            raise ParseError(f"{source}: missing block {key!r}")
        blocks[key] = _matrix_block(doc[key], *shape, key, source, text)
    return HBiholomorphicMap(BallAutomorphism(BallPoint(blocks["A"]), blocks["U"], blocks["V"]))


def parse_generator_file(path) -> HBiholomorphicMap:
    return parse_generator(_read_text(path), str(path))


def _block(mat: np.ndarray) -> dict:
    rows, cols = mat.shape
    return {
        "rows": rows,
        "cols": cols,
        "data": [[float(z.real), float(z.imag)] for z in np.asarray(mat).ravel()],
    }


def operator_document(t) -> dict:
    t = t if isinstance(t, ClosedOperator) else ClosedOperator(t)
    doc = {"rows": t.dim_k, "cols": t.dim_h, "dimH": t.dim_h, "dimK": t.dim_k}
    doc["data"] = _block(t.mat)["data"]
    return doc


def generator_document(g: HBiholomorphicMap) -> dict:
    m, n = g.auto.shape
    return {
        "dimH": m,
        "dimK": n,
        "A": _block(g.auto.A.mat),
        "U": _block(g.auto.U),
        "V": _block(g.auto.V),
    }


def emit(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits (enough to round-trip).

    Lists of numbers stay on one line; non-finite floats become ``null``.
    """
    pad = " " * (indent + 1)
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format(obj, ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{emit(str(k))}: {emit(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + " " * indent + "}"
    if isinstance(obj, (list, tuple)):
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(emit(v) for v in obj) + "]"
        items = [pad + emit(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + " " * indent + "]"
    raise TypeError(f"cannot emit {type(obj).__name__}")


def dumps(doc: dict) -> str:
    return emit(doc) + "\n"


def write_operator_file(path, t) -> None:
    Path(path).write_text(dumps(operator_document(t)))


def write_generator_file(path, g: HBiholomorphicMap) -> None:
    Path(path).write_text(dumps(generator_document(g)))


__all__ = [
    "dumps",
    "emit",
    "generator_document",
    "operator_document",
    "parse_generator",
    "parse_generator_file",
    "parse_operator",
    "parse_operator_file",
    "write_generator_file",
    "write_operator_file",
]
