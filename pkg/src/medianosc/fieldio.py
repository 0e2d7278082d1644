"""Reading and writing sampled fields and JSON/CSV reports.

Field file layout: one line of compact JSON header, an empty line, then the
raw values as little-endian float64 in row-major order::

    {"cells_per_side":8,"dim":1,"dtype":"f64","order":"row-major","origin":[0.0],"side":1.0}\\n
    \\n
    <8 * 8 bytes>

1D fields may also be plain CSV with a ``value`` column (an optional ``x``
column of cell centers is checked for uniform spacing and ignored otherwise).
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import MedianOscError
from .grid import SampledFunction

SEPARATOR = b"\n\n"


class FieldFormatError(MedianOscError, ValueError):
    """Malformed field file."""


def field_header(f: SampledFunction) -> dict:
    return {
        "dim": f.dim,
        "origin": [float(o) for o in f.origin],
        "side": float(f.side),
        "cells_per_side": f.cells_per_side,
        "dtype": "f64",
        "order": "row-major",
    }


def encode_field(f: SampledFunction) -> bytes:
    head = json.dumps(field_header(f), sort_keys=True, separators=(",", ":")).encode()
    return head + SEPARATOR + f.values.astype("<f8").tobytes(order="C")


def decode_field(blob: bytes) -> SampledFunction:
    head, sep, body = blob.partition(SEPARATOR)
    if not sep:
        raise FieldFormatError("missing blank line after the header")
    try:
        meta = json.loads(head)
    except json.JSONDecodeError as exc:
        raise FieldFormatError(f"bad header: {exc}") from exc
    for key in ("dim", "origin", "side", "cells_per_side"):
        if key not in meta:
            raise FieldFormatError(f"header lacks {key!r}")
    if meta.get("dtype", "f64") != "f64" or meta.get("order", "row-major") != "row-major":
        raise FieldFormatError("only dtype f64 in row-major order is supported")
    n, dim = int(meta["cells_per_side"]), int(meta["dim"])
    if len(body) != 8 * n**dim:
        raise FieldFormatError(f"expected {8 * n**dim} data bytes, found {len(body)}")
    values = np.frombuffer(body, dtype="<f8").reshape((n,) * dim)
    try:
        return SampledFunction.from_values(values, meta["origin"], float(meta["side"]))
    except ValueError as exc:
        raise FieldFormatError(str(exc)) from exc


def _read_csv(text: str) -> SampledFunction:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows or "value" not in rows[0]:
        raise FieldFormatError("CSV field needs a 'value' column")
    try:
        values = np.array([float(r["value"]) for r in rows])
        xs = np.array([float(r["x"]) for r in rows]) if "x" in rows[0] else None
    except ValueError as exc:
        raise FieldFormatError(f"non-numeric CSV entry: {exc}") from exc
    origin, side = 0.0, 1.0
    if xs is not None and xs.size > 1:
        w = (xs[-1] - xs[0]) / (xs.size - 1)
        if not (w > 0 and np.allclose(np.diff(xs), w, rtol=1e-9, atol=0)):
            raise FieldFormatError("x column must be uniformly increasing")
        origin, side = float(xs[0] - w / 2), float(w * xs.size)
    return SampledFunction.from_values(values, (origin,), side)


def load_field(path: str | Path) -> SampledFunction:
    path = Path(path)
    blob = path.read_bytes()
    if path.suffix.lower() == ".csv":
        return _read_csv(blob.decode())
    return decode_field(blob)


def save_field(f: SampledFunction, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        if f.dim != 1:
            raise FieldFormatError("CSV output is only available for 1D fields")
        x = f.frame.cell_centers()[0]
        write_csv(path, ["x", "value"], zip(x.tolist(), f.values.tolist()))
    else:
        path.write_bytes(encode_field(f))


def fmt(x) -> str:
    """Fixed 17-significant-digit rendering used in every output file."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _Float(obj)
    return obj


class _Float(float):
    pass


class _Encoder(json.JSONEncoder):
    def iterencode(self, o, _one_shot=False):
        # route floats through fmt() so output is byte-stable
        if isinstance(o, _Float):
            yield self._float(o)
            return
        if isinstance(o, dict):
            yield "{"
            for i, (k, v) in enumerate(o.items()):
                if i:
                    yield ", "
                yield json.dumps(k) + ": "
                yield from self.iterencode(v)
            yield "}"
        elif isinstance(o, list):
            yield "["
            for i, v in enumerate(o):
                if i:
                    yield ", "
                yield from self.iterencode(v)
            yield "]"
        else:
            yield json.dumps(o)

    @staticmethod
    def _float(x: float) -> str:
        s = fmt(x)
        # JSON has no inf/nan literals; emit them as strings
        return f'"{s}"' if s in ("nan", "inf", "-inf") else s


def dumps(obj) -> str:
    return "".join(_Encoder().iterencode(_jsonable(obj)))


def write_csv(path: str | Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
