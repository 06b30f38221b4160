"""Text formats: ``fockmat`` matrices, CSV tables, deterministic JSON.

All floats are written with 17 significant digits, which round-trips every
double exactly.
"""

from __future__ import annotations

import io
import math
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

FMT = ".17g"


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot serialise non-finite value {x!r}")
    return format(x, FMT)


def write_fockmat(entries: np.ndarray, stream: TextIO) -> None:
    """Header ``fockmat M N`` then ``row col re im``, row-major, one entry per line."""
    m, n = entries.shape
    stream.write(f"fockmat {m} {n}\n")
    for i in range(m):
        for j in range(n):
            z = entries[i, j]
            stream.write(f"{i} {j} {fmt_float(z.real)} {fmt_float(z.imag)}\n")


def fockmat_text(entries: np.ndarray) -> str:
    buf = io.StringIO()
    write_fockmat(entries, buf)
    return buf.getvalue()


def read_fockmat(source: str | Path | TextIO) -> np.ndarray:
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            return read_fockmat(fh)
    header = source.readline().split()
    if len(header) != 3 or header[0] != "fockmat":
        raise ValueError(f"not a fockmat file: header {' '.join(header)!r}")
    m, n = int(header[1]), int(header[2])
    out = np.zeros((m, n), dtype=complex)
    count = 0
    for line in source:
        if not line.strip():
            continue
        i, j, re, im = line.split()
        out[int(i), int(j)] = complex(float(re), float(im))
        count += 1
    if count != m * n:
        raise ValueError(f"fockmat expected {m * n} entries, found {count}")
    return out


def matrix_csv(entries: np.ndarray) -> str:
    lines = ["row,col,re,im"]
    for (i, j), z in np.ndenumerate(entries):
        lines.append(f"{i},{j},{fmt_float(z.real)},{fmt_float(z.imag)}")
    return "\n".join(lines) + "\n"


def witness_csv(rows: Iterable[tuple[float, float]]) -> str:
    return "r,g\n" + "".join(f"{fmt_float(r)},{fmt_float(g)}\n" for r, g in rows)


def convergence_csv(record) -> str:
    return "N,M,value\n" + "".join(f"{n},{m},{fmt_float(v)}\n" for n, m, v in record.csv_rows())


def dump_json(obj, indent: int = 2) -> str:
    """JSON with insertion-ordered keys and 17-digit floats.

    Complex numbers become ``{"re": .., "im": ..}``; non-finite floats become
    ``null``.
    """
    return _emit(obj, 0, indent) + "\n"


def _emit(obj, level: int, indent: int) -> str:
    import json

    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, (complex, np.complexfloating)):
        return _emit({"re": float(obj.real), "im": float(obj.imag)}, level, indent)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, level + 1, indent)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, bool, np.number)) or v is None for v in obj):
            return "[" + ", ".join(_emit(v, level + 1, indent) for v in obj) + "]"
        items = [pad + _emit(v, level + 1, indent) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")
