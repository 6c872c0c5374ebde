"""Serialisation helpers: exact rationals as ``"p/q"`` strings plus a decimal."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np


def rational(x) -> dict:
    """``{"exact": "p/q", "approx": float-ish string}`` for a rational or int."""
    f = Fraction(x)
    return {"exact": f"{f.numerator}/{f.denominator}", "approx": _approx(f)}


def _approx(f: Fraction) -> str:
    # big rationals overflow float(); scale by powers of two first
    try:
        return f"{float(f):.12g}"
    except OverflowError:
        return "inf" if f > 0 else "-inf"


def big_int(v: int) -> Any:
    """Small ints stay numbers; huge ones become decimal strings (or a bit-length note)."""
    if abs(v) < 2**53:
        return v
    if v.bit_length() > 4096:
        return {"bits": v.bit_length()}
    return str(v)


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, int):
        return big_int(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {}
        for f in dataclasses.fields(obj):
            if f.name.startswith("_"):
                continue
            out[f.name] = to_jsonable(getattr(obj, f.name))
        return out
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=repr) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    return repr(obj)


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _cell(v: Any) -> Any:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return v
