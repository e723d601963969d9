from __future__ import annotations

import dataclasses
import math
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence, Tuple

import numpy as np
import orjson

from ..core.algebra import Element
from ..core.phases import FloatTheta, IrrationalBasis, ThetaData, UnitPhase
from ..core.weights import Weight
from .store import element_to_list

JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY


def _pair(q: Fraction) -> list:
    return [q.numerator, q.denominator]


def phase_to_json(a: UnitPhase) -> dict:
    return {"r0": _pair(a.r0), "irr": {str(t): _pair(c) for t, c in a.irr}}


def theta_to_json(theta: ThetaData) -> dict:
    return {
        "n": theta.n,
        "alphas": list(theta.basis.values),
        "vartheta": [
            {"k": k, "j": j, "r0": _pair(p.r0), "irr": {str(t): _pair(c) for t, c in p.irr}}
            for (k, j), p in theta.vartheta
        ],
    }


def to_jsonable(obj: Any) -> Any:
    """Plain JSON data for reports; rationals stay [num, den] pairs."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, Fraction):
        return _pair(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, UnitPhase):
        return phase_to_json(obj)
    if isinstance(obj, ThetaData):
        return theta_to_json(obj)
    if isinstance(obj, FloatTheta):
        return {"n": obj.n, "vartheta": [{"k": k, "j": j, "value": v} for (k, j), v in obj.values]}
    if isinstance(obj, IrrationalBasis):
        return {"values": list(obj.values), "assumption": obj.assumption}
    if isinstance(obj, Weight):
        return obj.name
    if isinstance(obj, Element):
        return element_to_list(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if not f.name.startswith("_")}
        # derived properties worth reporting
        for name in ("ok", "passed"):
            if hasattr(type(obj), name) and isinstance(getattr(type(obj), name), property):
                out[name] = to_jsonable(getattr(obj, name))
        return out
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def render_json(report: Any) -> str:
    return orjson.dumps(to_jsonable(report), option=JSON_OPTIONS).decode()


def build_rich_table(title: str, rows: Iterable[Tuple[str, Any]]):
    """Two-column key/value table for the stderr summary."""
    from rich.table import Table

    table = Table(title=title, show_header=True, header_style="bold", expand=False, box=None)
    table.add_column("Quantity", justify="left", no_wrap=True)
    table.add_column("Value", justify="right")
    for key, value in rows:
        table.add_row(key, format_value(value))
    return table


def format_value(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, Sequence) and not isinstance(value, str):
        return "(" + ", ".join(format_value(v) for v in value) + ")"
    return str(value)
