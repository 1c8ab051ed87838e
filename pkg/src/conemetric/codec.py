"""JSON encoding for points, maps, differentials and the CLI input files.

Encoding rules: a complex number is ``[re, im]``, the point at infinity is
the string ``"inf"``, a rational map is ``{"num": [...], "den": [...]}``
with ascending coefficients.  Output is deterministic: sorted keys and
floats printed with 17 significant digits.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from numbers import Integral, Real

import numpy as np

from .character import PathPolyline, ThirdKindDifferential, make_differential
from .errors import SchemaError
from .frobenius import DEFAULT_ORDER, PowerSeries
from .pullback import ConicalDivisor
from .sphere import INF, Polynomial, RationalMap, is_inf


# ------------------------------------------------------------------ output

def _float(x: float) -> float:
    x = float(x)
    return 0.0 if x == 0 else x     # drop the sign of -0.0


def to_jsonable(obj):
    """Recursively convert library values to plain JSON types."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if is_inf(obj):
        return "inf"
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (Integral, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return _float(obj)
    if isinstance(obj, (Real, np.floating)):
        return _float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_float(obj.real), _float(obj.imag)]
    if isinstance(obj, Polynomial):
        return [to_jsonable(c) for c in obj.coeffs]
    if isinstance(obj, RationalMap):
        return {"num": to_jsonable(obj.num), "den": to_jsonable(obj.den)}
    if isinstance(obj, ConicalDivisor):
        return [{"point": to_jsonable(p), "alpha": _float(a)} for p, a in obj.entries]
    if isinstance(obj, ThirdKindDifferential):
        return {"poles": [{"point": to_jsonable(q), "residue": _float(r)} for q, r in obj.poles]}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _emit(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return json.dumps(repr(obj))    # JSON has no inf/nan literals
        text = format(obj, ".17g")
        if "." not in text and "e" not in text and "n" not in text:
            text += ".0"
        return text
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [_emit(v, indent, level + 1) for v in obj]
        if all(not isinstance(v, (list, dict)) for v in obj):
            return "[" + ", ".join(items) + "]"
        return "[\n" + ",\n".join(pad + s for s in items) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(k)}: {_emit(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(pad + s for s in items) + "\n" + end + "}"
    raise TypeError(f"cannot emit {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON text (sorted keys, ``%.17g`` floats)."""
    return _emit(to_jsonable(obj), indent, 0)


# ------------------------------------------------------------------- input

def _need(obj, key, where):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    if key not in obj:
        raise SchemaError(f"{where}: missing key {key!r}")
    return obj[key]


def parse_complex(v, where: str = "value") -> complex:
    if isinstance(v, bool):
        raise SchemaError(f"{where}: expected a number or [re, im]")
    if isinstance(v, (int, float)):
        return complex(float(v))
    if (isinstance(v, list) and len(v) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
        return complex(float(v[0]), float(v[1]))
    raise SchemaError(f"{where}: expected a number or [re, im], got {v!r}")


def parse_point(v, where: str = "point"):
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "infinity", "∞"):
            return INF
        raise SchemaError(f"{where}: unknown point string {v!r}")
    return parse_complex(v, where)


def _real(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{where}: expected a real number, got {v!r}")
    return float(v)


def _coeff_list(v, where):
    if not isinstance(v, list) or not v:
        raise SchemaError(f"{where}: expected a non-empty coefficient list")
    return [parse_complex(c, f"{where}[{k}]") for k, c in enumerate(v)]


def parse_map(obj) -> RationalMap:
    num = _coeff_list(_need(obj, "num", "map"), "map.num")
    den = _coeff_list(obj.get("den", [1.0]), "map.den")
    return RationalMap(Polynomial(num), Polynomial(den))


def parse_omega(obj) -> ThirdKindDifferential:
    poles = _need(obj, "poles", "omega")
    if not isinstance(poles, list):
        raise SchemaError("omega.poles: expected a list")
    out = []
    for k, entry in enumerate(poles):
        where = f"omega.poles[{k}]"
        out.append((parse_point(_need(entry, "point", where), where + ".point"),
                    _real(_need(entry, "residue", where), where + ".residue")))
    return make_differential(out)


def parse_divisor(obj) -> ConicalDivisor:
    entries = _need(obj, "entries", "divisor") if isinstance(obj, dict) else obj
    if not isinstance(entries, list):
        raise SchemaError("divisor.entries: expected a list")
    out = []
    for k, entry in enumerate(entries):
        where = f"divisor.entries[{k}]"
        out.append((parse_point(_need(entry, "point", where), where + ".point"),
                    _real(_need(entry, "alpha", where), where + ".alpha")))
    return ConicalDivisor(tuple(out))


def parse_series(obj, order: int | None = None) -> PowerSeries:
    coeffs = _coeff_list(_need(obj, "coeffs", "q"), "q.coeffs")
    n = order if order is not None else obj.get("order", max(DEFAULT_ORDER, len(coeffs) - 1))
    if isinstance(n, bool) or not isinstance(n, int):
        raise SchemaError("q.order: expected an integer")
    return PowerSeries(tuple(coeffs), n)


def parse_path(obj, where: str = "path") -> PathPolyline:
    verts = _need(obj, "vertices", where)
    if not isinstance(verts, list):
        raise SchemaError(f"{where}.vertices: expected a list")
    pts = [parse_complex(v, f"{where}.vertices[{k}]") for k, v in enumerate(verts)]
    closed = obj.get("closed", False)
    if not isinstance(closed, bool):
        raise SchemaError(f"{where}.closed: expected true or false")
    return PathPolyline(tuple(pts), closed)


def load_json(path: str):
    """Read a JSON file; unreadable or malformed files are schema errors."""
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


__all__ = ["to_jsonable", "dumps", "parse_complex", "parse_point", "parse_map", "parse_omega",
           "parse_divisor", "parse_series", "parse_path", "load_json"]
