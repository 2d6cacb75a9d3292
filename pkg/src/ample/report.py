"""Canonical JSON rendering for report documents.

Reports must be byte-identical across reruns, so serialization is pinned
down here instead of relying on json.dumps defaults: object keys are
sorted, output is compact, rationals become "p/q" strings (never numbers),
floats are rendered with %.17g (up to 17 significant digits, which
round-trips IEEE doubles exactly), and complex numbers become {"im", "re"}
objects.  NaN and infinity are rejected rather than emitted as the invalid
JSON tokens the stdlib would produce.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction


def _emit(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, Fraction):
        out.append(f'"{obj}"')
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"cannot serialize non-finite float {obj!r}")
        out.append(format(obj, ".17g"))
    elif isinstance(obj, complex):
        _emit({"re": obj.real, "im": obj.imag}, out)
    elif isinstance(obj, dict):
        out.append("{")
        first = True
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError(f"object keys must be strings, got {key!r}")
            if not first:
                out.append(",")
            first = False
            out.append(json.dumps(key, ensure_ascii=True))
            out.append(":")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def render(report: dict) -> str:
    """Serialize a report document to its canonical JSON text."""
    out: list[str] = []
    _emit(report, out)
    out.append("\n")
    return "".join(out)
