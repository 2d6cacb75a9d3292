"""Config-document parsing for the command-line front end.

Configs are JSON objects.  Rationals are written as integers or "p/q"
strings (floats are rejected wherever exactness matters); divisor classes
are objects mapping basis names to rationals; bundles are nested objects
tagged by "kind".  Every key is checked: anything unknown for the active
command is an error naming the offending JSON path, so a typo cannot
silently fall back to a default.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .bundles import BundleExpr, Dual, Line, Sum, Twist
from .criteria import Assertions
from .errors import ConfigError, InvalidInputError
from .intersection import CohClass, SurfaceRing, as_rational
from .sweep import SweepConfig

COMMANDS = (
    "check",
    "st-check",
    "nakai",
    "counterexample",
    "verify-lemma",
    "lagrange",
    "griffiths",
    "epsilon",
)

# which top-level keys each command consumes, beyond "command" and "output_path"
_ALLOWED_KEYS = {
    "check": ("ring", "bundle", "assertions"),
    "st-check": ("ring", "bundle", "assertions"),
    "nakai": ("ring", "divisor", "curves"),
    "counterexample": ("r", "a"),
    "verify-lemma": ("sweep", "csv_path"),
    "lagrange": ("samples", "seed"),
    "griffiths": ("sweep", "csv_path"),
    "epsilon": ("ring", "bundle", "omega_sq"),
}

_SWEEP_KEYS = (
    "ranks",
    "epsilons",
    "samples",
    "seed",
    "restarts",
    "random_vectors",
    "iterations",
    "tol",
    "threshold",
    "batch_size",
    "threads",
    "mode",
    "histogram_bins",
)


@dataclass(frozen=True)
class RunConfig:
    command: str
    ring: SurfaceRing | None = None
    bundle: BundleExpr | None = None
    assertions: Assertions = Assertions()
    divisor: CohClass | None = None
    curves: tuple[CohClass, ...] = ()
    sweep: SweepConfig | None = None
    r: int | None = None
    a: Fraction | None = None
    omega_sq: Fraction | None = None
    samples: int | None = None
    seed: int | None = None
    csv_path: str | None = None
    output_path: str | None = None


def _fail(path: str, message: str):
    raise ConfigError(message, path=path)


def _object(value, path: str) -> dict:
    if not isinstance(value, dict):
        _fail(path, f"expected an object, got {type(value).__name__}")
    return dict(value)


def _array(value, path: str) -> list:
    if not isinstance(value, list):
        _fail(path, f"expected an array, got {type(value).__name__}")
    return value


def _int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(path, f"must be >= {minimum}, got {value}")
    return value


def _real(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        _fail(path, f"must be finite, got {value!r}")
    return float(value)


def _rational(value, path: str) -> Fraction:
    try:
        return as_rational(value)
    except (InvalidInputError, TypeError) as exc:
        _fail(path, str(exc))


def _reject_unknown(obj: dict, path: str):
    if obj:
        key = sorted(obj)[0]
        _fail(f"{path}.{key}" if path else key, "unknown key")


def _parse_ring(value, path: str) -> SurfaceRing:
    obj = _object(value, path)
    basis = _array(obj.pop("basis", None), f"{path}.basis")
    if not all(isinstance(name, str) for name in basis):
        _fail(f"{path}.basis", "basis names must be strings")
    rows_raw = _array(obj.pop("pairing", None), f"{path}.pairing")
    rows = []
    for i, row in enumerate(rows_raw):
        row = _array(row, f"{path}.pairing[{i}]")
        rows.append([_rational(x, f"{path}.pairing[{i}][{j}]") for j, x in enumerate(row)])
    _reject_unknown(obj, path)
    try:
        return SurfaceRing.from_rows(tuple(basis), rows)
    except InvalidInputError as exc:
        _fail(path, str(exc))


def _parse_divisor(value, path: str, ring: SurfaceRing) -> CohClass:
    obj = _object(value, path)
    coords = {}
    for name, raw in obj.items():
        if name not in ring.basis_names:
            _fail(f"{path}.{name}", f"not a basis name of this ring {ring.basis_names}")
        coords[name] = _rational(raw, f"{path}.{name}")
    return ring.divisor(coords)


def _parse_bundle(value, path: str, ring: SurfaceRing) -> BundleExpr:
    obj = _object(value, path)
    kind = obj.pop("kind", None)
    if kind == "line":
        divisor = _parse_divisor(obj.pop("divisor", None), f"{path}.divisor", ring)
        _reject_unknown(obj, path)
        return Line(divisor)
    if kind == "sum":
        raw = _array(obj.pop("summands", None), f"{path}.summands")
        if not raw:
            _fail(f"{path}.summands", "sum needs at least one summand")
        _reject_unknown(obj, path)
        return Sum(
            *(_parse_bundle(x, f"{path}.summands[{i}]", ring) for i, x in enumerate(raw))
        )
    if kind == "twist":
        inner = _parse_bundle(obj.pop("bundle", None), f"{path}.bundle", ring)
        divisor = _parse_divisor(obj.pop("divisor", None), f"{path}.divisor", ring)
        _reject_unknown(obj, path)
        return Twist(inner, divisor)
    if kind == "dual":
        inner = _parse_bundle(obj.pop("bundle", None), f"{path}.bundle", ring)
        _reject_unknown(obj, path)
        return Dual(inner)
    _fail(f"{path}.kind", f"expected one of line, sum, twist, dual; got {kind!r}")


def _parse_assertions(value, path: str) -> Assertions:
    if value is None:
        return Assertions()
    obj = _object(value, path)
    flags = {}
    for name in ("c1_positive", "ample_on_curves", "semistable"):
        raw = obj.pop(name, False)
        if not isinstance(raw, bool):
            _fail(f"{path}.{name}", f"expected true or false, got {raw!r}")
        flags[name] = raw
    _reject_unknown(obj, path)
    return Assertions(**flags)


def _parse_sweep(value, path: str) -> SweepConfig:
    obj = _object(value, path)
    kwargs = {}
    ranks = _array(obj.pop("ranks", None), f"{path}.ranks")
    kwargs["ranks"] = tuple(_int(x, f"{path}.ranks[{i}]", 2) for i, x in enumerate(ranks))
    if "epsilons" in obj:
        eps = _array(obj.pop("epsilons"), f"{path}.epsilons")
        kwargs["epsilons"] = tuple(_real(x, f"{path}.epsilons[{i}]") for i, x in enumerate(eps))
    for name, minimum in (
        ("samples", 1),
        ("seed", 0),
        ("restarts", 1),
        ("random_vectors", 0),
        ("iterations", 1),
        ("batch_size", 1),
        ("threads", 1),
        ("histogram_bins", 1),
    ):
        if name in obj:
            kwargs[name] = _int(obj.pop(name), f"{path}.{name}", minimum)
    for name in ("tol", "threshold"):
        if name in obj:
            kwargs[name] = _real(obj.pop(name), f"{path}.{name}")
    if "mode" in obj:
        mode = obj.pop("mode")
        if not isinstance(mode, str):
            _fail(f"{path}.mode", f"expected a string, got {mode!r}")
        kwargs["mode"] = mode
    _reject_unknown(obj, path)
    try:
        return SweepConfig(**kwargs)
    except InvalidInputError as exc:
        _fail(path, str(exc))


def config_from_mapping(document: dict) -> RunConfig:
    """Validate an already-deserialized config object into a RunConfig."""
    obj = _object(document, "")
    command = obj.pop("command", None)
    if command not in COMMANDS:
        _fail("command", f"expected one of {', '.join(COMMANDS)}; got {command!r}")
    allowed = _ALLOWED_KEYS[command]

    out_path = obj.pop("output_path", None)
    if out_path is not None and not isinstance(out_path, str):
        _fail("output_path", f"expected a string, got {out_path!r}")

    fields: dict = {"command": command, "output_path": out_path}

    ring = None
    if "ring" in allowed:
        if "ring" not in obj:
            _fail("ring", f"required for command {command}")
        ring = _parse_ring(obj.pop("ring"), "ring")
        fields["ring"] = ring
    if "bundle" in allowed:
        if "bundle" not in obj:
            _fail("bundle", f"required for command {command}")
        fields["bundle"] = _parse_bundle(obj.pop("bundle"), "bundle", ring)
    if "assertions" in allowed:
        fields["assertions"] = _parse_assertions(obj.pop("assertions", None), "assertions")
    if "divisor" in allowed:
        if "divisor" not in obj:
            _fail("divisor", f"required for command {command}")
        fields["divisor"] = _parse_divisor(obj.pop("divisor"), "divisor", ring)
    if "curves" in allowed and "curves" in obj:
        raw = _array(obj.pop("curves"), "curves")
        fields["curves"] = tuple(
            _parse_divisor(x, f"curves[{i}]", ring) for i, x in enumerate(raw)
        )
    if "sweep" in allowed:
        if "sweep" not in obj:
            _fail("sweep", f"required for command {command}")
        fields["sweep"] = _parse_sweep(obj.pop("sweep"), "sweep")
    if "r" in allowed:
        if "r" not in obj:
            _fail("r", f"required for command {command}")
        fields["r"] = _int(obj.pop("r"), "r", 3)
    if "a" in allowed:
        if "a" not in obj:
            _fail("a", f"required for command {command}")
        fields["a"] = _rational(obj.pop("a"), "a")
    if "omega_sq" in allowed:
        if "omega_sq" not in obj:
            _fail("omega_sq", f"required for command {command}")
        fields["omega_sq"] = _rational(obj.pop("omega_sq"), "omega_sq")
    if "samples" in allowed and "samples" in obj:
        fields["samples"] = _int(obj.pop("samples"), "samples", 1)
    if "seed" in allowed and "seed" in obj:
        fields["seed"] = _int(obj.pop("seed"), "seed", 0)
    if "csv_path" in allowed and "csv_path" in obj:
        raw = obj.pop("csv_path")
        if not isinstance(raw, str):
            _fail("csv_path", f"expected a string, got {raw!r}")
        fields["csv_path"] = raw

    _reject_unknown(obj, "")
    return RunConfig(**fields)


def parse_config(document: str) -> RunConfig:
    """Parse and validate a JSON config document."""
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return config_from_mapping(data)
