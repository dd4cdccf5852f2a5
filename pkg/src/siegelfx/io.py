"""Scenario and beta-spec files (JSON and CSV).

Scenario JSON::

    {"rates": [1.25, "1.31"], "probabilities": ["1/3", "2/3"], "metadata": {"pair": "EURUSD"}}

Scenario CSV: first row rates, optional second row probabilities; lines of
the form ``# key=value`` carry metadata. Beta spec (JSON, ``.beta``)::

    {"arity": 2, "representation": "power_law", "exponents": ["-1/3", "1/3"]}

Rates are converted from their decimal text to binary floats exactly once.
Probabilities and beta exponents are exact rationals and never pass
through floats.
"""

from __future__ import annotations

import csv
import io
import json
import re
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import ParseError, ReciprocityViolation, SiegelError, ValidationError
from .reciprocity import ReciprocityFunction, antisymmetry_defects
from .scenario import RateScenario

__all__ = [
    "parse_scenario",
    "serialize_scenario",
    "load_scenario",
    "save_scenario",
    "parse_beta_spec",
    "serialize_beta_spec",
    "load_beta_spec",
    "detect_format",
]

_RATIONAL = re.compile(r"^\s*([+-]?\d{1,60})\s*(?:/\s*(\d{1,60}))?\s*$")
_DECIMAL = re.compile(r"^\s*[+-]?(\d{1,400}(\.\d{0,400})?|\.\d{1,400})([eE][+-]?\d{1,4})?\s*$")
_MAX_EXPONENT = 400


def detect_format(path: str | Path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix in (".json", ".beta", ""):
        return "json"
    raise ParseError(f"cannot infer format from extension {suffix!r}; pass format explicitly")


def _decode(data: bytes | str) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"input is not valid UTF-8 ({exc.reason})", f"byte {exc.start}") from exc


def _reject_constant(name: str):
    raise ParseError(f"{name} is not allowed")


def _load_json(text: str) -> Any:
    try:
        return json.loads(text, parse_float=Decimal, parse_int=Decimal, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
    except RecursionError as exc:
        raise ParseError("nesting too deep") from exc
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def _rate(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (Decimal, str)):
        raise ParseError(f"expected a number, got {type(value).__name__}", where)
    if isinstance(value, str):
        if not _DECIMAL.match(value):
            raise ParseError(f"not a decimal number: {value!r}", where)
        value = Decimal(value.strip())
    if not value.is_finite():
        raise ValidationError(f"{where}: rate must be finite")
    if abs(value.adjusted()) > _MAX_EXPONENT:
        raise ValidationError(f"{where}: rate {value} is out of double range")
    return float(value)


def _rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool):
        raise ParseError("expected a rational, got bool", where)
    if isinstance(value, Decimal):
        if not value.is_finite() or abs(value.adjusted()) > _MAX_EXPONENT:
            raise ParseError(f"unusable number {value}", where)
        return Fraction(value)
    if not isinstance(value, str):
        raise ParseError(f"expected 'num/den' string, got {type(value).__name__}", where)
    m = _RATIONAL.match(value)
    if m:
        num, den = int(m.group(1)), int(m.group(2) or 1)
        if den == 0:
            raise ParseError("zero denominator", where)
        return Fraction(num, den)
    if _DECIMAL.match(value):
        d = Decimal(value.strip())
        if abs(d.adjusted()) > _MAX_EXPONENT:
            raise ParseError(f"unusable number {value!r}", where)
        return Fraction(d)
    raise ParseError(f"not a rational number: {value!r}", where)


def _build_scenario(rates: list[float], probs: list[Fraction] | None, metadata: dict) -> RateScenario:
    try:
        return RateScenario(tuple(rates), None if probs is None else tuple(probs), metadata)
    except SiegelError:
        raise
    except (TypeError, ValueError) as exc:  # pragma: no cover - defensive
        raise ValidationError(str(exc)) from exc


def _parse_json_scenario(text: str) -> RateScenario:
    obj = _load_json(text)
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object")
    unknown = set(obj) - {"rates", "probabilities", "metadata"}
    if unknown:
        raise ParseError(f"unknown field(s): {', '.join(sorted(unknown))}")
    if "rates" not in obj:
        raise ParseError("missing field 'rates'")
    raw = obj["rates"]
    if not isinstance(raw, list):
        raise ParseError("must be a list", "rates")
    rates = [_rate(v, f"rates[{i}]") for i, v in enumerate(raw)]
    probs = None
    if obj.get("probabilities") is not None:
        rp = obj["probabilities"]
        if not isinstance(rp, list):
            raise ParseError("must be a list", "probabilities")
        probs = [_rational(v, f"probabilities[{i}]") for i, v in enumerate(rp)]
    meta = obj.get("metadata") or {}
    if not isinstance(meta, dict):
        raise ParseError("must be an object", "metadata")
    return _build_scenario(rates, probs, _plain(meta))


def _plain(obj: Any) -> Any:
    """Turn Decimals left by the JSON loader back into ints/floats."""
    if isinstance(obj, Decimal):
        return int(obj) if obj == obj.to_integral_value() and "." not in str(obj) else float(obj)
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_plain(v) for v in obj]
    return obj


def _parse_csv_scenario(text: str) -> RateScenario:
    meta: dict[str, str] = {}
    rows: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        try:
            cells = next(csv.reader([line]))
        except csv.Error as exc:
            raise ParseError(str(exc), f"line {lineno}") from exc
        rows.append((lineno, cells))
    if not rows:
        raise ParseError("no rate row found")
    if len(rows) > 2:
        raise ParseError("expected at most two rows (rates, probabilities)", f"line {rows[2][0]}")
    lineno, cells = rows[0]
    rates = [_rate(c, f"line {lineno} field {j + 1}") for j, c in enumerate(cells)]
    probs = None
    if len(rows) == 2:
        lineno, cells = rows[1]
        probs = [_rational(c, f"line {lineno} field {j + 1}") for j, c in enumerate(cells)]
    return _build_scenario(rates, probs, meta)


def parse_scenario(data: bytes | str, format: str = "json") -> RateScenario:
    """Parse scenario text. Raises ParseError or ValidationError, never anything else."""
    text = _decode(data)
    fmt = format.lower()
    try:
        if fmt == "json":
            return _parse_json_scenario(text)
        if fmt == "csv":
            return _parse_csv_scenario(text)
    except SiegelError:
        raise
    except (ValueError, TypeError, ArithmeticError, RecursionError, MemoryError) as exc:
        raise ParseError(f"unreadable input: {exc}") from exc
    raise ParseError(f"unknown format {format!r} (expected json or csv)")


def _fmt_rate(r: float) -> str:
    return repr(float(r))


def serialize_scenario(s: RateScenario, format: str = "json") -> str:
    """Inverse of :func:`parse_scenario` on semantic content.

    Rates use the shortest round-trip float representation.
    """
    fmt = format.lower()
    if fmt == "json":
        obj: dict[str, Any] = {"rates": [float(r) for r in s.rates]}
        if s.probabilities is not None:
            obj["probabilities"] = [str(p) for p in s.probabilities]
        if s.metadata:
            obj["metadata"] = dict(s.metadata)
        return json.dumps(obj, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        for k, v in s.metadata.items():
            buf.write(f"# {k}={v}\n")
        buf.write(",".join(_fmt_rate(r) for r in s.rates) + "\n")
        if s.probabilities is not None:
            buf.write(",".join(str(p) for p in s.probabilities) + "\n")
        return buf.getvalue()
    raise ParseError(f"unknown format {format!r} (expected json or csv)")


def load_scenario(path: str | Path, format: str | None = None) -> RateScenario:
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", str(p)) from exc
    return parse_scenario(data, format or detect_format(p))


def save_scenario(s: RateScenario, path: str | Path, format: str | None = None) -> None:
    p = Path(path)
    p.write_text(serialize_scenario(s, format or detect_format(p)), encoding="utf-8", newline="\n")


def parse_beta_spec(data: bytes | str, *, validate: bool = True) -> ReciprocityFunction:
    """Load a power-law beta spec.

    With ``validate`` the exponent antisymmetry is checked exactly and a
    ReciprocityViolation raised on failure; ``validate=False`` returns the
    function as written so it can be audited and reported on.
    """
    obj = _load_json(_decode(data))
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object")
    rep = obj.get("representation", "power_law")
    if rep != "power_law":
        raise ParseError(f"unsupported representation {rep!r}", "representation")
    raw = obj.get("exponents")
    if not isinstance(raw, list) or not raw:
        raise ParseError("must be a nonempty list", "exponents")
    exps = [_rational(v, f"exponents[{i}]") for i, v in enumerate(raw)]
    if "arity" in obj:
        arity = obj["arity"]
        if isinstance(arity, bool) or not isinstance(arity, Decimal) or arity != len(exps):
            raise ParseError(f"arity {arity!r} does not match {len(exps)} exponents", "arity")
    if validate and antisymmetry_defects(exps):
        i, j, s = antisymmetry_defects(exps)[0]
        raise ReciprocityViolation(f"exponents are not antisymmetric: a_{i} + a_{j} = {s} != 0")
    return ReciprocityFunction.power_law(exps, validate=False)


def serialize_beta_spec(beta: ReciprocityFunction) -> str:
    if not beta.is_power_law:
        raise ValidationError("only power-law reciprocity functions can be serialised")
    obj = {
        "arity": beta.arity,
        "representation": "power_law",
        "exponents": [str(a) for a in beta.exponents],
    }
    return json.dumps(obj, indent=2) + "\n"


def load_beta_spec(path: str | Path, *, validate: bool = True) -> ReciprocityFunction:
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", str(p)) from exc
    return parse_beta_spec(data, validate=validate)
