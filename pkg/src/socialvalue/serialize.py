"""JSON instance files and deterministic result encoding.

Rationals travel as strings ``"p/q"`` (or integer strings).  Every document
written here carries ``"version": "v1"``; on input the field is optional but
must be ``"v1"`` when present.  Output is canonical: two-space indent, keys
in insertion order, trailing newline.  Parsing then re-serializing any
canonical file yields the same bytes.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import fields, is_dataclass
from fractions import Fraction
from pathlib import Path

from .errors import ParseError
from .model import DecisionProblem, InformationStructure, Prior, as_rational, fmt

SCHEMA_VERSION = "v1"


def parse_rational(text, where: str = "value") -> Fraction:
    if not isinstance(text, (str, int)) or isinstance(text, bool):
        raise ParseError(f"{where}: expected a 'p/q' string, got {json.dumps(text)}")
    try:
        return as_rational(text)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from None


def _check_version(doc, kind):
    if not isinstance(doc, dict):
        raise ParseError(f"{kind}: expected a JSON object")
    version = doc.get("version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ParseError(f"{kind}: unsupported schema version {version!r}")


def _labels(doc, key, kind):
    labels = doc.get(key)
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise ParseError(f"{kind}: '{key}' must be a list of strings")
    return labels


def experiment_from_json(doc) -> InformationStructure:
    _check_version(doc, "experiment")
    signals = _labels(doc, "signals", "experiment")
    lik = doc.get("likelihood")
    if not isinstance(lik, dict) or set(lik) != {"L", "H"}:
        raise ParseError("experiment: 'likelihood' must have exactly the keys L and H")
    rows = {}
    for state in ("L", "H"):
        if not isinstance(lik[state], list):
            raise ParseError(f"experiment: likelihood row {state} must be a list")
        rows[state] = [parse_rational(v, f"experiment likelihood {state}") for v in lik[state]]
    return InformationStructure(signals, rows)


def experiment_to_json(pi: InformationStructure) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "signals": [str(s) for s in pi.signals],
        "likelihood": {state: [fmt(v) for v in pi.row(state)] for state in ("L", "H")},
    }


def problem_from_json(doc) -> DecisionProblem:
    _check_version(doc, "problem")
    actions = _labels(doc, "actions", "problem")
    payoff = doc.get("payoff")
    if not isinstance(payoff, dict):
        raise ParseError("problem: 'payoff' must be an object")
    table = {}
    for a in actions:
        row = payoff.get(a)
        if not isinstance(row, dict) or set(row) != {"L", "H"}:
            raise ParseError(f"problem: payoff of {a!r} must have exactly the keys L and H")
        table[a] = {state: parse_rational(row[state], f"payoff {a}.{state}") for state in ("L", "H")}
    extra = set(payoff) - set(actions)
    if extra:
        raise ParseError(f"problem: payoff for unknown actions {sorted(extra)}")
    return DecisionProblem(actions, table)


def problem_to_json(d: DecisionProblem) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "actions": [str(a) for a in d.actions],
        "payoff": {str(a): {"L": fmt(d.u(a, "L")), "H": fmt(d.u(a, "H"))} for a in d.actions},
    }


def prior_from_json(doc) -> Prior:
    _check_version(doc, "prior")
    if "mu0" not in doc:
        raise ParseError("prior: missing 'mu0'")
    return Prior(parse_rational(doc["mu0"], "prior mu0"))


def prior_to_json(prior: Prior) -> dict:
    return {"version": SCHEMA_VERSION, "mu0": fmt(prior.mu0)}


_READERS = {"experiment": experiment_from_json, "problem": problem_from_json, "prior": prior_from_json}


def load_json(path) -> object:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None


def load(path, kind: str):
    """Read an instance file of the given kind (experiment, problem or prior)."""
    return _READERS[kind](load_json(path))


def to_plain(obj):
    """Convert results to JSON-ready values; rationals become ``"p/q"``."""
    if isinstance(obj, Fraction):
        return fmt(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, InformationStructure):
        return experiment_to_json(obj)
    if isinstance(obj, DecisionProblem):
        return problem_to_json(obj)
    if isinstance(obj, Prior):
        return prior_to_json(obj)
    if hasattr(obj, "to_json"):
        return to_plain(obj.to_json())
    if isinstance(obj, dict):
        return {_key(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if is_dataclass(obj):
        return {f.name: to_plain(getattr(obj, f.name)) for f in fields(obj)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _key(k) -> str:
    if isinstance(k, Fraction):
        return fmt(k)
    if isinstance(k, tuple):
        return "/".join(map(_key, k))
    return str(k)


def dumps(obj) -> str:
    return json.dumps(to_plain(obj), indent=2, ensure_ascii=False) + "\n"


def dumps_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, Fraction) else v for v in row])
    return buf.getvalue()


def roundtrip(path, kind: str) -> str:
    """Parse an instance file and serialize it again."""
    return dumps(load(path, kind))


__all__ = [
    "SCHEMA_VERSION", "parse_rational", "experiment_from_json", "experiment_to_json",
    "problem_from_json", "problem_to_json", "prior_from_json", "prior_to_json", "load", "load_json",
    "to_plain", "dumps", "dumps_csv", "roundtrip",
]
