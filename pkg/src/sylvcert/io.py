"""Problem and report file formats.

Matrices are serialized as nested arrays of two-element [re, im] pairs (no
complex-literal dialects), UTF-8 JSON, with dictionary keys emitted in a
fixed order so reports diff cleanly.  Every pass/fail entry in a report names
the residual and the threshold that decided it.  Reports carry a
``generated_at`` timestamp which is the only field excluded from determinism
comparisons.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .errors import SchemaError
from .singular import Verdict, UVWitness

SCHEMA_VERSION = "1"
KNOWN_SCHEMA_VERSIONS = ("1",)
METHODS = ("direct", "quadrature")

DEFAULT_OPTIONS = {"alpha": math.pi / 4, "tol": 1e-8, "method": "direct"}


def matrix_to_pairs(m: np.ndarray) -> list:
    m = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def pairs_to_matrix(data, name: str) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise SchemaError(f"field {name!r} must be a non-empty array of rows")
    width = None
    rows = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or not row:
            raise SchemaError(f"{name}[{i}] must be a non-empty array")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SchemaError(f"{name} is not rectangular: row {i} has length "
                              f"{len(row)}, expected {width}")
        entries = []
        for j, entry in enumerate(row):
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(part, (int, float)) for part in entry)):
                raise SchemaError(f"{name}[{i}][{j}] must be a [re, im] pair of numbers")
            re, im = float(entry[0]), float(entry[1])
            if not (math.isfinite(re) and math.isfinite(im)):
                raise SchemaError(f"{name}[{i}][{j}] is not finite")
            entries.append(complex(re, im))
        rows.append(entries)
    return np.array(rows, dtype=np.complex128)


@dataclass
class ProblemSpec:
    """Parsed contents of a problem file."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    alpha: float
    tol: float
    method: str


def parse_problem_text(text: str, source: str = "<string>") -> ProblemSpec:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"{source}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise SchemaError(f"{source}: top level must be an object")
    version = raw.get("schema_version")
    if version not in KNOWN_SCHEMA_VERSIONS:
        raise SchemaError(f"{source}: unrecognized schema_version {version!r}")
    for key in ("a", "b", "c"):
        if key not in raw:
            raise SchemaError(f"{source}: missing required field {key!r}")
    a = pairs_to_matrix(raw["a"], "a")
    b = pairs_to_matrix(raw["b"], "b")
    c = pairs_to_matrix(raw["c"], "c")
    if a.shape[0] != a.shape[1]:
        raise SchemaError(f"{source}: a must be square, got {a.shape[0]}x{a.shape[1]}")
    if b.shape[0] != b.shape[1]:
        raise SchemaError(f"{source}: b must be square, got {b.shape[0]}x{b.shape[1]}")
    if c.shape != (a.shape[0], b.shape[0]):
        raise SchemaError(
            f"{source}: c must be {a.shape[0]}x{b.shape[0]}, got {c.shape[0]}x{c.shape[1]}")

    options = raw.get("options", {})
    if not isinstance(options, dict):
        raise SchemaError(f"{source}: options must be an object")
    alpha = options.get("alpha", DEFAULT_OPTIONS["alpha"])
    tol = options.get("tol", DEFAULT_OPTIONS["tol"])
    method = options.get("method", DEFAULT_OPTIONS["method"])
    if not isinstance(alpha, (int, float)) or not 0 < float(alpha) < math.pi / 2:
        raise SchemaError(f"{source}: options.alpha must lie in (0, pi/2)")
    if not isinstance(tol, (int, float)) or not 0 < float(tol) < 1:
        raise SchemaError(f"{source}: options.tol must lie in (0, 1)")
    if method not in METHODS:
        raise SchemaError(f"{source}: options.method must be one of {METHODS}")
    return ProblemSpec(a=a, b=b, c=c, alpha=float(alpha), tol=float(tol), method=str(method))


def load_problem(path) -> ProblemSpec:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_problem_text(handle.read(), source=str(path))


def problem_to_dict(a, b, c, alpha: float | None = None, tol: float | None = None,
                    method: str | None = None) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "a": matrix_to_pairs(a),
        "b": matrix_to_pairs(b),
        "c": matrix_to_pairs(c),
    }
    options = {}
    if alpha is not None:
        options["alpha"] = float(alpha)
    if tol is not None:
        options["tol"] = float(tol)
    if method is not None:
        options["method"] = str(method)
    if options:
        doc["options"] = options
    return doc


def serialize_report(doc: dict) -> str:
    """Fixed-order UTF-8 JSON with a trailing newline."""
    return json.dumps(doc, indent=2, ensure_ascii=True, allow_nan=False) + "\n"


def parse_report(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"malformed report JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def check_entry(status: str, residual: float | None = None,
                threshold: float | None = None) -> dict:
    entry = {"status": status}
    entry["residual"] = None if residual is None else float(residual)
    entry["threshold"] = None if threshold is None else float(threshold)
    return entry


def _witness_to_dict(w: UVWitness) -> dict:
    return {
        "u": matrix_to_pairs(w.u),
        "v": matrix_to_pairs(w.v),
        "companion": matrix_to_pairs(w.companion),
        "offset": matrix_to_pairs(w.offset),
        "q": matrix_to_pairs(w.q),
        "uv_norm": float(w.uv_norm),
        "residuals": {key: float(value) for key, value in sorted(w.residuals.items())},
    }


def environment_dict(verdict: Verdict, tol: float, seed: int | None) -> dict:
    from .numerics import RANK_CUTOFF_FACTOR

    return {
        "tolerances": {
            "tol": float(tol),
            "rank_cutoff_factor": RANK_CUTOFF_FACTOR,
            "intersection_tolerance": verdict.problem.gate.intersection_tolerance,
        },
        "shift_lambda": float(verdict.problem.lambda_shift),
        "alpha": float(verdict.problem.alpha),
        "seed": seed,
    }


def verdict_to_dict(verdict: Verdict, checks: dict, tol: float,
                    seed: int | None = None, timestamp: str | None = None) -> dict:
    gate = verdict.problem.gate
    doc = {
        "schema_version": SCHEMA_VERSION,
        "verdict": {
            "status": verdict.status.value,
            "certificate_residual": float(verdict.certificate_residual),
            "certificate_threshold": float(verdict.certificate_threshold),
            "system_residual": float(verdict.system_residual),
            "system_threshold": float(verdict.system_threshold),
            "oracle_agreement": verdict.oracle_agreement,
            "solution": None if verdict.solution is None else matrix_to_pairs(verdict.solution),
            "solution_norm": None if verdict.solution_norm is None else float(verdict.solution_norm),
        },
        "witness": None if verdict.witness is None else _witness_to_dict(verdict.witness),
        "gate": {
            "in_sector_a": gate.in_sector_a,
            "in_sector_b": gate.in_sector_b,
            "spectra_intersect": gate.spectra_intersect,
            "intersection_tolerance": gate.intersection_tolerance,
            "suggested_lambda": gate.suggested_lambda,
        },
        "environment": environment_dict(verdict, tol, seed),
        "checks": checks,
        "generated_at": timestamp if timestamp is not None
        else datetime.now(timezone.utc).isoformat(),
    }
    return doc
