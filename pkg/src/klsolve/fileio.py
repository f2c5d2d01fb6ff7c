"""JSON system files and solve reports.

A system file is an object with keys "variables", "monomials", "equations"
(each {"coefficients": [...], "rhs": ...}) and the optional keys
"degree_structure" ({"g": [[...]], "d": [...]}), "note" (free-form string),
and "certificate" (emitted by the transform command, ignored on input).
The general variant, accepted by the transform command, allows coefficients
of any sign but requires every rhs to be exactly 0.

Parsing is strict: unknown keys, non-finite numbers, and out-of-domain
values are rejected with the JSON path of the offending element.  Output is
canonical (two-space indent, insertion-ordered keys, shortest round-trip
floats, trailing newline), so identical data serializes to identical bytes.
"""

import json
import math

import numpy as np

from .errors import ParseError, ValidationError
from .model import PolynomialSystem
from .structure import DegreeStructure
from .transforms import GeneralPolynomialSystem

SYSTEM_KEYS = ("variables", "monomials", "equations", "degree_structure", "note", "certificate")


def load_json(path):
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    return parse_json(text)


def parse_json(text):
    def reject_constant(token):
        raise ParseError(f"non-finite number {token} is not allowed")

    try:
        return json.loads(text, parse_constant=reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None


def dumps_canonical(doc):
    return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def parse_system_document(doc):
    """Build (system, structure or None, note or None) from a parsed file."""
    variables, monomials = _parse_header(doc)
    coefficients = []
    rhs = []
    for i, equation in enumerate(_list_of(doc, "equations", min_len=1)):
        where = f"equations[{i}]"
        if not isinstance(equation, dict):
            raise ParseError(f"{where}: expected an object with 'coefficients' and 'rhs'")
        _reject_unknown(equation, ("coefficients", "rhs"), where)
        coefficients.append(
            _number_row(
                _get(equation, "coefficients", where),
                f"{where}.coefficients",
                len(monomials),
                minimum=0.0,
            )
        )
        value = _number(_get(equation, "rhs", where), f"{where}.rhs")
        if value <= 0.0:
            raise ParseError(f"{where}.rhs: must be strictly positive, got {value}")
        rhs.append(value)

    structure = None
    if "degree_structure" in doc:
        structure = _parse_structure(doc["degree_structure"], len(variables))
    note = _parse_note(doc)
    try:
        system = PolynomialSystem(variables, monomials, coefficients, rhs)
    except ValidationError as exc:
        raise ParseError("; ".join(exc.problems)) from None
    return system, structure, note


def parse_general_document(doc):
    """Build a signed-coefficients system (every rhs must be 0) from a file."""
    variables, monomials = _parse_header(doc, integer_exponents=True)
    coefficients = []
    for i, equation in enumerate(_list_of(doc, "equations", min_len=1)):
        where = f"equations[{i}]"
        if not isinstance(equation, dict):
            raise ParseError(f"{where}: expected an object with 'coefficients' and 'rhs'")
        _reject_unknown(equation, ("coefficients", "rhs"), where)
        coefficients.append(
            _number_row(
                _get(equation, "coefficients", where),
                f"{where}.coefficients",
                len(monomials),
            )
        )
        value = _number(_get(equation, "rhs", where), f"{where}.rhs")
        if value != 0.0:
            raise ParseError(
                f"{where}.rhs: must be 0 in a general system "
                "(fold constants into a constant monomial)"
            )
    _parse_note(doc)
    try:
        return GeneralPolynomialSystem(variables, monomials, coefficients)
    except ValidationError as exc:
        raise ParseError("; ".join(exc.problems)) from None


def system_document(system, structure=None, note=None, certificate=None):
    """Serializable document for a system, in canonical key order."""
    doc = {
        "variables": list(system.variable_names),
        "monomials": [[_clean(v) for v in row] for row in system.monomials],
        "equations": [
            {
                "coefficients": [_clean(v) for v in row],
                "rhs": _clean(system.rhs[i]),
            }
            for i, row in enumerate(system.coefficients)
        ],
    }
    if structure is not None:
        doc["degree_structure"] = {
            "g": [[_clean(v) for v in row] for row in structure.g],
            "d": [_clean(v) for v in structure.d],
        }
    if note is not None:
        doc["note"] = str(note)
    if certificate is not None:
        doc["certificate"] = {
            "degree": certificate.degree,
            "shifts": [_clean(v) for v in certificate.shifts],
            "homogenizing_variable": certificate.homogenizing_variable,
            "back_map": certificate.back_map,
            "condition_estimate": _finite_or_none(certificate.condition_estimate),
        }
    return doc


def report_document(result, system, include_trace=False):
    """Serializable report for a multi-start result on a system."""
    best = result.reports[0]
    residuals = system.evaluate_lhs(best.x_final) - system.rhs
    doc = {
        "status": best.status,
        "x": _point(system, best.x_final),
        "divergence": _finite_or_none(best.divergence_final),
        "gradient_residual": _finite_or_none(best.gradient_residual),
        "residuals": [_finite_or_none(r) for r in residuals],
        "iterations": {
            "outer": best.outer_iterations,
            "inner_total": best.total_inner_iterations,
        },
    }
    if include_trace:
        doc["trace"] = [_finite_or_none(v) for v in best.divergence_trace]
    doc["restart_summaries"] = [
        {
            "restart": rep.restart_index,
            "seed": rep.seed,
            "status": rep.status,
            "divergence": _finite_or_none(rep.divergence_final),
            "x": _point(system, rep.x_final),
        }
        for rep in result.reports
    ]
    doc["clusters"] = [
        {
            "x": _point(system, cluster.x),
            "divergence": _finite_or_none(cluster.divergence),
            "status": cluster.status,
            "members": cluster.members,
        }
        for cluster in result.clusters
    ]
    return doc


def _point(system, x):
    return {name: _finite_or_none(v) for name, v in zip(system.variable_names, x)}


def _finite_or_none(value):
    value = float(value)
    return value if math.isfinite(value) else None


def _clean(value):
    value = float(value)
    if value.is_integer() and abs(value) < 2**53:
        return int(value)
    return value


def _parse_header(doc, integer_exponents=False):
    if not isinstance(doc, dict):
        raise ParseError("top level: expected a JSON object")
    _reject_unknown(doc, SYSTEM_KEYS, "top level")
    variables = _list_of(doc, "variables", min_len=1)
    for i, name in enumerate(variables):
        if not isinstance(name, str) or not name:
            raise ParseError(f"variables[{i}]: expected a non-empty string")
    monomials = []
    for i, row in enumerate(_list_of(doc, "monomials", min_len=1)):
        parsed = _number_row(row, f"monomials[{i}]", len(variables), minimum=0.0)
        if integer_exponents and any(v != int(v) for v in parsed):
            raise ParseError(f"monomials[{i}]: exponents must be integers in a general system")
        monomials.append(parsed)
    return variables, monomials


def _parse_structure(block, n_variables):
    where = "degree_structure"
    if not isinstance(block, dict):
        raise ParseError(f"{where}: expected an object with 'g' and 'd'")
    _reject_unknown(block, ("g", "d"), where)
    g = [
        _number_row(row, f"{where}.g[{j}]", n_variables, minimum=0.0)
        for j, row in enumerate(_list_of(block, "g", min_len=1, where=where))
    ]
    d = []
    for j, value in enumerate(_list_of(block, "d", min_len=1, where=where)):
        v = _number(value, f"{where}.d[{j}]")
        if v <= 0.0:
            raise ParseError(f"{where}.d[{j}]: must be strictly positive, got {v}")
        d.append(v)
    if len(d) != len(g):
        raise ParseError(f"{where}: g has {len(g)} rows but d has {len(d)} entries")
    try:
        return DegreeStructure(np.array(g), np.array(d))
    except ValidationError as exc:
        raise ParseError(f"{where}: " + "; ".join(exc.problems)) from None


def _parse_note(doc):
    note = doc.get("note")
    if note is not None and not isinstance(note, str):
        raise ParseError("note: expected a string")
    return note


def _get(obj, key, where):
    if key not in obj:
        raise ParseError(f"{where}.{key}: missing required key")
    return obj[key]


def _list_of(obj, key, min_len=0, where=None):
    prefix = f"{where}." if where else ""
    if key not in obj:
        raise ParseError(f"{prefix}{key}: missing required key")
    value = obj[key]
    if not isinstance(value, list):
        raise ParseError(f"{prefix}{key}: expected an array")
    if len(value) < min_len:
        raise ParseError(f"{prefix}{key}: must not be empty")
    return value


def _reject_unknown(obj, allowed, where):
    for key in obj:
        if key not in allowed:
            raise ParseError(
                f"{where}: unknown key {key!r} (allowed: {', '.join(allowed)})"
            )


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a number")
    value = float(value)
    if not math.isfinite(value):
        raise ParseError(f"{where}: must be finite, got {value}")
    return value


def _number_row(row, where, length, minimum=None):
    if not isinstance(row, list):
        raise ParseError(f"{where}: expected an array of numbers")
    if len(row) != length:
        raise ParseError(f"{where}: expected {length} entries, got {len(row)}")
    values = []
    for j, item in enumerate(row):
        v = _number(item, f"{where}[{j}]")
        if minimum is not None and v < minimum:
            raise ParseError(f"{where}[{j}]: must be non-negative, got {v}")
        values.append(v)
    return values
