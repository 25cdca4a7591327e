"""Machine-readable analysis report and its JSON schema."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Any, Dict

import numpy as np

from .appearance import appearance_point, extremal_phases, is_barycentric, is_extreme_opposition
from .barycentric import region_geometry
from .classify import classify_genus, recheck
from .core import CircuitPolynomial, normalize, polynomial_to_dict
from .discriminant import discriminant_binomial, discriminant_relative_residual
from .equilibrium import equilibrium_data

SCHEMA_VERSION = 1

_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_COMPLEX = {"type": "object", "required": ["re", "im"], "additionalProperties": False,
            "properties": {"re": {"type": "number"}, "im": {"type": "number"}}}

REPORT_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "circuit amoeba analysis report",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "input", "theta_abs", "theta_hat_abs", "kappa_star", "eq_y",
                 "eq_j", "appearance_point", "barycentric", "extreme_opposition", "genus",
                 "discriminant", "region"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "input": {
            "type": "object",
            "required": ["n", "alphas", "y", "b", "c"],
            "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "alphas": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                "y": {"type": "array", "items": {"type": "integer"}},
                "b": {"type": "array", "items": _COMPLEX},
                "c": _COMPLEX,
            },
        },
        "theta_abs": {"type": "number", "exclusiveMinimum": 0},
        "theta_hat_abs": {"type": "number", "exclusiveMinimum": 0},
        "kappa_star": {"type": "number", "exclusiveMinimum": 0},
        "eq_y": _POINT,
        "eq_j": {"oneOf": [{"type": "null"}, {"type": "array", "items": _POINT}]},
        "appearance_point": _POINT,
        "barycentric": {"type": "boolean"},
        "extreme_opposition": {"type": "boolean"},
        "extreme_arg_c": {"type": "array", "items": {"type": "number"}},
        "genus": {
            "type": "object",
            "required": ["verdict", "genus", "method", "certificate", "recheck"],
            "additionalProperties": False,
            "properties": {
                "verdict": {"enum": ["Solid", "Genus1", "Indeterminate"]},
                "genus": {"enum": ["0", "1", "?"]},
                "method": {"enum": ["maximally-sparse", "rough-bound", "barycentric-exact",
                                    "sharp-bound", "lopsided", "numeric-fiber"]},
                "certificate": {"type": "object"},
                "witness_point": {"oneOf": [{"type": "null"}, _POINT]},
                "recheck": {"type": "boolean"},
            },
        },
        "discriminant": {
            "type": "object",
            "required": ["N", "lhs_exponents", "rhs_exponents", "b0_exponent", "rhs_constant",
                         "equation", "relative_residual", "on_discriminant"],
            "properties": {
                "N": {"type": "integer", "minimum": 1},
                "lhs_exponents": {"type": "array", "items": {"type": "integer"}},
                "rhs_exponents": {"type": "array", "items": {"type": "integer"}},
                "b0_exponent": {"type": "integer"},
                "rhs_constant": {"type": "string"},
                "rhs_constant_float": {"type": "number"},
                "equation": {"type": "string"},
                "relative_residual": {"oneOf": [{"type": "null"}, {"type": "number"}]},
                "on_discriminant": {"type": "boolean"},
            },
        },
        "region": {
            "oneOf": [
                {"type": "null"},
                {"type": "object",
                 "required": ["theta_abs", "beta", "cusp_args", "outer_radius", "inner_radius"],
                 "additionalProperties": False,
                 "properties": {
                     "theta_abs": {"type": "number"},
                     "beta": {"type": "number"},
                     "k_lower": {"type": "integer"},
                     "cusp_args": {"type": "array", "items": {"type": "number"}},
                     "outer_radius": {"type": "number"},
                     "inner_radius": {"type": "number"},
                 }},
            ]
        },
    },
}


def jsonable(obj):
    """Recursively convert numpy scalars/arrays, tuples, complex and Fractions to JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def analysis_report(f: CircuitPolynomial) -> Dict[str, Any]:
    f = normalize(f)
    eq = equilibrium_data(f)
    app = appearance_point(f)
    genus = classify_genus(f)
    db = discriminant_binomial(f.support)
    disc = db.to_json()
    if f.c != 0:
        res = discriminant_relative_residual(f)
        disc.update(relative_residual=res, on_discriminant=res < 1e-9)
    else:
        disc.update(relative_residual=None, on_discriminant=False)
    region = None
    if is_barycentric(f.support):
        g = region_geometry(f)
        region = {"theta_abs": g.theta_abs, "beta": g.beta, "k_lower": g.k_lower,
                  "cusp_args": list(g.cusp_args), "outer_radius": g.R, "inner_radius": g.r}
    report = {
        "schema_version": SCHEMA_VERSION,
        "input": polynomial_to_dict(f),
        "theta_abs": eq.theta_abs,
        "theta_hat_abs": app.theta_hat_abs,
        "kappa_star": app.kappa_star,
        "eq_y": eq.eq_y,
        "eq_j": eq.eq_j,
        "appearance_point": app.a_point,
        "barycentric": app.barycentric,
        "extreme_opposition": is_extreme_opposition(f) if f.c != 0 else False,
        "extreme_arg_c": list(extremal_phases(f).extreme_arg_c),
        "genus": {
            "verdict": genus.verdict,
            "genus": genus.genus_label,
            "method": genus.method,
            "certificate": genus.certificate,
            "witness_point": genus.witness_point,
            "recheck": recheck(f, genus),
        },
        "discriminant": disc,
        "region": region,
    }
    return jsonable(report)


def validate_report(report: Dict[str, Any]) -> None:
    """Raise jsonschema.ValidationError if the report does not match the schema."""
    import jsonschema
    jsonschema.validate(report, REPORT_SCHEMA)


def dumps_report(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False)


def format_report(report: Dict[str, Any]) -> str:
    """Plain-text summary for terminals."""
    g = report["genus"]
    lines = [
        f"genus={g['genus']} verdict={g['verdict']} method={g['method']}",
        f"|Theta|={report['theta_abs']:.6g}  |Theta_hat|={report['theta_hat_abs']:.6g}  "
        f"kappa*={report['kappa_star']:.6g}",
        "eq(y)=(" + ", ".join(f"{v:.6g}" for v in report["eq_y"]) + ")",
        "a(f)=(" + ", ".join(f"{v:.6g}" for v in report["appearance_point"]) + ")",
        f"barycentric={report['barycentric']} extreme_opposition={report['extreme_opposition']}",
        f"discriminant: {report['discriminant']['equation']} "
        f"(on discriminant: {report['discriminant']['on_discriminant']})",
    ]
    if report["region"] is not None:
        r = report["region"]
        lines.append(f"region: cusps at arg " + ", ".join(f"{a:.6g}" for a in r["cusp_args"])
                     + f"; radii {r['inner_radius']:.6g} .. {r['outer_radius']:.6g}")
    return "\n".join(lines)
