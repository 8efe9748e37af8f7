"""JSON input formats for densities, bodies and Minkowski problems.

Validation errors carry a JSON-pointer path to the offending value.
"""
from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from . import density as _density
from .body import SymmetricPolytope, Zonotope, from_halfspaces, zonotope_realize
from .solver import MinkowskiProblem

_vector = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 4}
_matrix = {"type": "array", "items": _vector, "minItems": 2}

DENSITY_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["lebesgue", "abs_linear", "power_cone", "gaussian", "ball_indicator"]},
        "theta": _vector,
        "inv_p": {"type": "number", "exclusiveMinimum": 0},
        "half_space_normal": _vector,
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "name": {"type": "string"},
    },
    "required": ["kind"],
    "allOf": [
        {"if": {"properties": {"kind": {"const": "abs_linear"}}}, "then": {"required": ["theta"]}},
        {"if": {"properties": {"kind": {"const": "power_cone"}}}, "then": {"required": ["theta", "inv_p"]}},
    ],
}

BODY_SCHEMA = {
    "type": "object",
    "oneOf": [
        {
            "properties": {"normals": _matrix, "offsets": {"type": "array", "items": {"type": "number"}}},
            "required": ["normals", "offsets"],
        },
        {"properties": {"generators": {"type": "array", "items": _vector, "minItems": 1}}, "required": ["generators"]},
    ],
}

PROBLEM_SCHEMA = {
    "type": "object",
    "properties": {
        "density": DENSITY_SCHEMA,
        "normals": _matrix,
        "targets": {"type": "array", "items": {"type": "number"}},
    },
    "required": ["density", "normals", "targets"],
}


class InputError(ValueError):
    """An input file is unreadable or does not match its schema."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}" if pointer is not None else message)
        self.pointer = pointer


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def validate(data, schema: dict) -> None:
    """Raise :class:`InputError` with a JSON pointer for the most relevant violation."""
    error = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(schema).iter_errors(data))
    if error is not None:
        raise InputError(error.message, _pointer(error.absolute_path))


def load_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}", None) from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON ({exc.msg} at line {exc.lineno})", None) from exc


def density_from_json(data) -> _density.WeightedDensity:
    validate(data, DENSITY_SCHEMA)
    return _density.from_dict(data)


def body_from_json(data) -> SymmetricPolytope:
    validate(data, BODY_SCHEMA)
    if "generators" in data:
        return zonotope_realize(Zonotope(data["generators"]))
    return from_halfspaces(data["normals"], data["offsets"])


def problem_from_json(data) -> MinkowskiProblem:
    validate(data, PROBLEM_SCHEMA)
    return MinkowskiProblem(_density.from_dict(data["density"]), data["normals"], data["targets"])


def load_density(spec: str, n: int | None = None) -> _density.WeightedDensity:
    """A density file, or a shorthand (``LEB``, ``X1``, ``GAUSS``) resolved in dimension ``n``."""
    if not Path(spec).exists() and spec.upper() in ("LEB", "X1", "GAUSS"):
        if n is None:
            raise InputError(f"shorthand {spec} needs a dimension", None)
        return _density.named(spec, n)
    return density_from_json(load_json(spec))


def load_body(path) -> SymmetricPolytope:
    return body_from_json(load_json(path))


def load_problem(path) -> MinkowskiProblem:
    return problem_from_json(load_json(path))
