"""JSON problem files: schema, loading, and conversion to engine objects.

A problem file describes a finite space, a coefficient field, DG ring
sheaves (each over an optional base ring named in the same file), morphisms,
closed subspaces, DG modules, homotopy witnesses, and one command.
Polynomials are strings in the grammar: identifiers, integer and rational
literals, ``+ - * ^`` and parentheses.  A value that varies from point to
point is an object ``{point: expression}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import jsonschema

from .coeffs import CoeffField
from .derived import ClosedSubspaceDatum
from .dgmodule import DGModuleSheaf
from .dgring import DGRingSheaf, RingedSpace, SheafHom, tensor_over_A
from .parsing import ParseError
from .pseudofree import Generator, GeneratorSpec
from .resolution import HomotopyWitness
from .space import FiniteSpace, SpaceError, validate

_expr = {"oneOf": [{"type": "string"}, {"type": "integer"},
                   {"type": "object", "additionalProperties": {"type": ["string", "integer"]}}]}
_support = {"oneOf": [{"const": "all"}, {"type": "array", "items": {"type": "string"}}]}
_relation = {"oneOf": [{"type": "string"}, {"type": "integer"},
                       {"type": "object", "required": ["value"],
                        "properties": {"value": _expr, "support": _support}, "additionalProperties": False}]}
_generator = {"type": "object", "required": ["id", "degree"],
              "properties": {"id": {"type": "string"}, "degree": {"type": "integer", "maximum": 0},
                             "support": _support},
              "additionalProperties": False}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "dgsheaf problem file",
    "type": "object",
    "required": ["space", "command"],
    "properties": {
        "field": {"type": "string"},
        "space": {
            "type": "object", "required": ["points"],
            "properties": {
                "points": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "order": {"type": "array", "items": {"type": "array", "items": {"type": "string"},
                                                     "minItems": 2, "maxItems": 2}},
                "closed": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "rings": {"type": "array", "items": {
            "type": "object", "required": ["name"],
            "properties": {
                "name": {"type": "string"},
                "base": {"type": ["string", "null"]},
                "generators": {"type": "array", "items": _generator},
                "differential": {"type": "object", "additionalProperties": _expr},
                "relations": {"type": "array", "items": _relation},
                "tensor": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
            },
            "additionalProperties": False,
        }},
        "morphisms": {"type": "array", "items": {
            "type": "object", "required": ["name", "source", "target"],
            "properties": {"name": {"type": "string"}, "source": {"type": "string"},
                           "target": {"type": "string"},
                           "images": {"type": "object", "additionalProperties": _expr}},
            "additionalProperties": False,
        }},
        "subspaces": {"type": "array", "items": {
            "type": "object", "required": ["name", "ideal"],
            "properties": {"name": {"type": "string"}, "ideal": {"type": "array", "items": _relation}},
            "additionalProperties": False,
        }},
        "modules": {"type": "array", "items": {
            "type": "object", "required": ["name", "ring", "basis"],
            "properties": {"name": {"type": "string"}, "ring": {"type": "string"},
                           "basis": {"type": "array", "items": _generator},
                           "differential": {"type": "object", "additionalProperties": {
                               "type": "object", "additionalProperties": _expr}}},
            "additionalProperties": False,
        }},
        "witnesses": {"type": "array", "items": {
            "type": "object", "required": ["name", "Bplus", "eta", "eps", "phi"],
            "properties": {k: {"type": "string"} for k in ("name", "Bplus", "eta", "eps", "phi")},
            "additionalProperties": False,
        }},
        "command": {
            "type": "object", "required": ["name"],
            "properties": {
                "name": {"type": "string"},
                "qmax": {"type": "integer", "minimum": 0},
                "window": {"type": "string"},
                "seed": {"type": "integer"},
                "target": {"type": "string"},
                "left": {"type": "string"},
                "right": {"type": "string"},
                "one_sided": {"type": "boolean"},
                "structure": {"type": "string"},
                "subspaces": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
                "morphism": {"type": "string"},
                "morphisms": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
                "witness": {"type": "string"},
                "psi": {"type": "string"},
                "module": {"type": "string"},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


@dataclass
class Problem:
    raw: dict
    field: CoeffField
    space: FiniteSpace
    rings: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    subspaces: dict = field(default_factory=dict)
    modules: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    @property
    def command(self) -> dict:
        return self.raw["command"]

    def ring(self, name) -> DGRingSheaf:
        if name not in self.rings:
            raise ParseError(f"unknown ring {name!r}")
        return self.rings[name]

    def morphism(self, name) -> SheafHom:
        if name not in self.morphisms:
            raise ParseError(f"unknown morphism {name!r}")
        return self.morphisms[name]

    def subspace(self, name) -> ClosedSubspaceDatum:
        if name not in self.subspaces:
            raise ParseError(f"unknown subspace {name!r}")
        return self.subspaces[name]

    def ringed_space(self, name) -> RingedSpace:
        return RingedSpace(self.space, self.ring(name))

    def default_ring(self) -> DGRingSheaf:
        if not self.rings:
            raise ParseError("the problem defines no rings")
        return list(self.rings.values())[-1]


def _where(path) -> str:
    return "/".join(str(p) for p in path) or "<root>"


def check_schema(data) -> None:
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ParseError(f"schema error at {_where(exc.absolute_path)}: {exc.message}") from None


def parse_space(data: dict) -> FiniteSpace:
    points = data["points"]
    order = [tuple(p) for p in data.get("order", [])]
    if data.get("closed", False):
        diags = validate(points, order)
        if diags:
            raise SpaceError("; ".join(d.message for d in diags))
        return FiniteSpace(points, order, close=False)
    return FiniteSpace(points, order)


def _support(space, value, where):
    if value is None or value == "all":
        return space.whole()
    try:
        return space.open_set(value)
    except SpaceError as exc:
        raise SpaceError(f"{where}: {exc}") from None


def _expression(value, where):
    """Integers become strings; per-point objects keep their shape."""
    if isinstance(value, dict):
        return {k: str(v) for k, v in value.items()}
    return str(value)


def _wrap(fn, where):
    try:
        return fn()
    except ParseError as exc:
        raise ParseError(f"{where}: {exc}") from None


def _relations(space, items, where):
    out = []
    for i, rel in enumerate(items):
        if isinstance(rel, dict):
            U = _support(space, rel.get("support"), f"{where}/{i}")
            out.append((_expression(rel["value"], where), U))
        else:
            out.append(str(rel))
    return out


def _build_ring(problem: Problem, spec: dict, where: str) -> DGRingSheaf:
    space = problem.space
    name = spec["name"]
    if "tensor" in spec:
        left, right = (problem.ring(n) for n in spec["tensor"])
        return tensor_over_A(left, right, name=name)
    base = problem.ring(spec["base"]) if spec.get("base") else None
    entries = [Generator(g["id"], _support(space, g.get("support"), f"{where}/generators/{i}"), g["degree"])
               for i, g in enumerate(spec.get("generators", []))]
    diff = {k: _expression(v, where) for k, v in spec.get("differential", {}).items()}
    rels = _relations(space, spec.get("relations", []), f"{where}/relations")
    return _wrap(lambda: DGRingSheaf(space, GeneratorSpec(entries), diff, rels, base=base,
                                     field=problem.field, name=name), where)


def load_problem(data) -> Problem:
    """Validate a decoded JSON object and build every declared object."""
    check_schema(data)
    try:
        fld = CoeffField.parse(data.get("field", "QQ"))
    except (ValueError, ParseError) as exc:
        raise ParseError(f"field: {exc}") from None
    space = parse_space(data["space"])
    problem = Problem(data, fld, space)
    for i, spec in enumerate(data.get("rings", [])):
        if spec["name"] in problem.rings:
            raise ParseError(f"rings/{i}: duplicate ring name {spec['name']!r}")
        problem.rings[spec["name"]] = _build_ring(problem, spec, f"rings/{i}")
    for i, spec in enumerate(data.get("morphisms", [])):
        src, tgt = problem.ring(spec["source"]), problem.ring(spec["target"])
        images = {k: _expression(v, "") for k, v in spec.get("images", {}).items()}
        problem.morphisms[spec["name"]] = _wrap(
            lambda: SheafHom(src, tgt, images, check=False, name=spec["name"]), f"morphisms/{i}")
    for i, spec in enumerate(data.get("subspaces", [])):
        problem.subspaces[spec["name"]] = ClosedSubspaceDatum(
            _relations(space, spec["ideal"], f"subspaces/{i}/ideal"), spec["name"])
    for i, spec in enumerate(data.get("modules", [])):
        ring = problem.ring(spec["ring"])
        basis = [Generator(g["id"], _support(space, g.get("support"), f"modules/{i}/basis/{j}"), g["degree"])
                 for j, g in enumerate(spec["basis"])]
        diff = {e: {f: _expression(v, "") for f, v in row.items()}
                for e, row in spec.get("differential", {}).items()}
        problem.modules[spec["name"]] = _wrap(lambda: DGModuleSheaf(ring, basis, diff, name=spec["name"]),
                                              f"modules/{i}")
    for spec in data.get("witnesses", []):
        problem.witnesses[spec["name"]] = HomotopyWitness(
            problem.ring(spec["Bplus"]), problem.morphism(spec["eta"]),
            problem.morphism(spec["eps"]), problem.morphism(spec["phi"]))
    return problem


def load_file(path) -> Problem:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    return load_problem(data)
