"""Scenario files: strict JSON schema, defaults, and round-trip serialization.

A config document is ``{"scenarios": [...]}``. Defaults:

=============  =========================================
field          default
=============  =========================================
t_end          1.0
h              1e-3
num_paths      10000
master_seed    0
x0             last basis vector (generator kinds only)
write_paths    10 (paths written to paths.csv)
tests          []
t_star         the scenario's t_end
num_perm       999
=============  =========================================

Generator-spec fields default to 0 (``a11``, ``c1``, ``radial_jump_rate``,
``gamma``, angular ``c_sph`` and ``jump_rate``); the radial jump law
defaults to a standard normal and the angle law to uniform on (0, pi).
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from .factory import GeneratorSpec, StableSpec
from .laws import JumpLaw
from .spherical import AngularSpec

KINDS = ("skew_product", "invariant", "stable")
TEST_TYPES = ("self_similarity", "isotropy", "multiplicative_invariance", "independence")


class ConfigError(ValueError):
    pass


_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}

_LAW = {
    "type": "object",
    "required": ["kind"],
    "properties": {"kind": {"enum": ["point", "uniform", "normal", "beta"]}},
    "allOf": [
        {"if": {"properties": {"kind": {"const": "point"}}},
         "then": {"required": ["atoms"], "additionalProperties": False,
                  "properties": {"kind": {}, "atoms": {"type": "array", "items": _num, "minItems": 1},
                                 "weights": {"type": "array", "items": _nonneg}}}},
        {"if": {"properties": {"kind": {"const": "uniform"}}},
         "then": {"required": ["low", "high"], "additionalProperties": False,
                  "properties": {"kind": {}, "low": _num, "high": _num}}},
        {"if": {"properties": {"kind": {"const": "normal"}}},
         "then": {"required": ["std"], "additionalProperties": False,
                  "properties": {"kind": {}, "mean": _num, "std": _pos}}},
        {"if": {"properties": {"kind": {"const": "beta"}}},
         "then": {"required": ["a", "b"], "additionalProperties": False,
                  "properties": {"kind": {}, "a": _pos, "b": _pos, "scale": _pos}}},
    ],
}

_GENERATOR = {
    "type": "object",
    "required": ["dim", "alpha"],
    "additionalProperties": False,
    "properties": {
        "dim": {"type": "integer", "minimum": 2},
        "alpha": _pos,
        "a11": _nonneg,
        "c1": _num,
        "angular": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"c_sph": _nonneg, "jump_rate": _nonneg, "jump_angle_law": _LAW},
        },
        "radial_jump_rate": _nonneg,
        "radial_jump_law": _LAW,
        "gamma": _nonneg,
    },
}

_STABLE = {
    "type": "object",
    "required": ["dim", "beta", "eps_trunc", "x0"],
    "additionalProperties": False,
    "properties": {
        "dim": {"type": "integer", "minimum": 2},
        "beta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 2},
        "eps_trunc": _pos,
        "x0": {"type": "array", "items": _num, "minItems": 2},
    },
}

_TEST = {
    "type": "object",
    "required": ["type"],
    "properties": {"type": {"enum": list(TEST_TYPES)}},
    "allOf": [
        {"if": {"properties": {"type": {"enum": ["self_similarity", "multiplicative_invariance"]}}},
         "then": {"required": ["lambda"], "additionalProperties": False,
                  "properties": {"type": {}, "lambda": _pos, "t_star": _pos}}},
        {"if": {"properties": {"type": {"const": "isotropy"}}},
         "then": {"required": ["rotation"], "additionalProperties": False,
                  "properties": {"type": {}, "t_star": _pos,
                                 "rotation": {"type": "array", "minItems": 1, "items": {
                                     "type": "array", "prefixItems": [{"type": "integer", "minimum": 0},
                                                                      {"type": "integer", "minimum": 0}, _num],
                                     "minItems": 3, "maxItems": 3}}}}},
        {"if": {"properties": {"type": {"const": "independence"}}},
         "then": {"additionalProperties": False,
                  "properties": {"type": {}, "t_star": _pos, "num_perm": {"type": "integer", "minimum": 200}}}},
    ],
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["scenarios"],
    "additionalProperties": False,
    "properties": {
        "scenarios": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "kind", "spec"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
                    "kind": {"enum": list(KINDS)},
                    "spec": {"type": "object"},
                    "t_end": _pos,
                    "h": _pos,
                    "num_paths": {"type": "integer", "minimum": 1},
                    "master_seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
                    "x0": {"type": "array", "items": _num, "minItems": 2},
                    "write_paths": {"type": "integer", "minimum": 0},
                    "tests": {"type": "array", "items": _TEST},
                },
                "allOf": [
                    {"if": {"properties": {"kind": {"const": "stable"}}},
                     "then": {"properties": {"spec": _STABLE}, "not": {"required": ["x0"]}},
                     "else": {"properties": {"spec": _GENERATOR}}},
                ],
            },
        }
    },
}


@dataclass(frozen=True)
class TestSpec:
    type: str
    t_star: float
    lam: float | None = None
    rotation: tuple = ()
    num_perm: int = 999

    __test__ = False

    def rotation_matrix(self, d: int) -> np.ndarray:
        return givens(d, self.rotation)

    def to_dict(self) -> dict:
        out = {"type": self.type, "t_star": self.t_star}
        if self.type in ("self_similarity", "multiplicative_invariance"):
            out["lambda"] = self.lam
        elif self.type == "isotropy":
            out["rotation"] = [list(g) for g in self.rotation]
        else:
            out["num_perm"] = self.num_perm
        return out


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str
    spec: GeneratorSpec | StableSpec
    t_end: float = 1.0
    h: float = 1e-3
    num_paths: int = 10_000
    master_seed: int = 0
    x0: tuple = ()
    write_paths: int = 10
    tests: tuple = field(default_factory=tuple)

    @property
    def alpha(self) -> float:
        return self.spec.alpha

    @property
    def dim(self) -> int:
        return self.spec.dim


def givens(d: int, rotations) -> np.ndarray:
    """Product of plane rotations; each entry (i, j, angle) rotates axes i -> j."""
    out = np.eye(d)
    for i, j, angle in rotations:
        i, j = int(i), int(j)
        if i == j or not (0 <= i < d and 0 <= j < d):
            raise ValueError(f"bad Givens axes ({i}, {j}) for dimension {d}")
        g = np.eye(d)
        c, s = np.cos(angle), np.sin(angle)
        g[i, i] = g[j, j] = c
        g[j, i], g[i, j] = s, -s
        out = g @ out
    return out


# ------------------------------------------------------------- parsing

def _law(d: dict | None, default: JumpLaw) -> JumpLaw:
    return default if d is None else JumpLaw.from_dict(d)


def generator_spec_from_dict(d: dict) -> GeneratorSpec:
    ang = d.get("angular", {})
    angular = AngularSpec(
        dim=d["dim"], c_sph=float(ang.get("c_sph", 0.0)), jump_rate=float(ang.get("jump_rate", 0.0)),
        jump_angle_law=_law(ang.get("jump_angle_law"), JumpLaw("uniform", {"low": 0.0, "high": np.pi})),
    )
    return GeneratorSpec(
        dim=d["dim"], alpha=float(d["alpha"]), a11=float(d.get("a11", 0.0)), c1=float(d.get("c1", 0.0)),
        angular=angular, radial_jump_rate=float(d.get("radial_jump_rate", 0.0)),
        radial_jump_law=_law(d.get("radial_jump_law"), JumpLaw("normal", {"mean": 0.0, "std": 1.0})),
        gamma=float(d.get("gamma", 0.0)),
    )


def generator_spec_to_dict(s: GeneratorSpec) -> dict:
    return {
        "dim": s.dim, "alpha": s.alpha, "a11": s.a11, "c1": s.c1,
        "angular": {"c_sph": s.angular.c_sph, "jump_rate": s.angular.jump_rate,
                    "jump_angle_law": s.angular.jump_angle_law.to_dict()},
        "radial_jump_rate": s.radial_jump_rate, "radial_jump_law": s.radial_jump_law.to_dict(),
        "gamma": s.gamma,
    }


def stable_spec_from_dict(d: dict) -> StableSpec:
    return StableSpec(dim=d["dim"], beta=float(d["beta"]), eps_trunc=float(d["eps_trunc"]), x0=tuple(d["x0"]))


def stable_spec_to_dict(s: StableSpec) -> dict:
    return {"dim": s.dim, "beta": s.beta, "eps_trunc": s.eps_trunc, "x0": list(s.x0)}


def _test_from_dict(d: dict, t_end: float) -> TestSpec:
    return TestSpec(
        type=d["type"], t_star=float(d.get("t_star", t_end)), lam=d.get("lambda"),
        rotation=tuple(tuple(g) for g in d.get("rotation", ())), num_perm=int(d.get("num_perm", 999)),
    )


def _scenario_from_dict(d: dict) -> Scenario:
    kind = d["kind"]
    spec = stable_spec_from_dict(d["spec"]) if kind == "stable" else generator_spec_from_dict(d["spec"])
    t_end = float(d.get("t_end", 1.0))
    if kind == "stable":
        x0 = spec.x0
    else:
        x0 = tuple(float(v) for v in d.get("x0", [0.0] * (spec.dim - 1) + [1.0]))
        if len(x0) != spec.dim or not np.linalg.norm(x0) > 0:
            raise ValueError("x0 must be a nonzero vector of length spec.dim")
    tests = tuple(_test_from_dict(t, t_end) for t in d.get("tests", []))
    for t in tests:
        if t.type == "isotropy":
            givens(spec.dim, t.rotation)
    return Scenario(
        name=d["name"], kind=kind, spec=spec, t_end=t_end, h=float(d.get("h", 1e-3)),
        num_paths=int(d.get("num_paths", 10_000)), master_seed=int(d.get("master_seed", 0)), x0=x0,
        write_paths=int(d.get("write_paths", 10)), tests=tests,
    )


def parse_config(text: str) -> list[Scenario]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"$: invalid JSON ({e})") from e
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise ConfigError(f"{err.json_path}: {err.message}")
    scenarios = []
    for i, d in enumerate(doc["scenarios"]):
        try:
            scenarios.append(_scenario_from_dict(d))
        except (ValueError, KeyError) as e:
            raise ConfigError(f"$.scenarios[{i}]: {e}") from e
    names = [s.name for s in scenarios]
    if len(set(names)) != len(names):
        raise ConfigError("$.scenarios: scenario names must be unique")
    return scenarios


def scenario_to_dict(s: Scenario) -> dict:
    out = {
        "name": s.name, "kind": s.kind,
        "spec": stable_spec_to_dict(s.spec) if s.kind == "stable" else generator_spec_to_dict(s.spec),
        "t_end": s.t_end, "h": s.h, "num_paths": s.num_paths, "master_seed": s.master_seed,
        "write_paths": s.write_paths, "tests": [t.to_dict() for t in s.tests],
    }
    if s.kind != "stable":
        out["x0"] = list(s.x0)
    return out


def serialize(scenarios) -> str:
    return json.dumps({"scenarios": [scenario_to_dict(s) for s in scenarios]}, indent=2, sort_keys=True)


def normalize(doc: dict) -> dict:
    """The document with every default filled in (what ``serialize(parse(doc))`` yields)."""
    doc = copy.deepcopy(doc)
    return json.loads(serialize(parse_config(json.dumps(doc))))
