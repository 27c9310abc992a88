"""Experiment configuration: JSON schema, validation and object construction.

A minimal configuration::

    {
      "space": {"kind": "euclidean", "dimension": 2},
      "map": {"kind": "rotation", "angle": 1.5707963267948966},
      "u": [1, 0],
      "x0": [0, 1],
      "schedule": "harmonic",
      "N": 1000
    }

Everything else has a default, see :data:`DEFAULTS`. Unknown keys are
rejected at every level.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from typing import Optional

import jsonschema

from . import geometry as geo
from . import maps as mp
from .errors import AltIterError, ParameterError
from .iterate import Constant, Explicit, Harmonic, IterationConfig, Power, parse_schedule
from .rates import DEFAULT_EPSILONS, EpsilonGrid


class ConfigError(AltIterError, ValueError):
    """A configuration document is malformed or invalid."""


CHECK_NAMES = ("coupling", "domination", "rate_transfer", "nonexpansive", "convergence")

DEFAULTS = {
    "checks": {"coupling": True, "domination": True, "rate_transfer": True,
               "nonexpansive": True, "convergence": None},
    "seed": 0,
    "tolerances": {"euclidean": 1e-12, "hyperbolic": 1e-10, "nonexpansive": 1e-9},
    "epsilon_grid": list(DEFAULT_EPSILONS),
    "domination_pairs": 1000,
    "nonexpansive_samples": 10_000,
    "output": {"dir": "results", "json": "result.json", "csv": "series.csv"},
    "unsafe_skip_validation": False,
}

_NUM = {"type": "number"}
_VEC = {"type": "array", "items": _NUM, "minItems": 1}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


def _kind_case(kind, props, required=()):
    props = dict(props, kind={"const": kind})
    return {"if": {"properties": {"kind": {"const": kind}}, "required": ["kind"]},
            "then": _obj(props, ("kind",) + tuple(required))}


DOMAIN_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {"kind": {"enum": ["whole", "ball", "box"]}},
    "allOf": [
        _kind_case("whole", {}),
        _kind_case("ball", {"center": _VEC, "radius": _NUM}, ("center", "radius")),
        _kind_case("box", {"lower": _VEC, "upper": _VEC}, ("lower", "upper")),
    ],
}

MAP_KINDS = {
    "affine": ({"matrix": {"type": "array", "items": _VEC, "minItems": 1}, "offset": _VEC}, ("matrix", "offset")),
    "scaling": ({"factor": _NUM, "center": _VEC}, ("factor", "center")),
    "rotation": ({"angle": _NUM, "center": _VEC}, ("angle",)),
    "projection": ({"target": {"$ref": "#/$defs/domain"}}, ("target",)),
    "hyperbolic_rotation": ({"center": _VEC, "angle": _NUM}, ("center", "angle")),
    "compose": ({"maps": {"type": "array", "items": {"$ref": "#/$defs/map"}, "minItems": 1}}, ("maps",)),
    "average": ({"weight": _NUM, "first": {"$ref": "#/$defs/map"}, "second": {"$ref": "#/$defs/map"}},
                ("weight", "first", "second")),
}

MAP_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {"kind": {"enum": sorted(MAP_KINDS)}},
    "allOf": [_kind_case(k, props, req) for k, (props, req) in MAP_KINDS.items()],
}

SCHEDULE_SCHEMA = {
    "oneOf": [
        {"type": "string"},
        {
            "type": "object",
            "required": ["kind"],
            "properties": {"kind": {"enum": ["harmonic", "power", "constant", "explicit"]}},
            "allOf": [
                _kind_case("harmonic", {}),
                _kind_case("power", {"a": _NUM}, ("a",)),
                _kind_case("constant", {"c": _NUM}, ("c",)),
                _kind_case("explicit", {"values": {"type": "array", "items": _NUM}}, ("values",)),
            ],
        },
    ]
}

CONFIG_SCHEMA = {
    "$defs": {"domain": DOMAIN_SCHEMA, "map": MAP_SCHEMA},
    **_obj(
        {
            "name": {"type": "string"},
            "space": {
                "type": "object",
                "required": ["kind"],
                "properties": {"kind": {"enum": ["euclidean", "hyperbolic_disk"]}},
                "allOf": [
                    _kind_case("euclidean", {"dimension": {"type": "integer", "minimum": 1},
                                             "domain": {"$ref": "#/$defs/domain"}}, ("dimension",)),
                    _kind_case("hyperbolic_disk", {}),
                ],
            },
            "map": {"$ref": "#/$defs/map"},
            "u": _VEC,
            "x0": _VEC,
            "schedule": SCHEDULE_SCHEMA,
            "N": {"type": "integer"},
            "horizon": {"type": "integer"},
            "checks": _obj({
                "coupling": {"type": "boolean"},
                "domination": {"type": "boolean"},
                "rate_transfer": {"type": "boolean"},
                "nonexpansive": {"type": "boolean"},
                "convergence": {"oneOf": [{"type": "null"}, {"type": "boolean", "const": False},
                                          _obj({"delta": _NUM}, ("delta",))]},
            }),
            "seed": {"type": "integer"},
            "tolerances": _obj({"euclidean": _NUM, "hyperbolic": _NUM, "nonexpansive": _NUM}),
            "epsilon_grid": {"type": "array", "items": _NUM, "minItems": 1},
            "domination_pairs": {"type": "integer", "minimum": 0},
            "nonexpansive_samples": {"type": "integer", "minimum": 1},
            "output": _obj({"dir": {"type": "string"}, "json": {"type": "string"}, "csv": {"type": "string"}}),
            "unsafe_skip_validation": {"type": "boolean"},
        },
        ("space", "map", "u", "x0", "schedule"),
    ),
}


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """A validated experiment.

    ``document`` is the normalized JSON document (defaults filled in, ``N``
    spelled ``horizon``) and is echoed verbatim into results.
    """

    iteration: IterationConfig
    checks: dict
    delta: Optional[float]
    seed: int
    tolerances: dict
    epsilon_grid: EpsilonGrid
    domination_pairs: int
    nonexpansive_samples: int
    output: dict
    unsafe: bool
    document: dict

    @property
    def tolerance(self):
        space = self.iteration.space
        return self.tolerances["hyperbolic" if space.is_hyperbolic else "euclidean"]

    def enabled_checks(self):
        return [name for name in CHECK_NAMES if self.checks.get(name)]


def _merge_defaults(doc):
    out = copy.deepcopy(doc)
    for key, value in DEFAULTS.items():
        if isinstance(value, dict):
            merged = copy.deepcopy(value)
            merged.update(out.get(key, {}))
            out[key] = merged
        else:
            out.setdefault(key, copy.deepcopy(value))
    return out


def _schema_error(doc):
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    err = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if err is None:
        return None
    where = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
    return f"{where}: {err.message}"


def build_domain(d):
    kind = d["kind"]
    if kind == "whole":
        return geo.WholeSpace()
    if kind == "ball":
        return geo.Ball(tuple(d["center"]), d["radius"])
    return geo.Box(tuple(d["lower"]), tuple(d["upper"]))


def build_space(d):
    if d["kind"] == "hyperbolic_disk":
        return geo.hyperbolic_disk()
    dom = d.get("domain")
    return geo.euclidean(d["dimension"], build_domain(dom) if dom else None)


def build_map(d, unsafe=False):
    """Construct a :class:`~altiter.maps.Mapping` from its JSON description."""
    kind = d["kind"]
    if kind == "affine":
        return mp.EuclideanAffine(tuple(map(tuple, d["matrix"])), tuple(d["offset"]), validate=not unsafe)
    if kind == "scaling":
        return mp.EuclideanScaling(d["factor"], tuple(d["center"]))
    if kind == "rotation":
        return mp.EuclideanRotation(d["angle"], tuple(d.get("center", (0.0, 0.0))))
    if kind == "projection":
        return mp.ProjectionOntoDomain(build_domain(d["target"]))
    if kind == "hyperbolic_rotation":
        return mp.HyperbolicRotation(tuple(d["center"]), d["angle"])
    if kind == "compose":
        return mp.Compose(tuple(build_map(m, unsafe) for m in d["maps"]))
    if kind == "average":
        return mp.Average(d["weight"], build_map(d["first"], unsafe), build_map(d["second"], unsafe))
    raise ParameterError(f"unknown map kind {kind!r}")


def build_schedule(s):
    if isinstance(s, str):
        return parse_schedule(s)
    kind = s["kind"]
    if kind == "harmonic":
        return Harmonic()
    if kind == "power":
        return Power(s["a"])
    if kind == "constant":
        return Constant(s["c"])
    return Explicit(tuple(s["values"]))


def _field(name, fn, *args):
    try:
        return fn(*args)
    except ParameterError as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def apply_overrides(doc, seed=None, tol_euclid=None, tol_hyp=None, horizon=None, epsilon_grid=None,
                    schedule=None, unsafe=None):
    """Return a copy of a raw config document with command-line overrides applied."""
    doc = copy.deepcopy(doc)
    if seed is not None:
        doc["seed"] = seed
    if tol_euclid is not None:
        doc.setdefault("tolerances", {})["euclidean"] = tol_euclid
    if tol_hyp is not None:
        doc.setdefault("tolerances", {})["hyperbolic"] = tol_hyp
    if horizon is not None:
        doc.pop("N", None)
        doc["horizon"] = horizon
    if epsilon_grid is not None:
        doc["epsilon_grid"] = list(epsilon_grid)
    if schedule is not None:
        doc["schedule"] = schedule
    if unsafe:
        doc["unsafe_skip_validation"] = True
    return doc


def load_document(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    return doc


def parse_config(text, **overrides):
    """Parse and validate a JSON configuration.

    Parameters
    ----------
    text : str or dict
        The JSON document, or an already decoded object.
    **overrides
        Passed to :func:`apply_overrides`.

    Returns
    -------
    ExperimentConfig

    Raises
    ------
    ConfigError
        On malformed JSON, schema violations (unknown keys, wrong types) or
        invalid values; the message names the offending field.
    """
    doc = load_document(text) if isinstance(text, str) else copy.deepcopy(text)
    if overrides:
        doc = apply_overrides(doc, **overrides)
    msg = _schema_error(doc)
    if msg:
        raise ConfigError(msg)
    if "N" in doc and "horizon" in doc:
        raise ConfigError("$: give either N or horizon, not both")
    if "N" not in doc and "horizon" not in doc:
        raise ConfigError("$: 'N' is a required property")
    doc["horizon"] = doc.pop("N", doc.get("horizon"))
    doc = _merge_defaults(doc)

    unsafe = doc["unsafe_skip_validation"]
    space = _field("$.space", build_space, doc["space"])
    mapping = _field("$.map", build_map, doc["map"], unsafe)
    schedule = _field("$.schedule", build_schedule, doc["schedule"])
    _field("$.map", mp.ensure_compatible, mapping, space)
    if doc["horizon"] < 2:
        raise ConfigError(f"$.N: horizon must be at least 2, got {doc['horizon']}")
    if doc["horizon"] < 3 and doc["checks"].get("rate_transfer"):
        raise ConfigError("$.N: the rate_transfer check needs a horizon of at least 3")
    for key in ("u", "x0"):
        v = geo.validate_point(space, doc[key]) if len(doc[key]) == space.dimension else \
            geo.Violation("shape", f"expected {space.dimension} coordinates")
        if v is not None:
            raise ConfigError(f"$.{key}: {v}")
    iteration = _field("$", IterationConfig, space, mapping, doc["u"], doc["x0"], schedule, doc["horizon"])

    checks = doc["checks"]
    conv = checks.get("convergence")
    delta = None
    if conv:
        delta = float(conv["delta"])
        if not delta > 0:
            raise ConfigError(f"$.checks.convergence.delta: must be positive, got {delta}")
        if mp.fixed_point_oracle(mapping) is None:
            raise ConfigError("$.checks.convergence: the map has no known fixed point to converge to")
    tolerances = doc["tolerances"]
    for k, v in tolerances.items():
        if not v >= 0:
            raise ConfigError(f"$.tolerances.{k}: must be nonnegative, got {v}")
    grid = _field("$.epsilon_grid", EpsilonGrid, tuple(doc["epsilon_grid"]))
    flags = {name: bool(checks.get(name)) for name in CHECK_NAMES}
    return ExperimentConfig(
        iteration=iteration,
        checks=flags,
        delta=delta,
        seed=doc["seed"],
        tolerances=dict(tolerances),
        epsilon_grid=grid,
        domination_pairs=doc["domination_pairs"],
        nonexpansive_samples=doc["nonexpansive_samples"],
        output=dict(doc["output"]),
        unsafe=unsafe,
        document=doc,
    )


def catalog():
    """Spaces, map kinds with their parameters, schedules and rate families."""
    from .rates import RATE_FAMILIES

    def params(props, required):
        return {k: ("required" if k in required else "optional") for k in props if k != "kind"}

    return {
        "spaces": {
            "euclidean": {"dimension": "required", "domain": "optional (whole | ball | box)"},
            "hyperbolic_disk": {},
        },
        "domains": {
            "whole": {}, "ball": {"center": "required", "radius": "required"},
            "box": {"lower": "required", "upper": "required"},
        },
        "maps": {k: params(p, r) for k, (p, r) in MAP_KINDS.items()},
        "schedules": {
            "harmonic": "lambda_n = 1/(n+1)",
            "power:A": "lambda_n = 1/(n+1)^A, A > 0",
            "constant:C": "lambda_n = C, 0 <= C <= 1",
            "explicit:v1;v2;...": "lambda_1 = v1, lambda_2 = v2, ...",
        },
        "rate_families": {k: list(v[1]) for k, v in RATE_FAMILIES.items()},
        "checks": list(CHECK_NAMES),
    }
