"""Scenario files: the JSON bundle of weights, points, measures and tasks.

Example::

    {
      "dim_a": 2,
      "weights": [["0", "0"], ["1", "0"], ["0", "1"]],
      "points": [
        {"name": "x0", "coords": [[1, 0], [0, 0], [0, 0]], "support": [0]},
        {"name": "generic", "coords": [[1, 0], [1, 0], [1, 0]], "support": [0, 1, 2]}
      ],
      "measures": [
        {"name": "nu", "atoms": [{"point": "x0", "weight": "1/2"},
                                 {"point": "generic", "weight": "1/2"}]}
      ],
      "tasks": [{"command": "moment", "point": "generic"}]
    }

Rationals are "p/q" strings (plain integers are accepted too); complex
coordinates are [re, im] pairs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError
from .hull import to_fraction, to_vec
from .measures import DiscreteMeasure
from .weights import ProjPoint, WeightSystem


class ScenarioError(InputError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class Scenario:
    weights: WeightSystem
    points: dict[str, ProjPoint] = field(default_factory=dict)
    measures: dict[str, DiscreteMeasure] = field(default_factory=dict)
    tasks: list[dict] = field(default_factory=list)
    digest: str = ""

    @property
    def dim_a(self) -> int:
        return self.weights.dim_a


def _require(obj: dict, key: str, kind, path: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ScenarioError(path, f"missing field {key!r}")
    value = obj[key]
    if not isinstance(value, kind):
        raise ScenarioError(f"{path}.{key}", f"expected {getattr(kind, '__name__', kind)}")
    return value


def _parse_point(raw, path: str, size: int) -> tuple[str, ProjPoint]:
    name = _require(raw, "name", str, path)
    coords = _require(raw, "coords", list, path)
    support = _require(raw, "support", list, path)
    if len(coords) != size:
        raise ScenarioError(f"{path}.coords", f"expected {size} coordinates, got {len(coords)}")
    z = np.zeros(size, dtype=complex)
    for i, c in enumerate(coords):
        if (not isinstance(c, list) or len(c) != 2
                or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in c)):
            raise ScenarioError(f"{path}.coords[{i}]", "expected an [re, im] pair of numbers")
        z[i] = complex(c[0], c[1])
    if not all(isinstance(i, int) and not isinstance(i, bool) for i in support):
        raise ScenarioError(f"{path}.support", "expected integer indices")
    try:
        return name, ProjPoint(z, frozenset(support))
    except InputError as exc:
        raise ScenarioError(path, str(exc)) from exc


def parse_scenario(data, digest: str = "") -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("$", "scenario must be a JSON object")
    dim_a = _require(data, "dim_a", int, "$")
    raw_weights = _require(data, "weights", list, "$")
    if not raw_weights:
        raise ScenarioError("$.weights", "weights must be nonempty")
    weights = []
    for i, w in enumerate(raw_weights):
        if not isinstance(w, list) or len(w) != dim_a:
            raise ScenarioError(f"$.weights[{i}]", f"expected a list of {dim_a} rationals")
        try:
            weights.append(to_vec(w))
        except InputError as exc:
            raise ScenarioError(f"$.weights[{i}]", str(exc)) from exc
    try:
        W = WeightSystem(dim_a, tuple(weights))
    except InputError as exc:
        raise ScenarioError("$", str(exc)) from exc

    points: dict[str, ProjPoint] = {}
    for i, raw in enumerate(data.get("points", [])):
        name, x = _parse_point(raw, f"$.points[{i}]", len(weights))
        if name in points:
            raise ScenarioError(f"$.points[{i}].name", f"duplicate point name {name!r}")
        points[name] = x

    measures: dict[str, DiscreteMeasure] = {}
    for i, raw in enumerate(data.get("measures", [])):
        path = f"$.measures[{i}]"
        name = _require(raw, "name", str, path)
        atoms = _require(raw, "atoms", list, path)
        pairs = []
        for j, atom in enumerate(atoms):
            apath = f"{path}.atoms[{j}]"
            ref = _require(atom, "point", str, apath)
            if ref not in points:
                raise ScenarioError(f"{apath}.point", f"unknown point {ref!r}")
            try:
                pairs.append((points[ref], to_fraction(_require(atom, "weight", (str, int), apath))))
            except InputError as exc:
                raise ScenarioError(f"{apath}.weight", str(exc)) from exc
        try:
            measures[name] = DiscreteMeasure(tuple(pairs))
        except InputError as exc:
            raise ScenarioError(path, str(exc)) from exc

    tasks = data.get("tasks", [])
    if not isinstance(tasks, list):
        raise ScenarioError("$.tasks", "expected a list")
    for i, t in enumerate(tasks):
        _require(t, "command", str, f"$.tasks[{i}]")
        for key, table in (("point", points), ("measure", measures)):
            if key in t and t[key] not in table:
                raise ScenarioError(f"$.tasks[{i}].{key}", f"unknown {key} {t[key]!r}")
    return Scenario(W, points, measures, tasks, digest)


def load_scenario(path) -> Scenario:
    raw = Path(path).read_bytes()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from exc
    return parse_scenario(data, hashlib.sha256(raw).hexdigest())


def point_json(name: str, x: ProjPoint) -> dict:
    return {"name": name, **x.to_json()}
