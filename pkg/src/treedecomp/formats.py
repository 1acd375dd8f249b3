"""
Table and structure files.

Both are single JSON objects.  Floats are written with 17 significant
digits so a table or model survives a write/read cycle bit for bit.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .distribution import JointTable, validate
from .structure import Component, FittedModel, Scores, Topology, validate_topology

__all__ = [
    "FormatError",
    "dumps",
    "table_to_text",
    "table_from_text",
    "read_table",
    "write_table",
    "structure_to_text",
    "structure_from_text",
    "read_structure",
    "write_structure",
]

TABLE_FORMAT = "treedecomp-table"
STRUCTURE_FORMAT = "treedecomp-structure"


class FormatError(ValueError):
    pass


def _num(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with fixed 17-significant-digit floats and stable layout."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number, str, bool)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        inner = (",\n").join(pad + dumps(v, indent, _level + 1) for v in obj)
        return "[\n" + inner + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = (",\n").join(
            pad + json.dumps(str(k)) + ": " + dumps(v, indent, _level + 1) for k, v in obj.items()
        )
        return "{\n" + inner + "\n" + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _load(text: str) -> dict:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise FormatError("file must hold a single JSON object")
    return obj


def table_to_text(table: JointTable) -> str:
    return dumps({
        "format": TABLE_FORMAT,
        "variables": list(table.variables),
        "probabilities": [float(x) for x in table.probs],
    }) + "\n"


def table_from_text(text: str, check: bool = True) -> JointTable:
    obj = _load(text)
    try:
        variables = obj["variables"]
        probs = obj["probabilities"]
    except KeyError as exc:
        raise FormatError(f"table file lacks field {exc}") from None
    if not isinstance(variables, list) or not isinstance(probs, list):
        raise FormatError("variables and probabilities must be lists")
    try:
        arr = np.array(probs, dtype=float)
    except (TypeError, ValueError):
        raise FormatError("probabilities must be numbers") from None
    table = JointTable(variables, arr)
    if check:
        problems = validate(table)
        if problems:
            raise FormatError("invalid table: " + "; ".join(problems))
    return table


def read_table(path, check: bool = True) -> JointTable:
    with open(path, encoding="utf-8") as fh:
        return table_from_text(fh.read(), check=check)


def write_table(path, table: JointTable) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(table_to_text(table))


def structure_to_text(variables, topology: Topology, model: FittedModel | None = None, search: dict | None = None) -> str:
    obj = {
        "format": STRUCTURE_FORMAT,
        "variables": list(variables),
        "roots": list(topology.roots),
        "components": [
            {"kind": c.kind, "parent": c.parent, "children": list(c.children)}
            for c in topology.components
        ],
    }
    if model is not None:
        obj["parameters"] = {
            "root_priors": {r: [float(x) for x in model.root_priors[r]] for r in topology.roots},
            "cpts": [np.asarray(t, dtype=float).tolist() for t in model.cpts],
        }
        if model.scores is not None:
            obj["scores"] = {
                "weight_sum": model.scores.weight_sum,
                "log_score": model.scores.log_score,
                "i_divergence": model.scores.i_divergence,
            }
    if search:
        obj["search"] = search
    return dumps(obj) + "\n"


def structure_from_text(text: str):
    """Parse a structure file into ``(variables, topology, model_or_None)``."""
    obj = _load(text)
    try:
        variables = list(obj["variables"])
        roots = list(obj["roots"])
        raw = obj["components"]
    except KeyError as exc:
        raise FormatError(f"structure file lacks field {exc}") from None
    comps = []
    for c in raw:
        try:
            kind, parent, children = c["kind"], c["parent"], c["children"]
        except (KeyError, TypeError):
            raise FormatError("component needs kind, parent and children") from None
        if kind not in ("pair", "triple") or len(children) != (1 if kind == "pair" else 2):
            raise FormatError(f"bad component {c!r}")
        comps.append(Component(parent, tuple(children)))
    topology = Topology(tuple(roots), tuple(comps))
    problems = validate_topology(topology, variables)
    if problems:
        raise FormatError("invalid structure: " + "; ".join(problems))

    params = obj.get("parameters")
    model = None
    if params is not None:
        try:
            priors = {r: np.array(params["root_priors"][r], dtype=float) for r in roots}
            cpts = tuple(np.array(t, dtype=float) for t in params["cpts"])
        except (KeyError, TypeError, ValueError):
            raise FormatError("malformed parameters block") from None
        if len(cpts) != len(comps):
            raise FormatError("one CPT per component is required")
        for c, t in zip(comps, cpts):
            want = (2, 2) if c.kind == "pair" else (2, 4)
            if t.shape != want:
                raise FormatError(f"CPT for {list(c.members)} must have shape {want}")
            if np.any(t < 0) or np.any(np.abs(t.sum(axis=1) - 1.0) > 1e-12):
                raise FormatError(f"CPT rows for {list(c.members)} must be distributions")
        for r, p in priors.items():
            if p.shape != (2,) or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
                raise FormatError(f"root prior for {r!r} must be a distribution")
        scores = None
        if "scores" in obj:
            s = obj["scores"]
            scores = Scores(float(s["weight_sum"]), float(s["log_score"]), float(s["i_divergence"]))
        model = FittedModel(tuple(variables), topology, priors, cpts, scores)
    return variables, topology, model


def read_structure(path):
    with open(path, encoding="utf-8") as fh:
        return structure_from_text(fh.read())


def write_structure(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
