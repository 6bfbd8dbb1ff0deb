"""JSON encodings; every rational is a ``"p/q"`` string."""

from __future__ import annotations

import json
from collections.abc import Mapping
from fractions import Fraction
from pathlib import Path
from typing import Any

from .constructions import GluingResult, Polygon, WeightedFan2D
from .cpwl import CPWL, AffineMap, Weights, weights
from .decomposition import DecompPoint
from .errors import ValidationError
from .geometry import Cell, Complex, Facet, Halfspace, Hyperplane, match_facets
from .nn import Layer, ReluNetwork
from .rational import fmt, vec
from .submodular import SetFunction, WeightedGraph


def _rats(values) -> list[str]:
    return [fmt(Fraction(v)) for v in values]


def _need(data: Mapping, *keys: str) -> None:
    missing = [k for k in keys if k not in data]
    if missing:
        raise ValidationError(f"missing JSON keys: {', '.join(missing)}")


# -- complexes and functions -----------------------------------------------------


def complex_to_json(c: Complex) -> dict[str, Any]:
    return {
        "dim": c.dim,
        "name": c.name,
        "cells": [
            {"id": cell.id, "label": cell.label, "ineqs": [_rats(h.normal) + [fmt(h.offset)] for h in cell.halfspaces]}
            for cell in c.cells
        ],
        "facets": [
            {"id": f.id, "normal": _rats(f.hyperplane.normal), "offset": fmt(f.hyperplane.offset), "pos": f.pos, "neg": f.neg}
            for f in c.facets
        ],
    }


def complex_from_json(data: Mapping) -> Complex:
    _need(data, "dim", "cells")
    dim = int(data["dim"])
    cells = []
    for k, raw in enumerate(sorted(data["cells"], key=lambda c: int(c.get("id", 0)))):
        if int(raw.get("id", k)) != k:
            raise ValidationError("cell ids must be 0..m-1")
        hs = []
        for row in raw["ineqs"]:
            if len(row) != dim + 1:
                raise ValidationError(f"cell {k}: inequality of length {len(row)} in dimension {dim}")
            hs.append(Halfspace.make(row[:dim], row[dim]))
        cells.append(Cell(k, tuple(hs), raw.get("label", "")))
    if "facets" in data:
        facets = []
        for k, raw in enumerate(sorted(data["facets"], key=lambda f: int(f.get("id", 0)))):
            normal = vec(raw["normal"])
            hyp = Hyperplane.make(normal, raw["offset"])
            pos, neg = int(raw["pos"]), int(raw["neg"])
            if sum(a * b for a, b in zip(hyp.normal, normal)) < 0:
                pos, neg = neg, pos
            facets.append(Facet(k, hyp, pos, neg))
    else:
        facets = match_facets(dim, cells)
    return Complex(dim, cells, facets, name=data.get("name", ""))


def function_to_json(f: CPWL, inline: bool = True) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if inline:
        out["complex"] = complex_to_json(f.complex)
    out["pieces"] = {str(k): {"a": _rats(p.a), "b": fmt(p.b)} for k, p in sorted(f.pieces.items())}
    return out


def function_from_json(data: Mapping, base: Path | None = None, complex: Complex | None = None) -> CPWL:
    _need(data, "pieces")
    if complex is None:
        _need(data, "complex")
        ref = data["complex"]
        if isinstance(ref, str):
            path = Path(ref) if base is None else base / ref
            complex = complex_from_json(json.loads(path.read_text()))
        else:
            complex = complex_from_json(ref)
    pieces = {int(k): AffineMap.make(v["a"], v["b"]) for k, v in data["pieces"].items()}
    return CPWL(complex, pieces)


def weights_to_json(w: Weights) -> dict[str, str]:
    return {str(k): fmt(v) for k, v in sorted(w.items())}


def decomposition_to_json(p: DecompPoint, flags: Mapping[str, Any] | None = None) -> dict[str, Any]:
    out = {
        "g": function_to_json(p.g),
        "h": function_to_json(p.h, inline=False),
        "weights_g": weights_to_json(p.weights_g),
        "weights_h": weights_to_json(p.weights_h),
        "pieces": list(p.pieces()),
    }
    if flags is not None:
        out["flags"] = dict(flags)
    if p.method:
        out["method"] = p.method
    return out


def decomposition_from_json(data: Mapping) -> DecompPoint:
    g = function_from_json(data["g"])
    h = function_from_json(data["h"], complex=g.complex)
    return DecompPoint(g, h, data.get("method", ""))


# -- planar fans, polygons, gluing -------------------------------------------------


def fan2d_to_json(wf: WeightedFan2D) -> dict[str, Any]:
    return {"rays": [list(r) for r in wf.rays], "weights": _rats(wf.weights)}


def fan2d_from_json(data: Mapping) -> WeightedFan2D:
    _need(data, "rays", "weights")
    return WeightedFan2D.make(data["rays"], data["weights"])


def polygons_from_json(data: Mapping) -> list[Polygon]:
    _need(data, "polygons")
    out = []
    for raw in data["polygons"]:
        edges = raw["edges"]
        out.append(
            Polygon(raw["face"], tuple(label for label, _ in edges), tuple(vec(e) for _, e in edges))
        )
    return out


def gluing_to_json(res: GluingResult) -> dict[str, Any]:
    out: dict[str, Any] = {
        "feasible": res.feasible,
        "polygons": [
            {"face": p.face, "edges": [[label, _rats(e)] for label, e in zip(p.labels, p.edges)]} for p in res.polygons
        ],
        "equations": len(res.system.rows),
    }
    if res.placements is not None:
        out["placements"] = {str(k): _rats(v) for k, v in res.placements.items()}
    if res.certificate is not None:
        out["certificate"] = _rats(res.certificate)
        out["certificate_verified"] = res.system.verify_certificate(res.certificate)
    return out


# -- set functions and graphs ------------------------------------------------------


def setfn_to_json(F: SetFunction) -> dict[str, Any]:
    return {"n": F.n, "values": {str(m): fmt(v) for m, v in enumerate(F.table())}}


def setfn_from_json(data: Mapping) -> SetFunction:
    _need(data, "n", "values")
    values = data["values"]
    n = int(data["n"])
    if isinstance(values, Mapping):
        return SetFunction.make(n, {int(k): v for k, v in values.items()})
    return SetFunction.make(n, values)


def graph_to_json(g: WeightedGraph) -> dict[str, Any]:
    return {"n": g.n, "edges": [[u, v, fmt(w)] for u, v, w in g.edges]}


def graph_from_json(data: Mapping) -> WeightedGraph:
    _need(data, "n", "edges")
    return WeightedGraph.make(int(data["n"]), data["edges"])


# -- networks ----------------------------------------------------------------------


def network_to_json(net: ReluNetwork, dtype: str | None = None) -> dict[str, Any]:
    if dtype == "f64":
        conv = float
    elif dtype is None:
        conv = fmt
    else:
        raise ValidationError(f"unknown dtype {dtype!r}")
    out: dict[str, Any] = {
        "input_dim": net.input_dim,
        "layers": [
            {"W": [[conv(v) for v in row] for row in layer.W], "b": [conv(v) for v in layer.b], "relu": layer.relu}
            for layer in net.layers
        ],
    }
    if dtype:
        out["dtype"] = dtype
    return out


def network_from_json(data: Mapping) -> ReluNetwork:
    _need(data, "layers")
    if data.get("dtype"):
        raise ValidationError("float exports cannot be loaded as exact networks")
    layers = tuple(
        Layer(tuple(vec(row) for row in raw["W"]), vec(raw["b"]), bool(raw["relu"])) for raw in data["layers"]
    )
    n = int(data["input_dim"]) if "input_dim" in data else len(layers[0].W[0])
    return ReluNetwork(n, layers)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


def load(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON ({e})") from e


def function_weights_json(f: CPWL) -> dict[str, str]:
    return weights_to_json(weights(f))
