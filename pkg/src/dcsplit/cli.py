"""``dcsplit`` command line.

Exit codes: 0 success, 1 validation failure, 2 infeasible or not regular,
3 size cap exceeded, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from . import fixtures, jsonio
from .config import get_caps
from .constructions import (
    MaxTerm,
    glue_polygons,
    hyperplane_extension,
    local_maxima_decomposition,
    order_statistic,
    polygon_gluing,
    sign_split,
    tran2d_minimal,
)
from .cpwl import supports, weights
from .decomposition import (
    DecompPoint,
    enumerate_decompositions,
    is_irreducible,
    is_reduced,
    is_vertex,
    minimal_set,
    solve_reduced,
    unique_vertex_certificate,
)
from .errors import CapExceeded, DcSplitError
from .geometry import validate_complex
from .nn import dc_network, evaluate_network, grouped_convex, stats, verify
from .plot import svg_complex, svg_function
from .submodular import (
    cut_function,
    decompose_set_function,
    greedy_vertices,
    is_submodular,
    lovasz,
    to_set_function,
)

USAGE_EXIT = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


class _Done(Exception):
    """Carries a JSON payload together with a non-zero exit code."""

    def __init__(self, payload: Any, code: int):
        self.payload, self.code = payload, code


def _function(path: str):
    data = jsonio.load(path)
    return jsonio.function_from_json(data, base=Path(path).parent)


def _flags(p: DecompPoint, minimal: bool | None = None) -> dict[str, Any]:
    return {"vertex": is_vertex(p), "reduced": is_reduced(p), "irreducible": is_irreducible(p), "minimal": minimal}


def _is_minimal(p: DecompPoint) -> bool | None:
    try:
        best = minimal_set(p.f)
    except CapExceeded:
        return None
    return any(q.weights_g == p.weights_g for q in best)


# -- commands ----------------------------------------------------------------------


def cmd_validate(args) -> Any:
    data = jsonio.load(args.complex)
    c = jsonio.complex_from_json(data.get("complex", data) if "pieces" in data else data)
    report = validate_complex(c)
    out = {"ok": report.ok, "problems": report.problems, "cells": len(c.cells), "facets": len(c.facets)}
    if not report.ok:
        raise _Done(out, 1)
    return out


def cmd_weights(args) -> Any:
    f = _function(args.fn)
    s = supports(f)
    return {"weights": jsonio.weights_to_json(weights(f)), "plus": sorted(s.plus), "minus": sorted(s.minus)}


def cmd_decompose(args) -> Any:
    f = _function(args.fn)
    if args.enumerate:
        verts = enumerate_decompositions(f)
        return {"count": len(verts), "vertices": [jsonio.decomposition_to_json(p) for p in verts]}
    if args.minimal:
        best = minimal_set(f)
        return {
            "count": len(best),
            "minimal": [jsonio.decomposition_to_json(p, _flags(p, True)) for p in best],
        }
    objective = [s.strip() for s in args.objective.split(",")] if args.objective else None
    p = solve_reduced(f, objective)
    return jsonio.decomposition_to_json(p, _flags(p, _is_minimal(p)))


def cmd_check(args) -> Any:
    f = _function(args.fn)
    g = jsonio.function_from_json(jsonio.load(args.g), base=Path(args.g).parent)
    h = jsonio.function_from_json(jsonio.load(args.h), base=Path(args.h).parent)
    p = DecompPoint(g, h)
    out = _flags(p, _is_minimal(p))
    out["certificate"] = unique_vertex_certificate(f, g, h)
    return out


def cmd_construct(args) -> Any:
    kind = args.kind
    if kind == "hyperplane-ext":
        return jsonio.decomposition_to_json(hyperplane_extension(_function(args.input)))
    if kind == "local-max":
        return jsonio.decomposition_to_json(local_maxima_decomposition(_function(args.input)))
    if kind == "tran2d":
        res = tran2d_minimal(jsonio.fan2d_from_json(jsonio.load(args.input)))
        out = jsonio.decomposition_to_json(res.decomposition)
        out["fan"] = jsonio.fan2d_to_json(res.fan)
        out["new_ray"] = list(res.new_ray) if res.new_ray else None
        out["closing_weight"] = str(res.closing_weight)
        return out
    if kind == "sign-split":
        data = jsonio.load(args.input)
        terms = [MaxTerm.make(t["coef"], t["a"], t["b"], t["c"], t["d"]) for t in data["terms"]]
        return jsonio.decomposition_to_json(sign_split(terms, data.get("dim")))
    if kind == "order-stat":
        if args.n is None or args.k is None:
            raise _Usage("order-stat needs --n and --k")
        f, g, h = order_statistic(args.n, args.k)
        out = jsonio.decomposition_to_json(DecompPoint(g, h, method="order_statistic"))
        out["f"] = jsonio.function_to_json(f, inline=False)
        return out
    raise _Usage(f"unknown construction {kind}")


def cmd_glue(args) -> Any:
    data = jsonio.load(args.input)
    if "polygons" in data:
        res = glue_polygons(jsonio.polygons_from_json(data))
    else:
        f = jsonio.function_from_json(data, base=Path(args.input).parent)
        res = polygon_gluing(f.complex, weights(f))
    out = jsonio.gluing_to_json(res)
    if not res.feasible:
        raise _Done(out, 2)
    return out


def cmd_submod(args) -> Any:
    op = args.op
    data = jsonio.load(args.input)
    if op == "lovasz":
        return jsonio.function_to_json(lovasz(jsonio.setfn_from_json(data)))
    if op == "tosetfn":
        return jsonio.setfn_to_json(to_set_function(jsonio.function_from_json(data, base=Path(args.input).parent)))
    if op == "issubmodular":
        return {"submodular": is_submodular(jsonio.setfn_from_json(data))}
    if op == "decompose":
        d = decompose_set_function(jsonio.setfn_from_json(data))
        return {
            "G": jsonio.setfn_to_json(d.G),
            "H": jsonio.setfn_to_json(d.H),
            "flags": {"vertex": d.vertex, "reduced": d.reduced, "irreducible": d.irreducible},
            "pieces": list(d.point.pieces()),
        }
    if op == "cut":
        return jsonio.setfn_to_json(cut_function(jsonio.graph_from_json(data)))
    if op == "greedy":
        return {"vertices": [[str(v) for v in x] for x in greedy_vertices(jsonio.setfn_from_json(data))]}
    raise _Usage(f"unknown submod operation {op}")


def cmd_nn(args) -> Any:
    op = args.op
    if op == "stats":
        net = jsonio.network_from_json(jsonio.load(args.inputs[0]))
        return vars(stats(net))
    if op == "verify":
        if len(args.inputs) != 2:
            raise _Usage("nn verify needs <network> <fn>")
        net = jsonio.network_from_json(jsonio.load(args.inputs[0]))
        f = _function(args.inputs[1])
        report = verify(net, f, samples=args.samples, seed=args.seed)
        out = {"passed": report.passed, "checked": report.checked, "failures": len(report.failures), "note": report.note}
        if not report.passed:
            raise _Done(out, 1)
        return out
    if op == "eval":
        net = jsonio.network_from_json(jsonio.load(args.inputs[0]))
        return {"value": str(evaluate_network(net, args.point.split(",")))}
    f = _function(args.inputs[0])
    if op == "build":
        net = grouped_convex(f, args.r, args.s)
    elif op == "dc":
        net = dc_network(f, solve_reduced(f), args.r, args.s)
    else:
        raise _Usage(f"unknown nn operation {op}")
    out = jsonio.network_to_json(net, "f64" if args.float else None)
    out["stats"] = vars(stats(net))
    return out


def cmd_plot(args) -> Any:
    data = jsonio.load(args.input)
    if "rays" in data:
        wf = jsonio.fan2d_from_json(data)
        c = wf.complex()
        svg = svg_complex(c, wf.facet_weights(c))
    else:
        svg = svg_function(jsonio.function_from_json(data, base=Path(args.input).parent))
    Path(args.output).write_text(svg)
    return {"written": args.output}


def cmd_example(args) -> Any:
    name = args.name
    if name == "median":
        return jsonio.function_to_json(fixtures.median())
    if name == "counterexample":
        return jsonio.function_to_json(fixtures.counterexample())
    if name == "counterexample-polygons":
        return {
            "polygons": [
                {"face": p.face, "edges": [[lab, [str(v) for v in e]] for lab, e in zip(p.labels, p.edges)]}
                for p in fixtures.counterexample_polygons()
            ]
        }
    if name == "tran":
        return jsonio.fan2d_to_json(fixtures.tran_fan())
    raise _Usage(f"unknown example {name}")


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dcsplit", description="Exact difference-of-convex decompositions of CPWL functions.")
    p.add_argument("--caps", help="cap overrides such as vertex_dim=14,braid_n=6 (merged over DCSPLIT_CAPS)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="check a complex")
    s.add_argument("complex")
    s.set_defaults(run=cmd_validate)

    s = sub.add_parser("weights", help="scaled facet weights of a function")
    s.add_argument("fn")
    s.set_defaults(run=cmd_weights)

    s = sub.add_parser("decompose", help="reduced, enumerated or minimal decompositions")
    s.add_argument("fn")
    s.add_argument("--objective", help="comma separated positive rationals, one per facet")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--enumerate", action="store_true")
    mode.add_argument("--minimal", action="store_true")
    s.set_defaults(run=cmd_decompose)

    s = sub.add_parser("check", help="classify a given pair (g, h)")
    s.add_argument("fn")
    s.add_argument("g")
    s.add_argument("h")
    s.set_defaults(run=cmd_check)

    s = sub.add_parser("construct", help="named constructions")
    s.add_argument("kind", choices=["hyperplane-ext", "local-max", "tran2d", "sign-split", "order-stat"])
    s.add_argument("input", nargs="?")
    s.add_argument("--n", type=int)
    s.add_argument("--k", type=int)
    s.set_defaults(run=cmd_construct)

    s = sub.add_parser("glue", help="polygon gluing system on a fan in R^3")
    s.add_argument("input")
    s.set_defaults(run=cmd_glue)

    s = sub.add_parser("submod", help="set functions and Lovasz extensions")
    s.add_argument("op", choices=["lovasz", "tosetfn", "issubmodular", "decompose", "cut", "greedy"])
    s.add_argument("input")
    s.set_defaults(run=cmd_submod)

    s = sub.add_parser("nn", help="ReLU networks")
    s.add_argument("op", choices=["build", "dc", "verify", "stats", "eval"])
    s.add_argument("inputs", nargs="+")
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--s", type=int, default=64)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--point", default="0")
    s.add_argument("--float", action="store_true", help="export weights as f64")
    s.set_defaults(run=cmd_nn)

    s = sub.add_parser("plot", help="SVG drawing of a planar fan or function")
    s.add_argument("input")
    s.add_argument("-o", "--output", dest="output", required=True)
    s.set_defaults(run=cmd_plot)

    s = sub.add_parser("example", help="print a built-in fixture as JSON")
    s.add_argument("name", choices=["median", "counterexample", "counterexample-polygons", "tran"])
    s.set_defaults(run=cmd_example)
    for name, sp in sub.choices.items():
        if name != "plot":
            sp.add_argument("-o", "--output", help="write JSON here instead of stdout")
    return p


def _emit(payload: Any, output: str | None, stream=None) -> None:
    text = jsonio.dumps(payload) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        (stream or sys.stdout).write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    json_out = None if args.command == "plot" else args.output
    saved = os.environ.get("DCSPLIT_CAPS")
    if args.caps:
        os.environ["DCSPLIT_CAPS"] = ",".join(x for x in (saved, args.caps) if x)
    try:
        get_caps()
        payload = args.run(args)
    except _Usage as e:
        sys.stderr.write(f"dcsplit: {e}\n")
        return USAGE_EXIT
    except _Done as done:
        _emit(done.payload, json_out)
        return done.code
    except DcSplitError as e:
        sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e)}) + "\n")
        return e.exit_code
    except (OSError, KeyError, TypeError, ValueError) as e:
        sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e)}) + "\n")
        return 1
    finally:
        # in-process callers should not inherit the override
        if saved is None:
            os.environ.pop("DCSPLIT_CAPS", None)
        else:
            os.environ["DCSPLIT_CAPS"] = saved
    _emit(payload, json_out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
