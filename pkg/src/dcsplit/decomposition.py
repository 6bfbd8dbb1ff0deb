"""Convex decompositions ``f = g - h`` supported on a fixed complex.

The decomposition polyhedron lives in weight coordinates: one variable per
facet holding the scaled weight of ``g``. Balancing around every
codimension-2 face is imposed as a linear equation, which makes the
feasible weights exactly those of convex functions ``g`` on the complex.
The inequalities ``w_g >= 0`` (rows ``0..m-1``) and ``w_g >= w_f``
(rows ``m..2m-1``) make ``g`` and ``h = g - f`` convex.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .config import Caps
from .cpwl import CPWL, Weights, balancing_rows, coarsen, from_weights, is_convex, supports, weights, weight_space
from .errors import ComplexMismatch, DecompositionMismatch, NotConvex, NotRegular, ValidationError
from .geometry import Complex
from .lp import OPTIMAL, HPolyhedron, LinearProgram, enumerate_vertices, rank_of_tight_set, solve
from .linalg import solve_affine
from .rational import RatLike, rat


@dataclass(frozen=True)
class DecompPoint:
    """A pair of convex functions with ``g - h`` equal to the target."""

    g: CPWL
    h: CPWL
    method: str = ""

    @property
    def complex(self) -> Complex:
        return self.g.complex

    @property
    def f(self) -> CPWL:
        return self.g - self.h

    @cached_property
    def weights_g(self) -> Weights:
        return weights(self.g)

    @cached_property
    def weights_h(self) -> Weights:
        return weights(self.h)

    def pieces(self) -> tuple[int, int]:
        return coarsen(self.g).piece_count, coarsen(self.h).piece_count


@dataclass
class DecompPolyhedron:
    f: CPWL
    polyhedron: HPolyhedron
    weights_f: Weights = field(default_factory=dict)

    @property
    def complex(self) -> Complex:
        return self.f.complex

    def lift(self, omega_g: Sequence[RatLike], method: str = "") -> DecompPoint:
        """Turn a feasible weight vector into the pair of functions ``(g, h)``."""
        g = from_weights({i: rat(v) for i, v in enumerate(omega_g)}, self.complex)
        return DecompPoint(g, g - self.f, method)


def build(f: CPWL) -> DecompPolyhedron:
    c = f.complex
    m = len(c.facets)
    wf = weights(f)
    ineqs = [({i: 1}, 0) for i in range(m)] + [({i: 1}, wf[i]) for i in range(m)]
    eqs = [(row, 0) for row in balancing_rows(c)]
    poly = HPolyhedron(m, ineqs=ineqs, eqs=eqs, parametrization=weight_space(c))
    return DecompPolyhedron(f, poly, wf)


def solve_reduced(f: CPWL, objective: Sequence[RatLike] | None = None) -> DecompPoint:
    """Minimize a positive objective (default: all ones) over the decomposition polyhedron.

    The optimum returned is a basic solution, hence a vertex, and it is
    reduced because any common convex part would lower the objective.
    """
    dp = build(f)
    m = len(f.complex.facets)
    obj = [rat(v) for v in objective] if objective is not None else [Fraction(1)] * m
    if len(obj) != m:
        raise ValidationError(f"objective needs {m} coefficients, got {len(obj)}")
    if any(v <= 0 for v in obj):
        raise ValidationError("objective must be strictly positive")
    res = solve(LinearProgram(dp.polyhedron, obj))
    assert res.status == OPTIMAL, res.status
    return dp.lift(res.point, method="lp")


def enumerate_decompositions(f: CPWL, caps: Caps | None = None) -> list[DecompPoint]:
    """All vertices of the decomposition polyhedron, lexicographic in ``w_g``."""
    dp = build(f)
    return [dp.lift(v, method="vertex") for v in enumerate_vertices(dp.polyhedron, caps)]


def _check_pair(p: DecompPoint) -> DecompPolyhedron:
    if not p.g.complex.same_as(p.h.complex):
        raise ComplexMismatch("g and h live on different complexes")
    return build(p.f)


def is_vertex(p: DecompPoint) -> bool:
    dp = _check_pair(p)
    wg = p.weights_g
    x = [wg[i] for i in range(len(p.complex.facets))]
    if not dp.polyhedron.contains(x):
        return False
    return rank_of_tight_set(dp.polyhedron, x) == len(x)


def is_reduced(p: DecompPoint) -> bool:
    """True when no nonzero convex ``phi`` on the complex fits under both ``g`` and ``h``."""
    c = p.complex
    m = len(c.facets)
    wg, wh = p.weights_g, p.weights_h
    ineqs = [({i: 1}, 0) for i in range(m)]
    ineqs += [({i: -1}, -wg[i]) for i in range(m)]
    ineqs += [({i: -1}, -wh[i]) for i in range(m)]
    eqs = [(row, 0) for row in balancing_rows(c)] + [({i: 1 for i in range(m)}, 1)]
    res = solve(LinearProgram(HPolyhedron(m, ineqs=ineqs, eqs=eqs)))
    return not res.feasible


def minimal_set(f: CPWL, caps: Caps | None = None) -> list[DecompPoint]:
    """Vertices whose piece counts are not dominated by another vertex."""
    verts = enumerate_decompositions(f, caps)
    counts = [p.pieces() for p in verts]
    out = []
    for p, (a, b) in zip(verts, counts):
        dominated = any(
            (c <= a and d <= b) and (c < a or d < b) for c, d in counts
        )
        if not dominated:
            out.append(p)
    return out


def unique_vertex_certificate(f: CPWL, g: CPWL, h: CPWL) -> bool:
    """Sufficient test that ``(g, h)`` is the only vertex of the decomposition polyhedron.

    Holds when ``g`` bends exactly where ``f`` bends convexly and ``h``
    exactly where ``f`` bends concavely.
    """
    wf, wg, wh = weights(f), weights(g), weights(h)
    if any(wg[k] - wh[k] != wf[k] for k in wf):
        raise DecompositionMismatch("g - h differs from f beyond an affine function")
    if not (is_convex(g) and is_convex(h)):
        raise NotConvex("g and h must both be convex")
    sf, sg, sh = supports(f), supports(g), supports(h)
    return sg.plus == sf.plus and sh.plus == sf.minus


def is_regular(c: Complex) -> bool:
    """True when some strictly convex function is compatible with ``c``."""
    return strictly_convex_function(c) is not None


def strictly_convex_function(c: Complex) -> CPWL | None:
    m = len(c.facets)
    ineqs = [({i: 1}, 1) for i in range(m)]
    eqs = [(row, 0) for row in balancing_rows(c)]
    poly = HPolyhedron(m, ineqs=ineqs, eqs=eqs, parametrization=weight_space(c))
    res = solve(LinearProgram(poly, [1] * m))
    if not res.feasible:
        return None
    return from_weights(dict(enumerate(res.point)), c)


def decompose_via_regular(f: CPWL, g: CPWL | None = None) -> DecompPoint:
    """``(f + t g, t g)`` with the least ``t >= 0`` making ``f + t g`` convex."""
    c = f.complex
    if g is None:
        g = strictly_convex_function(c)
        if g is None:
            raise NotRegular("no strictly convex function is compatible with the complex")
    if not g.complex.same_as(c):
        raise ComplexMismatch("g must live on the complex of f")
    wf, wg = weights(f), weights(g)
    if any(v <= 0 for v in wg.values()):
        raise NotConvex("g must be strictly convex on the complex")
    t = max([Fraction(0)] + [-wf[k] / wg[k] for k in wf])
    return DecompPoint(f + g * t, g * t, method="regular")


def is_irreducible(p: DecompPoint) -> bool:
    """True when no decomposition has strictly smaller breakpoint supports.

    Pinning ``w_g`` to zero off the support of ``g`` and to ``w_f`` off the
    support of ``h`` must leave a single balanced solution.
    """
    _check_pair(p)
    c = p.complex
    m = len(c.facets)
    wf, wg, wh = weights(p.f), p.weights_g, p.weights_h
    rows = [dict(r) for r in balancing_rows(c)]
    rhs = [Fraction(0)] * len(rows)
    for k in range(m):
        if wg[k] == 0:
            rows.append({k: 1})
            rhs.append(Fraction(0))
        if wh[k] == 0:
            rows.append({k: 1})
            rhs.append(wf[k])
    dense = [[r.get(j, 0) for j in range(m)] for r in rows]
    sol = solve_affine(dense, rhs, m)
    return sol.consistent and not sol.basis
