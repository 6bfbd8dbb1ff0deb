"""Exact linear programming over H-polyhedra.

Every polyhedron is ``{x : E x = e, A x >= b}``. Equalities are eliminated
first (``x = x0 + N z``); the remaining inequality-form LP in ``z`` is solved
through its dual in standard form, whose tableau has only ``dim(z)`` rows.
The simplex uses Bland's rule, so it terminates on the heavily degenerate
polyhedra produced by decomposition problems.

Infeasible programs return a Farkas certificate ``(u, v)`` with ``u >= 0``,
``u^T A + v^T E = 0`` and ``u^T b + v^T e = 1``. It can be rechecked in exact
arithmetic with :meth:`FarkasCertificate.verify`.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from gmpy2 import mpq

from .config import Caps, get_caps
from .errors import DimMismatch
from .linalg import ONE, ZERO, AffineSolution, Echelon, SparseRow, solve_affine, solve_linear, sparse
from .rational import Vector, from_mpq

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def _row(row: Sequence | SparseRow, dim: int) -> SparseRow:
    if isinstance(row, dict):
        out = {int(j): mpq(v) for j, v in row.items() if v}
    else:
        if len(row) != dim:
            raise DimMismatch(f"row of length {len(row)} in dimension {dim}")
        out = sparse(row)
    if any(j < 0 or j >= dim for j in out):
        raise DimMismatch("row index out of range")
    return out


def _sdot(row: SparseRow, x: Sequence) -> mpq:
    return sum((v * x[j] for j, v in row.items()), ZERO)


class HPolyhedron:
    """``{x in Q^dim : <E_i, x> = e_i, <A_j, x> >= b_j}`` with sparse rows."""

    def __init__(
        self,
        dim: int,
        ineqs: Iterable[tuple[Sequence | SparseRow, object]] = (),
        eqs: Iterable[tuple[Sequence | SparseRow, object]] = (),
        parametrization: AffineSolution | None = None,
    ):
        self.dim = dim
        self.ineq_rows: list[SparseRow] = []
        self.ineq_rhs: list[mpq] = []
        for row, rhs in ineqs:
            self.ineq_rows.append(_row(row, dim))
            self.ineq_rhs.append(mpq(rhs))
        self.eq_rows: list[SparseRow] = []
        self.eq_rhs: list[mpq] = []
        for row, rhs in eqs:
            self.eq_rows.append(_row(row, dim))
            self.eq_rhs.append(mpq(rhs))
        self._param = parametrization

    @property
    def num_ineqs(self) -> int:
        return len(self.ineq_rows)

    def parametrization(self) -> AffineSolution:
        """Affine parametrization of the equality set, computed once."""
        if self._param is None:
            dense = [[r.get(j, ZERO) for j in range(self.dim)] for r in self.eq_rows]
            self._param = solve_affine(dense, self.eq_rhs, self.dim)
        return self._param

    def slacks(self, x: Sequence) -> list[mpq]:
        xm = [mpq(v) for v in x]
        return [_sdot(r, xm) - b for r, b in zip(self.ineq_rows, self.ineq_rhs)]

    def contains(self, x: Sequence) -> bool:
        xm = [mpq(v) for v in x]
        if any(_sdot(r, xm) != e for r, e in zip(self.eq_rows, self.eq_rhs)):
            return False
        return all(s >= 0 for s in self.slacks(xm))

    def tight_set(self, x: Sequence) -> frozenset[int]:
        return frozenset(i for i, s in enumerate(self.slacks(x)) if s == 0)


@dataclass(frozen=True)
class FarkasCertificate:
    ineq: tuple[Fraction, ...]
    eq: tuple[Fraction, ...] = ()

    def verify(self, poly: HPolyhedron) -> bool:
        """Exact check that the multipliers prove ``poly`` empty."""
        if len(self.ineq) != poly.num_ineqs or len(self.eq) != len(poly.eq_rows):
            return False
        if any(u < 0 for u in self.ineq):
            return False
        combo = [ZERO] * poly.dim
        value = ZERO
        for u, row, b in zip(self.ineq, poly.ineq_rows, poly.ineq_rhs):
            if u:
                for j, a in row.items():
                    combo[j] += mpq(u) * a
                value += mpq(u) * b
        for v, row, e in zip(self.eq, poly.eq_rows, poly.eq_rhs):
            if v:
                for j, a in row.items():
                    combo[j] += mpq(v) * a
                value += mpq(v) * e
        return not any(combo) and value > 0


@dataclass(frozen=True)
class LinearProgram:
    """Minimize ``<objective, x>`` over ``polyhedron``; no objective means feasibility."""

    polyhedron: HPolyhedron
    objective: Sequence | None = None


@dataclass(frozen=True)
class LPResult:
    status: str
    point: Vector | None = None
    value: Fraction | None = None
    certificate: FarkasCertificate | None = None
    ray: Vector | None = None
    tight_set: frozenset[int] = field(default_factory=frozenset)

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


# -- dense tableau simplex -------------------------------------------------


def _pivot(T: list[list[mpq]], z: list[mpq], r: int, e: int) -> None:
    prow = T[r]
    inv = ONE / prow[e]
    nz = [j for j, v in enumerate(prow) if v]
    for j in nz:
        prow[j] *= inv
    for i, row in enumerate(T):
        if i != r:
            f = row[e]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
    f = z[e]
    if f:
        for j in nz:
            z[j] -= f * prow[j]


def _reduced_costs(T: list[list[mpq]], basis: list[int], cost: list[mpq]) -> list[mpq]:
    z = list(cost) + [ZERO]
    for r, b in enumerate(basis):
        cb = cost[b]
        if cb:
            for j, v in enumerate(T[r]):
                if v:
                    z[j] -= cb * v
    return z


def _iterate(T: list[list[mpq]], basis: list[int], z: list[mpq], allowed: int) -> int | None:
    """Run Bland's rule; return the entering column of an unbounded ray, else None."""
    while True:
        e = next((j for j in range(allowed) if z[j] < 0), None)
        if e is None:
            return None
        best = None
        for r, row in enumerate(T):
            a = row[e]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            return e
        _pivot(T, z, best[1], e)
        basis[best[1]] = e


@dataclass
class _StdResult:
    status: str
    x: list[mpq] | None = None
    y: list[mpq] | None = None
    ray: list[mpq] | None = None


def simplex_standard(A: list[list[mpq]], b: list[mpq], c: list[mpq]) -> _StdResult:
    """Minimize ``c u`` subject to ``A u = b``, ``u >= 0``.

    On optimality ``y`` holds the simplex multipliers (``c - A^T y >= 0``).
    On infeasibility ``y`` satisfies ``A^T y <= 0`` and ``b^T y > 0``.
    On unboundedness ``ray >= 0`` with ``A ray = 0`` and ``c ray < 0``.
    """
    m, n = len(A), len(c)
    sign = [ONE if bi >= 0 else -ONE for bi in b]
    T = []
    for i in range(m):
        row = [sign[i] * a for a in A[i]] + [ZERO] * m + [sign[i] * b[i]]
        row[n + i] = ONE
        T.append(row)
    basis = [n + i for i in range(m)]
    cost = [ZERO] * n + [ONE] * m
    z = _reduced_costs(T, basis, cost)
    _iterate(T, basis, z, n + m)
    if -z[-1] > 0:
        y = [sign[i] * (ONE - z[n + i]) for i in range(m)]
        return _StdResult(INFEASIBLE, y=y)
    for r in range(m):
        if basis[r] >= n:
            e = next((j for j in range(n) if T[r][j]), None)
            if e is not None:
                _pivot(T, z, r, e)
                basis[r] = e
    cost = list(c) + [ZERO] * m
    z = _reduced_costs(T, basis, cost)
    e = _iterate(T, basis, z, n)
    if e is not None:
        ray = [ZERO] * n
        ray[e] = ONE
        for r, bv in enumerate(basis):
            if bv < n:
                ray[bv] = -T[r][e]
        return _StdResult(UNBOUNDED, ray=ray)
    x = [ZERO] * n
    for r, bv in enumerate(basis):
        if bv < n:
            x[bv] = T[r][-1]
    y = [sign[i] * -z[n + i] for i in range(m)]
    return _StdResult(OPTIMAL, x=x, y=y)


# -- inequality-form LPs ---------------------------------------------------


@dataclass
class _Reduced:
    """The LP restated in the free coordinates ``z`` of the equality set."""

    param: AffineSolution
    rows: list[list[mpq]]
    rhs: list[mpq]


def _reduce(poly: HPolyhedron) -> _Reduced:
    param = poly.parametrization()
    basis = param.basis
    rows = [[_sdot(r, v) for v in basis] for r in poly.ineq_rows]
    rhs = [b - _sdot(r, param.x0) for r, b in zip(poly.ineq_rows, poly.ineq_rhs)]
    return _Reduced(param, rows, rhs)


def _lift(param: AffineSolution, z: Sequence[mpq]) -> list[mpq]:
    x = list(param.x0)
    for zk, v in zip(z, param.basis):
        if zk:
            for j, vj in enumerate(v):
                if vj:
                    x[j] += zk * vj
    return x


def _certificate(poly: HPolyhedron, u: list[mpq]) -> FarkasCertificate:
    """Complete inequality multipliers ``u`` (valid modulo equalities) to a full certificate."""
    target = [ZERO] * poly.dim
    for ui, row in zip(u, poly.ineq_rows):
        if ui:
            for j, a in row.items():
                target[j] -= ui * a
    v: list[mpq] = []
    if poly.eq_rows:
        et = [[row.get(j, ZERO) for row in poly.eq_rows] for j in range(poly.dim)]
        v = solve_linear(et, target, len(poly.eq_rows))
        assert v is not None, "inequality multipliers are not orthogonal to the equality set"
    value = sum((ui * b for ui, b in zip(u, poly.ineq_rhs)), ZERO)
    value += sum((vi * e for vi, e in zip(v, poly.eq_rhs)), ZERO)
    return FarkasCertificate(from_mpq(ui / value for ui in u), from_mpq(vi / value for vi in v))


def solve(lp: LinearProgram) -> LPResult:
    """Exact optimum, Farkas certificate or unbounded ray of ``lp``."""
    poly = lp.polyhedron
    param = poly.parametrization()
    if not param.consistent:
        cert = FarkasCertificate(tuple(Fraction(0) for _ in poly.ineq_rows), from_mpq(param.certificate))
        return LPResult(INFEASIBLE, certificate=cert)
    red = _reduce(poly)
    d, m = len(param.basis), poly.num_ineqs
    objective = [mpq(v) for v in lp.objective] if lp.objective is not None else [ZERO] * poly.dim
    if len(objective) != poly.dim:
        raise DimMismatch("objective length differs from the polyhedron dimension")
    cz = [sum((objective[j] * vj for j, vj in enumerate(v) if vj), ZERO) for v in param.basis]
    # dual: max rhs.u  s.t.  rows^T u = cz, u >= 0
    A_std = [[red.rows[i][k] for i in range(m)] for k in range(d)]
    c_std = [-b for b in red.rhs]
    res = simplex_standard(A_std, cz, c_std)
    if res.status == UNBOUNDED:
        return LPResult(INFEASIBLE, certificate=_certificate(poly, res.ray))
    if res.status == OPTIMAL:
        z = [-y for y in res.y]
        x = _lift(param, z)
        value = sum((o * xj for o, xj in zip(objective, x)), ZERO)
        return LPResult(OPTIMAL, from_mpq(x), Fraction(value), tight_set=poly.tight_set(x))
    direction = [-y for y in res.y]
    feas = simplex_standard(A_std, [ZERO] * d, c_std)
    if feas.status == UNBOUNDED:
        return LPResult(INFEASIBLE, certificate=_certificate(poly, feas.ray))
    x = _lift(param, [-y for y in feas.y])
    ray = _lift(AffineSolution([ZERO] * poly.dim, param.basis), direction)
    return LPResult(UNBOUNDED, from_mpq(x), ray=from_mpq(ray), tight_set=poly.tight_set(x))


def feasible_point(poly: HPolyhedron) -> Vector | None:
    res = solve(LinearProgram(poly))
    return res.point if res.feasible else None


def rank_of_tight_set(poly: HPolyhedron, x: Sequence) -> int:
    """Rank of the equalities together with the inequalities tight at ``x``."""
    param = poly.parametrization()
    ech = Echelon(len(param.basis))
    for i in sorted(poly.tight_set(x)):
        row = poly.ineq_rows[i]
        ech.add(sparse(_sdot(row, v) for v in param.basis))
    return poly.dim - len(param.basis) + ech.rank


def is_vertex(poly: HPolyhedron, x: Sequence) -> bool:
    return poly.contains(x) and rank_of_tight_set(poly, x) == poly.dim


# -- vertex enumeration (double description) -------------------------------


def _int_row(values: Sequence[mpq]) -> list[int]:
    den = math.lcm(*(int(v.denominator) for v in values)) if values else 1
    ints = [int(v * den) for v in values]
    g = math.gcd(*ints)
    return [v // g for v in ints] if g > 1 else ints


def _extreme_rays(rows: list[list[int]], D: int) -> list[list[int]] | None:
    """Extreme rays of the pointed cone ``{y : R y >= 0}``; None if it is not pointed."""
    ech = Echelon(D)
    initial = []
    for i, r in enumerate(rows):
        if ech.add(sparse(r)):
            initial.append(i)
            if len(initial) == D:
                break
    if len(initial) < D:
        return None
    K = [[mpq(v) for v in rows[i]] for i in initial]
    rays: list[list[int]] = []
    zeros: list[int] = []
    for j in range(D):
        e = [ZERO] * D
        e[j] = ONE
        col = solve_linear(K, e, D)
        rays.append(_int_row(col))
        zeros.append(sum(1 << initial[k] for k in range(D) if k != j))
    done = set(initial)
    for i, a in enumerate(rows):
        if i in done:
            continue
        vals = [sum(x * y for x, y in zip(a, r)) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        bit = 1 << i
        new_rays, new_zeros = [], []
        for p in pos:
            for q in neg:
                common = zeros[p] & zeros[q]
                if common.bit_count() < D - 2:
                    continue
                if any(
                    k != p and k != q and (zeros[k] & common) == common for k in range(len(rays))
                ):
                    continue
                comb = [vals[p] * y - vals[q] * x for x, y in zip(rays[p], rays[q])]
                g = math.gcd(*comb)
                new_rays.append([v // g for v in comb])
                new_zeros.append(common | bit)
        keep = [k for k, v in enumerate(vals) if v >= 0]
        rays = [rays[k] for k in keep] + new_rays
        zeros = [zeros[k] | (bit if vals[k] == 0 else 0) for k in keep] + new_zeros
    return rays


def enumerate_vertices(poly: HPolyhedron, caps: Caps | None = None) -> list[Vector]:
    """All vertices, sorted lexicographically. Empty when none exist."""
    caps = get_caps(caps)
    param = poly.parametrization()
    if not param.consistent:
        return []
    d = len(param.basis)
    caps.check("vertex_dim", d)
    caps.check("vertex_ineqs", poly.num_ineqs)
    red = _reduce(poly)
    if d == 0:
        return [from_mpq(param.x0)] if all(b <= 0 for b in red.rhs) else []
    rows = [_int_row(r + [-b]) for r, b in zip(red.rows, red.rhs)]
    rows.append([0] * d + [1])
    rays = _extreme_rays(rows, d + 1)
    if rays is None:
        return []
    out = set()
    for ray in rays:
        t = ray[-1]
        if t > 0:
            z = [mpq(v, t) for v in ray[:-1]]
            out.add(from_mpq(_lift(param, z)))
    return sorted(out)
