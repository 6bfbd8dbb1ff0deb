"""Complete polyhedral complexes in H-representation.

A cell is a full-dimensional polyhedron ``{x : <nu, x> >= c}`` given by its
facet-defining halfspaces with primitive integer normals. A facet record
stores the canonical hyperplane of the shared facet together with the cell
on its positive side (``pos``) and on its negative side (``neg``), so the
canonical normal points from ``neg`` into ``pos``. Cells may contain lines,
which happens for the braid fan and the order-statistic fan.
"""

from __future__ import annotations

import functools
import itertools
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .config import Caps, get_caps
from .errors import DimMismatch, ValidationError, WrongDim
from .lp import INFEASIBLE, OPTIMAL, UNBOUNDED, HPolyhedron, LinearProgram, solve
from .rational import RatLike, Vector, dot, normalize_halfspace, primitive_normal, rat


@dataclass(frozen=True, order=True)
class Halfspace:
    """``<normal, x> >= offset`` with a primitive integer normal."""

    normal: tuple[int, ...]
    offset: Fraction

    @classmethod
    def make(cls, row: Sequence[RatLike], rhs: RatLike) -> Halfspace:
        return cls(*normalize_halfspace(row, rhs))

    def slack(self, x: Sequence) -> Fraction:
        return dot(self.normal, x) - self.offset

    def flipped(self) -> Halfspace:
        return Halfspace(tuple(-v for v in self.normal), -self.offset)

    @property
    def hyperplane(self) -> Hyperplane:
        return Hyperplane.make(self.normal, self.offset)


@dataclass(frozen=True, order=True)
class Hyperplane:
    """``<normal, x> = offset`` in canonical form (first nonzero entry positive)."""

    normal: tuple[int, ...]
    offset: Fraction

    @classmethod
    def make(cls, normal: Sequence[RatLike], offset: RatLike) -> Hyperplane:
        nu, c = normalize_halfspace(normal, offset)
        if nu != primitive_normal(nu):
            return cls(tuple(-v for v in nu), -c)
        return cls(nu, c)

    def value(self, x: Sequence) -> Fraction:
        return dot(self.normal, x) - self.offset

    def contains(self, x: Sequence) -> bool:
        return self.value(x) == 0

    def positive(self) -> Halfspace:
        return Halfspace(self.normal, self.offset)

    def negative(self) -> Halfspace:
        return Halfspace(tuple(-v for v in self.normal), -self.offset)


@dataclass(frozen=True)
class Cell:
    id: int
    halfspaces: tuple[Halfspace, ...]
    label: str = ""

    def contains(self, x: Sequence) -> bool:
        return all(h.slack(x) >= 0 for h in self.halfspaces)


@dataclass(frozen=True)
class Facet:
    id: int
    hyperplane: Hyperplane
    pos: int
    neg: int

    def other(self, cell: int) -> int:
        return self.neg if cell == self.pos else self.pos

    def sign(self, cell: int) -> int:
        """+1 when ``cell`` lies on the positive side."""
        return 1 if cell == self.pos else -1


@dataclass(frozen=True)
class Codim2Face:
    """A codimension-2 face with its star in cyclic order.

    ``facets[i]`` separates ``cells[i]`` and ``cells[(i + 1) % len(cells)]``.
    ``point`` lies in the relative interior of the face.
    """

    id: int
    point: Vector
    cells: tuple[int, ...]
    facets: tuple[int, ...]


# -- LP helpers --------------------------------------------------------------


def _polyhedron(dim: int, halfspaces: Iterable[Halfspace], equalities: Iterable[Hyperplane] = ()) -> HPolyhedron:
    return HPolyhedron(
        dim,
        ineqs=[(h.normal, h.offset) for h in halfspaces],
        eqs=[(e.normal, e.offset) for e in equalities],
    )


def interior_point(
    dim: int, halfspaces: Sequence[Halfspace], equalities: Sequence[Hyperplane] = ()
) -> tuple[Vector, Fraction] | None:
    """A point strictly inside every halfspace (relative to the equalities).

    Returns the point and its minimal slack, or None if no such point exists.
    """
    ineqs = [(list(h.normal) + [-1], h.offset) for h in halfspaces]
    ineqs.append(([0] * dim + [-1], -1))
    eqs = [(list(e.normal) + [0], e.offset) for e in equalities]
    poly = HPolyhedron(dim + 1, ineqs=ineqs, eqs=eqs)
    res = solve(LinearProgram(poly, [0] * dim + [-1]))
    if res.status != OPTIMAL or res.point[-1] <= 0:
        return None
    return res.point[:-1], res.point[-1]


def minimize(dim: int, objective: Sequence, halfspaces: Sequence[Halfspace], equalities: Sequence[Hyperplane] = ()):
    """Minimum of a linear functional; None if unbounded, raises nothing on empty (returns 'infeasible')."""
    res = solve(LinearProgram(_polyhedron(dim, halfspaces, equalities), list(objective)))
    if res.status == UNBOUNDED:
        return None
    if res.status == INFEASIBLE:
        return INFEASIBLE
    return res.value


def implies(dim: int, halfspaces: Sequence[Halfspace], h: Halfspace, equalities: Sequence[Hyperplane] = ()) -> bool:
    """True when every point of the polyhedron satisfies ``h``."""
    low = minimize(dim, h.normal, halfspaces, equalities)
    if low is None:
        return False
    return low == INFEASIBLE or low >= h.offset


def irredundant(dim: int, halfspaces: Iterable[Halfspace]) -> tuple[Halfspace, ...]:
    """Drop duplicate and implied halfspaces, keeping the first occurrence order."""
    kept = list(dict.fromkeys(halfspaces))
    i = 0
    while i < len(kept):
        others = kept[:i] + kept[i + 1 :]
        if implies(dim, others, kept[i]):
            kept.pop(i)
        else:
            i += 1
    return tuple(kept)


def implicit_equalities(dim: int, halfspaces: Sequence[Halfspace]) -> list[int] | None:
    """Indices of halfspaces tight on the whole polyhedron; None if it is empty."""
    poly = _polyhedron(dim, halfspaces)
    if solve(LinearProgram(poly)).status == INFEASIBLE:
        return None
    out = []
    for i, h in enumerate(halfspaces):
        res = solve(LinearProgram(poly, [-v for v in h.normal]))
        if res.status == OPTIMAL and -res.value == h.offset:
            out.append(i)
    return out


# -- the complex -------------------------------------------------------------


class Complex:
    """A complete polyhedral complex; treat instances as immutable."""

    def __init__(self, dim: int, cells: Sequence[Cell], facets: Sequence[Facet], name: str = ""):
        if dim < 1:
            raise WrongDim(f"dimension must be positive, got {dim}")
        self.dim = dim
        self.cells = tuple(cells)
        self.facets = tuple(facets)
        self.name = name
        for i, cell in enumerate(self.cells):
            if cell.id != i:
                raise ValidationError(f"cell ids must be 0..{len(self.cells) - 1} in order")
            for h in cell.halfspaces:
                if len(h.normal) != dim:
                    raise DimMismatch(f"cell {i} has a normal of length {len(h.normal)}")
        for i, facet in enumerate(self.facets):
            if facet.id != i:
                raise ValidationError(f"facet ids must be 0..{len(self.facets) - 1} in order")
        self._interior: dict[int, tuple[Vector, Fraction]] = {}

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"<Complex{label} dim={self.dim} cells={len(self.cells)} facets={len(self.facets)}>"

    @functools.cached_property
    def signature(self) -> tuple:
        """Structural identity used to decide whether two complexes are the same."""
        return (
            self.dim,
            tuple(frozenset(c.halfspaces) for c in self.cells),
            tuple((f.hyperplane, f.pos, f.neg) for f in self.facets),
        )

    def same_as(self, other: Complex) -> bool:
        return self is other or self.signature == other.signature

    @functools.cached_property
    def cell_facets(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {c.id: [] for c in self.cells}
        for f in self.facets:
            out[f.pos].append(f.id)
            out[f.neg].append(f.id)
        return {k: tuple(v) for k, v in out.items()}

    @functools.cached_property
    def facet_index(self) -> dict[tuple[int, int], int]:
        """``(cell_a, cell_b) -> facet id`` for adjacent cells (both orders)."""
        out = {}
        for f in self.facets:
            out[(f.pos, f.neg)] = f.id
            out[(f.neg, f.pos)] = f.id
        return out

    def interior(self, cell: int) -> Vector:
        """A deterministic interior point of ``cell``."""
        return self._interior_with_slack(cell)[0]

    def _interior_with_slack(self, cell: int) -> tuple[Vector, Fraction]:
        if cell not in self._interior:
            found = interior_point(self.dim, self.cells[cell].halfspaces)
            if found is None:
                raise ValidationError(f"cell {cell} is not full-dimensional")
            self._interior[cell] = found
        return self._interior[cell]

    def affine_frame(self, cell: int) -> list[Vector]:
        """``dim + 1`` affinely independent points inside ``cell``."""
        p, slack = self._interior_with_slack(cell)
        biggest = max((abs(v) for h in self.cells[cell].halfspaces for v in h.normal), default=1)
        step = min(slack / biggest, Fraction(1))
        frame = [p]
        for i in range(self.dim):
            q = list(p)
            q[i] += step
            frame.append(tuple(q))
        return frame

    def cells_containing(self, x: Sequence) -> list[int]:
        return [c.id for c in self.cells if c.contains(x)]

    def locate(self, x: Sequence) -> int:
        return locate(self, x)

    def adjacency(self) -> dict[int, list[tuple[int, int]]]:
        """``cell -> [(neighbor, facet)]`` for the dual graph."""
        out: dict[int, list[tuple[int, int]]] = {c.id: [] for c in self.cells}
        for f in self.facets:
            out[f.pos].append((f.neg, f.id))
            out[f.neg].append((f.pos, f.id))
        return out

    def is_connected(self) -> bool:
        if not self.cells:
            return False
        adj = self.adjacency()
        seen = {0}
        queue = deque([0])
        while queue:
            for nb, _ in adj[queue.popleft()]:
                if nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
        return len(seen) == len(self.cells)

    @functools.cached_property
    def codim2(self) -> tuple[Codim2Face, ...]:
        return _codim2_faces(self)


def locate(c: Complex, x: Sequence[RatLike]) -> int:
    """Lowest-id cell containing ``x``."""
    if len(x) != c.dim:
        raise DimMismatch(f"point has {len(x)} coordinates, complex has dimension {c.dim}")
    point = [rat(v) for v in x]
    for cell in c.cells:
        if cell.contains(point):
            return cell.id
    raise ValidationError(f"no cell contains {point}; the complex is not complete")


def _codim2_faces(c: Complex) -> tuple[Codim2Face, ...]:
    if c.dim < 2:
        return ()
    done: set[tuple[int, frozenset[Halfspace]]] = set()
    faces: list[Codim2Face] = []
    problems: list[str] = []
    for cell in c.cells:
        hs = cell.halfspaces
        for i, j in itertools.combinations(range(len(hs)), 2):
            key = (cell.id, frozenset((hs[i], hs[j])))
            if key in done:
                continue
            others = [h for k, h in enumerate(hs) if k not in (i, j)]
            found = interior_point(c.dim, others, [hs[i].hyperplane, hs[j].hyperplane])
            if found is None:
                continue
            p = found[0]
            star = c.cells_containing(p)
            for q in star:
                tight = frozenset(h for h in c.cells[q].halfspaces if h.slack(p) == 0)
                done.add((q, tight))
            cyc = _cycle(c, star, p)
            if cyc is None:
                problems.append(f"star around {p} is not a single cycle")
                continue
            faces.append(Codim2Face(len(faces), p, cyc[0], cyc[1]))
    if problems:
        raise ValidationError(problems)
    return tuple(faces)


def _cycle(c: Complex, star: list[int], p: Vector) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    members = set(star)
    links: dict[int, list[tuple[int, int]]] = {s: [] for s in star}
    for s in star:
        for fid in c.cell_facets[s]:
            f = c.facets[fid]
            other = f.other(s)
            if other in members and f.hyperplane.contains(p):
                links[s].append((other, fid))
    if len(star) < 3 or any(len(v) != 2 for v in links.values()):
        return None
    start = min(star)
    cells, facets = [start], []
    nxt, fid = min(links[start], key=lambda t: t[1])
    facets.append(fid)
    prev, cur = start, nxt
    while cur != start:
        cells.append(cur)
        (a, fa), (b, fb) = links[cur]
        nxt, fid = (a, fa) if (b, fb) == (prev, facets[-1]) else (b, fb)
        facets.append(fid)
        prev, cur = cur, nxt
    if len(cells) != len(star):
        return None
    return tuple(cells), tuple(facets)


# -- construction ------------------------------------------------------------


def match_facets(dim: int, cells: Sequence[Cell]) -> list[Facet]:
    """Pair up the facets of a face-to-face family of cells covering the space."""
    facets: list[Facet] = []
    seen: set[tuple[int, Hyperplane]] = set()
    problems = []
    for cell in cells:
        for k, h in enumerate(cell.halfspaces):
            hyp = h.hyperplane
            if (cell.id, hyp) in seen:
                continue
            others = [g for i, g in enumerate(cell.halfspaces) if i != k]
            found = interior_point(dim, others, [hyp])
            if found is None:
                problems.append(f"halfspace {k} of cell {cell.id} does not define a facet")
                continue
            p = found[0]
            nbrs = [q.id for q in cells if q.id != cell.id and q.contains(p)]
            if len(nbrs) != 1:
                problems.append(f"facet {k} of cell {cell.id} is shared by {len(nbrs) + 1} cells")
                continue
            other = cells[nbrs[0]]
            if h.flipped() not in other.halfspaces:
                problems.append(f"cells {cell.id} and {other.id} do not meet face to face")
                continue
            pos, neg = (cell.id, other.id) if h == hyp.positive() else (other.id, cell.id)
            facets.append(Facet(len(facets), hyp, pos, neg))
            seen.add((cell.id, hyp))
            seen.add((other.id, hyp))
    if problems:
        raise ValidationError(problems)
    return facets


def from_cells(
    dim: int, cells: Sequence[Sequence[Halfspace]], labels: Sequence[str] | None = None, name: str = ""
) -> Complex:
    """Build a complex from the halfspace lists of its cells (redundancy is removed)."""
    built = [
        Cell(i, irredundant(dim, hs), labels[i] if labels else "") for i, hs in enumerate(cells)
    ]
    return Complex(dim, built, match_facets(dim, built), name=name)


def whole_space(dim: int) -> Complex:
    return Complex(dim, [Cell(0, ())], [], name="R^%d" % dim)


@dataclass(frozen=True)
class Refinement:
    complex: Complex
    ancestry: dict[int, int] = field(default_factory=dict)


def refine(c: Complex, hyperplanes: Iterable[Hyperplane | tuple]) -> Refinement:
    """Common refinement of ``c`` with a set of hyperplanes, with ancestry."""
    hyps = list(dict.fromkeys(_as_hyperplane(h, c.dim) for h in hyperplanes))
    pieces: list[tuple[int, tuple[Halfspace, ...]]] = [(cell.id, cell.halfspaces) for cell in c.cells]
    for hyp in hyps:
        split = []
        for parent, hs in pieces:
            plus = hs + (hyp.positive(),)
            minus = hs + (hyp.negative(),)
            if interior_point(c.dim, plus) and interior_point(c.dim, minus):
                split.append((parent, plus))
                split.append((parent, minus))
            else:
                split.append((parent, hs))
        pieces = split
    cells = [Cell(i, irredundant(c.dim, hs)) for i, (_, hs) in enumerate(pieces)]
    new = Complex(c.dim, cells, match_facets(c.dim, cells), name=c.name)
    return Refinement(new, {i: parent for i, (parent, _) in enumerate(pieces)})


def arrangement_complex(hyperplanes: Iterable[Hyperplane | tuple], dim: int, caps: Caps | None = None) -> Complex:
    """Cells of a hyperplane arrangement (all feasible full-dimensional sign vectors)."""
    caps = get_caps(caps)
    hyps = list(dict.fromkeys(_as_hyperplane(h, dim) for h in hyperplanes))
    caps.check("arrangement_dim", dim)
    caps.check("arrangement_hyperplanes", len(hyps))
    return refine(whole_space(dim), hyps).complex


def _as_hyperplane(h: Hyperplane | tuple, dim: int) -> Hyperplane:
    hyp = h if isinstance(h, Hyperplane) else Hyperplane.make(h[0], h[1])
    if len(hyp.normal) != dim:
        raise DimMismatch(f"hyperplane normal of length {len(hyp.normal)} in dimension {dim}")
    return hyp


def is_coarsening(coarse: Complex, fine: Complex) -> bool:
    """True when every cell of ``fine`` lies inside a cell of ``coarse``."""
    if coarse.dim != fine.dim:
        return False
    for cell in fine.cells:
        host = coarse.cells[locate(coarse, fine.interior(cell.id))]
        if not all(implies(fine.dim, cell.halfspaces, h) for h in host.halfspaces):
            return False
    return True


# -- fans built from rays ----------------------------------------------------


def _angle_key(v: Sequence[int]):
    """Sort key for directions in the plane by angle in [0, 2 pi)."""
    x, y = v
    t = Fraction(x, abs(x) + abs(y))
    if y > 0 or (y == 0 and x > 0):
        return 0, -t
    return 1, t


def _cross2(u: Sequence, v: Sequence):
    return u[0] * v[1] - u[1] * v[0]


def fan2d(rays: Iterable[Sequence[int]], name: str = "") -> Complex:
    """Complete fan in the plane from its rays; consecutive gaps must be below pi."""
    dirs = sorted({tuple(_primitive_dir(r)) for r in rays}, key=_angle_key)
    if len(dirs) < 3:
        raise ValidationError("a complete planar fan needs at least three rays")
    m = len(dirs)
    for k in range(m):
        u, w = dirs[k], dirs[(k + 1) % m]
        if _cross2(u, w) <= 0:
            raise ValidationError(f"gap between rays {u} and {w} is not below pi")
    cells = []
    for k in range(m):
        u, w = dirs[k], dirs[(k + 1) % m]
        cells.append(
            Cell(k, (Halfspace.make((-u[1], u[0]), 0), Halfspace.make((w[1], -w[0]), 0)), f"{u}..{w}")
        )
    facets = []
    for k in range(m):
        hyp = Hyperplane.make((-dirs[k][1], dirs[k][0]), 0)
        before, after = (k - 1) % m, k
        pos, neg = (after, before) if hyp.positive() in cells[after].halfspaces else (before, after)
        facets.append(Facet(k, hyp, pos, neg))
    return Complex(2, cells, facets, name=name or "fan2d")


def fan_rays2d(c: Complex) -> dict[int, tuple[int, int]]:
    """``facet id -> ray direction`` for a planar fan through the origin."""
    out = {}
    for f in c.facets:
        nu = f.hyperplane.normal
        ray = (nu[1], -nu[0])
        if not c.cells[f.pos].contains(ray):
            ray = (-ray[0], -ray[1])
        out[f.id] = ray
    return out


def _primitive_dir(v: Sequence[RatLike]) -> tuple[int, ...]:
    from .rational import integer_direction

    return integer_direction(v)


def _cross3(u: Sequence, v: Sequence) -> tuple:
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def quotient_frame(ray: Sequence[int]) -> tuple[tuple, tuple]:
    """Integer basis ``(u, v)`` of the plane orthogonal to ``ray``, counterclockwise seen from its tip."""
    for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        u = _cross3(ray, e)
        if any(u):
            return u, _cross3(ray, u)
    raise ValidationError("zero ray")


def fan3d(rays: Sequence[Sequence[int]], cones: Iterable[tuple[int, int]], name: str = "") -> Complex:
    """Complete pointed fan in R^3 from its rays and two-dimensional cones.

    The 2-cones must form the edge graph of a subdivision of the sphere
    into convex spherical polygons; each region becomes a cell.
    """
    rays = [tuple(_primitive_dir(r)) for r in rays]
    edges = {tuple(sorted(e)) for e in cones}
    around: dict[int, list[int]] = {i: [] for i in range(len(rays))}
    for a, b in edges:
        around[a].append(b)
        around[b].append(a)
    order: dict[int, list[int]] = {}
    for i, nbrs in around.items():
        u, v = quotient_frame(rays[i])
        order[i] = sorted(nbrs, key=lambda j: _angle_key((dot(u, rays[j]), dot(v, rays[j]))))
    used: set[tuple[int, int]] = set()
    regions: list[list[int]] = []
    for a, b in sorted(edges | {(b, a) for a, b in edges}):
        if (a, b) in used:
            continue
        region = []
        x, y = a, b
        while (x, y) not in used:
            used.add((x, y))
            region.append(x)
            ring = order[y]
            z = ring[(ring.index(x) - 1) % len(ring)]
            x, y = y, z
        regions.append(region)
    cells = []
    for k, region in enumerate(regions):
        hs = []
        for i in range(len(region)):
            p, q = rays[region[i]], rays[region[(i + 1) % len(region)]]
            normal = _cross3(p, q)
            probe = [rays[r] for r in region if r not in (region[i], region[(i + 1) % len(region)])]
            sides = {(dot(normal, r) > 0) - (dot(normal, r) < 0) for r in probe}
            if sides == {-1}:
                normal = tuple(-v for v in normal)
            elif sides != {1}:
                raise ValidationError(f"region {region} is not a convex cone")
            hs.append(Halfspace.make(normal, 0))
        cells.append(Cell(k, tuple(hs), "cone" + str(tuple(region))))
    return Complex(3, cells, match_facets(3, cells), name=name or "fan3d")


# -- validation --------------------------------------------------------------


@dataclass
class ValidationReport:
    problems: list[str]

    @property
    def ok(self) -> bool:
        return not self.problems


def validate_complex(c: Complex) -> ValidationReport:
    """Check every defining property of a complete polyhedral complex."""
    problems: list[str] = []
    n = c.dim
    for cell in c.cells:
        if interior_point(n, cell.halfspaces) is None:
            problems.append(f"cell {cell.id} is not full-dimensional")
            continue
        if len(set(cell.halfspaces)) != len(cell.halfspaces):
            problems.append(f"cell {cell.id} repeats a halfspace")
        for k, h in enumerate(cell.halfspaces):
            others = cell.halfspaces[:k] + cell.halfspaces[k + 1 :]
            if implies(n, others, h):
                problems.append(f"halfspace {k} of cell {cell.id} is redundant")
    if problems:
        return ValidationReport(problems)
    listed: dict[tuple[int, Halfspace], int] = {}
    for f in c.facets:
        if f.pos == f.neg or not (0 <= f.pos < len(c.cells) and 0 <= f.neg < len(c.cells)):
            problems.append(f"facet {f.id} has bad cells {f.pos}, {f.neg}")
            continue
        if Hyperplane.make(f.hyperplane.normal, f.hyperplane.offset) != f.hyperplane:
            problems.append(f"facet {f.id} hyperplane is not canonical")
        P, Q = c.cells[f.pos], c.cells[f.neg]
        if f.hyperplane.positive() not in P.halfspaces:
            problems.append(f"facet {f.id}: cell {f.pos} is not on its positive side")
            continue
        if f.hyperplane.negative() not in Q.halfspaces:
            problems.append(f"facet {f.id}: cell {f.neg} is not on its negative side")
            continue
        for key in ((f.pos, f.hyperplane.positive()), (f.neg, f.hyperplane.negative())):
            if key in listed:
                problems.append(f"facets {listed[key]} and {f.id} repeat a cell facet")
            listed[key] = f.id
        eq = [f.hyperplane]
        p_rest = [h for h in P.halfspaces if h != f.hyperplane.positive()]
        q_rest = [h for h in Q.halfspaces if h != f.hyperplane.negative()]
        if not all(implies(n, p_rest, h, eq) for h in q_rest) or not all(
            implies(n, q_rest, h, eq) for h in p_rest
        ):
            problems.append(f"facet {f.id}: cells {f.pos} and {f.neg} do not share the whole facet")
    for cell in c.cells:
        for h in cell.halfspaces:
            if (cell.id, h) not in listed:
                problems.append(f"cell {cell.id} has an unmatched facet {h}")
    if problems:
        return ValidationReport(problems)
    adjacent = {(f.pos, f.neg) for f in c.facets} | {(f.neg, f.pos) for f in c.facets}
    for P, Q in itertools.combinations(c.cells, 2):
        if (P.id, Q.id) not in adjacent:
            problem = _face_intersection_problem(n, P, Q)
            if problem:
                problems.append(problem)
    if not c.is_connected():
        problems.append("dual graph is disconnected")
    if not problems:
        try:
            c.codim2
        except ValidationError as exc:
            problems.extend(exc.problems)
    return ValidationReport(problems)


def _face_intersection_problem(n: int, P: Cell, Q: Cell) -> str | None:
    both = list(P.halfspaces) + list(Q.halfspaces)
    implicit = implicit_equalities(n, both)
    if implicit is None:
        return None
    if not implicit:
        return f"cells {P.id} and {Q.id} overlap in their interiors"
    eqs = [both[i].hyperplane for i in implicit]
    rest = [h for i, h in enumerate(both) if i not in implicit]
    x = interior_point(n, rest, eqs)[0] if rest else _any_point(n, eqs)
    for A, B in ((P, Q), (Q, P)):
        face = [h.hyperplane for h in A.halfspaces if h.slack(x) == 0]
        if not all(implies(n, A.halfspaces, h, face) for h in B.halfspaces):
            return f"cells {P.id} and {Q.id} do not intersect in a common face"
    return None


def _any_point(n: int, eqs: Sequence[Hyperplane]) -> Vector:
    found = interior_point(n, [], eqs)
    assert found is not None
    return found[0]
