"""Named decomposition constructions and the planar polygon-gluing system.

Every construction returns a :class:`DecompPoint` whose parts are convex
and whose difference is the input function, possibly on a refined complex.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .config import Caps, get_caps
from .cpwl import CPWL, AffineMap, Weights, from_weights, weights
from .decomposition import DecompPoint
from .errors import DecompositionMismatch, NotBalanced, ValidationError, WrongDim
from .geometry import (
    Complex,
    Halfspace,
    Hyperplane,
    _angle_key,
    _cross3,
    arrangement_complex,
    fan2d,
    fan_rays2d,
    from_cells,
    minimize,
    quotient_frame,
    refine,
    whole_space,
)
from .linalg import solve_affine
from .rational import RatLike, Vector, dot, integer_direction, rat, vec

# -- hyperplane extension ----------------------------------------------------


def hyperplane_extension(f: CPWL, caps: Caps | None = None) -> DecompPoint:
    """Refine by every convex-breakpoint hyperplane and spread its weight along it."""
    caps = get_caps(caps)
    c = f.complex
    wf = weights(f)
    total: dict[Hyperplane, Fraction] = {}
    for facet in c.facets:
        if wf[facet.id] > 0:
            total[facet.hyperplane] = total.get(facet.hyperplane, Fraction(0)) + wf[facet.id]
    caps.check("arrangement_dim", c.dim)
    caps.check("arrangement_hyperplanes", len(total))
    ref = refine(c, total)
    fine = ref.complex
    omega = {facet.id: total.get(facet.hyperplane, Fraction(0)) for facet in fine.facets}
    g = from_weights(omega, fine)
    h = g - f.pullback(fine, ref.ancestry)
    return DecompPoint(g, h, method="hyperplane_extension")


# -- local maxima ------------------------------------------------------------


def local_maxima_decomposition(f: CPWL, caps: Caps | None = None) -> DecompPoint:
    """``g = sum_i max_{j in M_i} f_j`` and ``h = max_i (g - g_i)``.

    ``M_i`` collects the pieces lying below ``f_i`` on the whole cell ``P_i``,
    decided by one exact LP per ordered pair.
    """
    c = f.complex
    maps = list(dict.fromkeys(f.pieces[cell.id] for cell in c.cells))
    below: list[tuple[AffineMap, ...]] = []
    for cell in c.cells:
        fi = f.pieces[cell.id]
        members = []
        for fj in maps:
            diff = fi - fj
            low = minimize(c.dim, diff.a, cell.halfspaces)
            if low is not None and low + diff.b >= 0:
                members.append(fj)
        below.append(tuple(members))

    hyps = []
    for p, q in itertools.combinations(maps, 2):
        if p.a != q.a:
            hyps.append(Hyperplane.make([x - y for x, y in zip(p.a, q.a)], q.b - p.b))
    arr = arrangement_complex(hyps, c.dim, caps) if hyps else whole_space(c.dim)

    def gi(i: int, x: Vector) -> Fraction:
        return max(m(x) for m in below[i])

    def g_fn(x: Vector) -> Fraction:
        return sum((gi(i, x) for i in range(len(below))), Fraction(0))

    def h_fn(x: Vector) -> Fraction:
        total = g_fn(x)
        return max(total - gi(i, x) for i in range(len(below)))

    g = CPWL.from_callable(arr, g_fn)
    h = CPWL.from_callable(arr, h_fn)
    target = CPWL.from_callable(arr, f)
    if not (g - h).equals(target):
        raise DecompositionMismatch("local maxima parts do not reproduce f")
    return DecompPoint(g, h, method="local_maxima")


# -- hyperplane functions ----------------------------------------------------


@dataclass(frozen=True)
class MaxTerm:
    """``coef * max(<a, x> + b, <c, x> + d)``."""

    coef: Fraction
    a: Vector
    b: Fraction
    c: Vector
    d: Fraction

    @classmethod
    def make(cls, coef: RatLike, a: Iterable[RatLike], b: RatLike, c: Iterable[RatLike], d: RatLike) -> MaxTerm:
        return cls(rat(coef), vec(a), rat(b), vec(c), rat(d))

    def __call__(self, x: Sequence) -> Fraction:
        return self.coef * max(dot(self.a, x) + self.b, dot(self.c, x) + self.d)


def hyperplane_function_value(terms: Sequence[MaxTerm], x: Sequence[RatLike]) -> Fraction:
    point = vec(x)
    return sum((t(point) for t in terms), Fraction(0))


def sign_split(terms: Sequence[MaxTerm | tuple], dim: int | None = None, caps: Caps | None = None) -> DecompPoint:
    """Split a signed sum of two-term maxima by the sign of each hyperplane's net coefficient.

    Each term is rewritten as an affine map plus a multiple of
    ``max(<nu, x> - c, 0)`` for a canonical hyperplane ``<nu, x> = c``; terms
    on a common hyperplane merge, so the result is the unique vertex.
    """
    terms = [t if isinstance(t, MaxTerm) else MaxTerm.make(*t) for t in terms]
    if dim is None:
        if not terms:
            raise ValidationError("dimension is required for an empty term list")
        dim = len(terms[0].a)
    if any(len(t.a) != dim or len(t.c) != dim for t in terms):
        raise WrongDim("term vectors must all have the ambient dimension")
    affine = AffineMap.zero(dim)
    mu: dict[Hyperplane, Fraction] = {}
    for t in terms:
        u, v = AffineMap(t.a, t.b), AffineMap(t.c, t.d)
        diff = u - v
        if not any(diff.a):
            affine = affine + (u if diff.b >= 0 else v) * t.coef
            continue
        hyp = Hyperplane.make(diff.a, -diff.b)
        kappa = _ratio(diff.a, hyp.normal)
        # max(u, v) = v + |kappa| max(<nu,x> - c, 0), minus |kappa| (<nu,x> - c) if kappa < 0
        affine = affine + v * t.coef
        if kappa < 0:
            affine = affine - AffineMap(hyp.normal, -hyp.offset) * (t.coef * -kappa)
        mu[hyp] = mu.get(hyp, Fraction(0)) + t.coef * abs(kappa)
    mu = {h: m for h, m in mu.items() if m}
    arr = arrangement_complex(mu, dim, caps) if mu else whole_space(dim)

    def hinge(hyp: Hyperplane, x: Vector) -> Fraction:
        return max(hyp.value(x), Fraction(0))

    g = CPWL.from_callable(arr, lambda x: affine(x) + sum((m * hinge(h, x) for h, m in mu.items() if m > 0), Fraction(0)))
    h = CPWL.from_callable(arr, lambda x: sum((-m * hinge(h, x) for h, m in mu.items() if m < 0), Fraction(0)))
    return DecompPoint(g, h, method="sign_split")


def _ratio(v: Sequence[Fraction], nu: Sequence[int]) -> Fraction:
    for p, q in zip(v, nu):
        if q:
            return Fraction(p) / q
    raise ValidationError("zero normal")


# -- order statistics --------------------------------------------------------


def _top(x: Sequence[Fraction], k: int) -> Fraction:
    return sum(sorted(x, reverse=True)[:k], Fraction(0))


def order_statistic(n: int, k: int, caps: Caps | None = None) -> tuple[CPWL, CPWL, CPWL]:
    """The k-th largest coordinate on its cells ``P_{i,U}`` with its canonical parts.

    ``P_{i,U}`` is where the coordinates in ``U`` (``|U| = k - 1``) are at least
    ``x_i`` and all others at most ``x_i``. Returns ``(f, g, h)`` with ``g`` the
    sum of the top ``k`` coordinates and ``h`` the sum of the top ``k - 1``.
    """
    caps = get_caps(caps)
    if not 1 <= k <= n:
        raise ValidationError(f"need 1 <= k <= n, got n={n}, k={k}")
    caps.check("order_stat_n", n)
    if n == 1:
        c = whole_space(1)
        f = CPWL(c, {0: AffineMap.make([1], 0)})
        return f, f, CPWL(c, {0: AffineMap.zero(1)})
    cells, labels, coords = [], [], []
    for i in range(n):
        rest = [j for j in range(n) if j != i]
        for upper in itertools.combinations(rest, k - 1):
            hs = []
            for j in rest:
                row = [0] * n
                if j in upper:
                    row[j], row[i] = 1, -1
                else:
                    row[i], row[j] = 1, -1
                hs.append(Halfspace.make(row, 0))
            cells.append(hs)
            labels.append(f"x{i + 1}|{{{','.join(str(u + 1) for u in upper)}}}")
            coords.append(i)
    c = from_cells(n, cells, labels, name=f"order-statistic({n},{k})")
    unit = [AffineMap.make([int(j == i) for j in range(n)], 0) for i in range(n)]
    f = CPWL(c, {cid: unit[i] for cid, i in enumerate(coords)})
    g = CPWL.from_callable(c, lambda x: _top(x, k))
    h = CPWL.from_callable(c, lambda x: _top(x, k - 1))
    return f, g, h


# -- planar fans and the two-dimensional minimal construction ----------------


def _rot90(v: Sequence) -> tuple:
    return (-v[1], v[0])


@dataclass(frozen=True)
class WeightedFan2D:
    """Rays of a complete planar fan in counterclockwise order with scaled weights.

    Balanced exactly when ``sum_i w_i * v_i = 0``, which is the same as the
    rotated edge vectors ``w_i * rot90(v_i)`` closing up.
    """

    rays: tuple[tuple[int, int], ...]
    weights: tuple[Fraction, ...]

    @classmethod
    def make(cls, rays: Iterable[Sequence[RatLike]], weights: Iterable[RatLike]) -> WeightedFan2D:
        """Normalize: primitive rays, merged duplicates, ccw order, zero-weight fill rays.

        A non-primitive ray ``k * v`` with weight ``w`` becomes ``v`` with weight
        ``k * w``, so the vector sum ``sum w_i v_i`` is unchanged.
        """
        merged: dict[tuple[int, int], Fraction] = {}
        for r, w in zip(rays, weights, strict=True):
            r = vec(r)
            d = integer_direction(r)
            if len(d) != 2:
                raise WrongDim("planar fan rays must have two coordinates")
            merged[d] = merged.get(d, Fraction(0)) + rat(w) * _ratio(r, d)
        if not merged:
            raise ValidationError("a planar fan needs at least one ray")
        while True:
            dirs = sorted(merged, key=_angle_key)
            fill = _gap_fill(dirs)
            if fill is None:
                break
            merged.setdefault(fill, Fraction(0))
        dirs = sorted(merged, key=_angle_key)
        return cls(tuple(dirs), tuple(merged[d] for d in dirs))

    def residual(self) -> tuple[Fraction, Fraction]:
        return (
            sum((w * v[0] for v, w in zip(self.rays, self.weights)), Fraction(0)),
            sum((w * v[1] for v, w in zip(self.rays, self.weights)), Fraction(0)),
        )

    def is_balanced(self) -> bool:
        return not any(self.residual())

    def edge_vectors(self) -> list[tuple[Fraction, Fraction]]:
        return [(w * -v[1], w * v[0]) for v, w in zip(self.rays, self.weights)]

    def complex(self) -> Complex:
        return fan2d(self.rays, name="fan2d")

    def facet_weights(self, c: Complex | None = None, values: Sequence[Fraction] | None = None) -> Weights:
        c = c or self.complex()
        values = self.weights if values is None else values
        by_ray = dict(zip(self.rays, values))
        return {fid: by_ray[ray] for fid, ray in fan_rays2d(c).items()}

    def function(self) -> CPWL:
        c = self.complex()
        return from_weights(self.facet_weights(c), c)


def _gap_fill(dirs: Sequence[tuple[int, int]]) -> tuple[int, int] | None:
    if len(dirs) == 1:
        return (-dirs[0][0], -dirs[0][1])
    for u, w in zip(dirs, dirs[1:] + dirs[:1]):
        cross = u[0] * w[1] - u[1] * w[0]
        if cross > 0:
            continue
        if cross == 0 and u[0] * w[0] + u[1] * w[1] < 0:
            return _rot90(u)
        return integer_direction((-(u[0] + w[0]), -(u[1] + w[1])))
    return None


@dataclass(frozen=True)
class TranResult:
    fan: WeightedFan2D
    new_ray: tuple[int, int] | None
    closing_weight: Fraction
    omega_g: tuple[Fraction, ...]
    omega_h: tuple[Fraction, ...]
    decomposition: DecompPoint


def tran2d_minimal(wf: WeightedFan2D) -> TranResult:
    """Minimal decomposition of a positively homogeneous planar function.

    The positive weights alone fail to close up by ``s = sum w+_i v_i``; a
    ray along ``-s`` with scaled weight ``|s| / |primitive(-s)|`` closes them.
    """
    if not wf.is_balanced():
        raise NotBalanced(None, wf.residual())
    plus = [max(w, Fraction(0)) for w in wf.weights]
    s = [sum((w * v[i] for v, w in zip(wf.rays, plus)), Fraction(0)) for i in range(2)]
    new_ray, t = None, Fraction(0)
    rays, wts, gw = list(wf.rays), list(wf.weights), plus
    if any(s):
        new_ray = integer_direction((-s[0], -s[1]))
        t = _ratio((-s[0], -s[1]), new_ray)
        if new_ray not in rays:
            rays.append(new_ray)
            wts.append(Fraction(0))
            gw = gw + [Fraction(0)]
        gw[rays.index(new_ray)] += t
    by_ray = dict(zip(rays, gw))
    fan = WeightedFan2D.make(rays, wts)
    omega_g = tuple(by_ray.get(r, Fraction(0)) for r in fan.rays)
    omega_h = tuple(a - b for a, b in zip(omega_g, fan.weights))
    c = fan.complex()
    f = from_weights(fan.facet_weights(c), c)
    g = from_weights(fan.facet_weights(c, omega_g), c)
    return TranResult(fan, new_ray, t, omega_g, omega_h, DecompPoint(g, g - f, method="tran2d"))


# -- polygon gluing in R^3 ---------------------------------------------------


@dataclass(frozen=True)
class Polygon:
    """A closed cyclic chain of edge vectors attached to one codimension-2 face.

    ``labels[i]`` names the facet behind ``edges[i]``; the closing edge has
    label ``None``. ``starts[i]`` is the offset of edge ``i`` from the base vertex.
    """

    face: object
    labels: tuple[object, ...]
    edges: tuple[Vector, ...]

    @property
    def starts(self) -> tuple[Vector, ...]:
        out, cur = [], (Fraction(0),) * len(self.edges[0]) if self.edges else ()
        for e in self.edges:
            out.append(cur)
            cur = tuple(p + q for p, q in zip(cur, e))
        return tuple(out)

    def is_closed(self) -> bool:
        return not any(sum(col, Fraction(0)) for col in zip(*self.edges)) if self.edges else True

    def segment_anchor(self, label: object) -> tuple[Vector, Vector]:
        """Offset of the lexicographically canonical endpoint of an edge, and the edge as a set direction."""
        i = self.labels.index(label)
        start, e = self.starts[i], self.edges[i]
        if next(v for v in e if v) < 0:
            return tuple(p + q for p, q in zip(start, e)), tuple(-v for v in e)
        return start, e


@dataclass
class GluingSystem:
    """Equations ``x_a + anchor_a(sigma) = x_b + anchor_b(sigma)`` over polygon placements."""

    faces: tuple[object, ...]
    dim: int
    rows: list[list[Fraction]] = field(default_factory=list)
    rhs: list[Fraction] = field(default_factory=list)
    constraints: list[tuple[object, object, object]] = field(default_factory=list)

    def verify_certificate(self, y: Sequence[RatLike]) -> bool:
        """Exact check of ``y^T A = 0`` and ``y^T b = 1``."""
        y = [rat(v) for v in y]
        if len(y) != len(self.rows):
            return False
        ncols = len(self.faces) * self.dim
        for j in range(ncols):
            if sum((yi * r[j] for yi, r in zip(y, self.rows) if r[j]), Fraction(0)):
                return False
        return sum((yi * b for yi, b in zip(y, self.rhs)), Fraction(0)) == 1

    def residual(self, placements: Mapping[object, Sequence[RatLike]]) -> list[Fraction]:
        x = [rat(v) for face in self.faces for v in placements[face]]
        return [dot(r, x) - b for r, b in zip(self.rows, self.rhs)]


@dataclass
class GluingResult:
    feasible: bool
    polygons: list[Polygon]
    system: GluingSystem
    placements: dict[object, Vector] | None = None
    certificate: tuple[Fraction, ...] | None = None


def glue_polygons(polygons: Sequence[Polygon]) -> GluingResult:
    """Translate the polygons so that equally labelled edges coincide, or certify that no translation works."""
    polygons = [p for p in polygons if p.edges]
    dims = {len(e) for p in polygons for e in p.edges}
    if len(dims) > 1:
        raise WrongDim("edge vectors of mixed dimension")
    dim = dims.pop() if dims else 0
    faces = tuple(p.face for p in polygons)
    system = GluingSystem(faces, dim)
    owners: dict[object, list[int]] = {}
    for k, p in enumerate(polygons):
        for label in p.labels:
            if label is not None:
                owners.setdefault(label, []).append(k)
    for label, ks in owners.items():
        for a, b in zip(ks, ks[1:]):
            sa, ea = polygons[a].segment_anchor(label)
            sb, eb = polygons[b].segment_anchor(label)
            if ea != eb:
                raise ValidationError(f"edge {label!r} differs between faces {faces[a]!r} and {faces[b]!r}")
            for i in range(dim):
                row = [Fraction(0)] * (len(faces) * dim)
                row[a * dim + i] += 1
                row[b * dim + i] -= 1
                system.rows.append(row)
                system.rhs.append(sb[i] - sa[i])
                system.constraints.append((label, faces[a], faces[b]))
    sol = solve_affine(system.rows, system.rhs, len(faces) * dim)
    if not sol.consistent:
        return GluingResult(False, polygons, system, certificate=tuple(Fraction(v) for v in sol.certificate))
    x = [Fraction(v) for v in sol.x0]
    placements = {face: tuple(x[k * dim : (k + 1) * dim]) for k, face in enumerate(faces)}
    return GluingResult(True, polygons, system, placements=placements)


def star_polygons(c: Complex, omega: Mapping[int, RatLike]) -> list[Polygon]:
    """One polygon per ray of a fan in R^3 from the positive weights around it.

    Each positive facet ``sigma`` contributes ``w(sigma) * nu_sigma`` oriented
    counterclockwise as seen from the tip of the ray; edges are ordered by
    direction and a closing edge is added when they do not sum to zero.
    """
    if c.dim != 3:
        raise WrongDim("polygon gluing needs a fan in R^3")
    out = []
    for face in c.codim2:
        r = face.point
        u, v = quotient_frame(integer_direction(r))
        entries = []
        for cell, fid in zip(face.cells, face.facets):
            w = rat(omega[fid])
            if w <= 0:
                continue
            facet = c.facets[fid]
            nu = facet.hyperplane.normal
            d = _into_facet(c, facet.pos, nu, r)
            sign = 1 if dot(nu, _cross3(r, d)) > 0 else -1
            entries.append((fid, tuple(Fraction(sign) * w * x for x in nu)))
        if not entries:
            out.append(Polygon(face.id, (), ()))
            continue
        close = tuple(-sum(col, Fraction(0)) for col in zip(*(e for _, e in entries)))
        if any(close):
            entries.append((None, close))
        entries.sort(key=lambda item: _angle_key((dot(u, item[1]), dot(v, item[1]))))
        out.append(Polygon(face.id, tuple(k for k, _ in entries), tuple(e for _, e in entries)))
    return out


def _into_facet(c: Complex, cell: int, nu: Sequence[int], r: Vector) -> tuple:
    """Direction orthogonal to ``r`` within the facet hyperplane pointing into the facet."""
    d = _cross3(r, nu)
    for h in c.cells[cell].halfspaces:
        if h.slack(r) == 0 and any(_cross3(h.normal, nu)):
            return d if dot(h.normal, d) > 0 else tuple(-x for x in d)
    raise ValidationError("codimension-2 face is not a boundary ray of the facet")


def polygon_gluing(c: Complex, omega: Mapping[int, RatLike]) -> GluingResult:
    """Assemble and solve the placement system for a fan in R^3 with weights ``omega``."""
    return glue_polygons(star_polygons(c, omega))
