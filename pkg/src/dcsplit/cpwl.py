"""Continuous piecewise linear functions on a complete polyhedral complex.

A function stores one affine map per cell. Across a facet ``sigma`` with
canonical normal ``nu`` the pieces differ by ``lambda * (<nu, x> - c)``,
positive-side piece minus negative-side piece. The scalar ``lambda`` is the
scaled weight of ``sigma``: it is positive exactly where the function bends
convexly and it does not depend on which side is called positive.
"""

from __future__ import annotations

import weakref
from collections import deque
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from .errors import ComplexMismatch, DimMismatch, Discontinuous, NotBalanced, ValidationError
from .geometry import Complex, Halfspace, from_cells, interior_point, locate
from .linalg import AffineSolution, Echelon
from .rational import RatLike, Vector, dot, rat, vec

Weights = dict[int, Fraction]


@dataclass(frozen=True)
class AffineMap:
    a: tuple[Fraction, ...]
    b: Fraction

    @classmethod
    def make(cls, a: Iterable[RatLike], b: RatLike = 0) -> AffineMap:
        return cls(vec(a), rat(b))

    @classmethod
    def zero(cls, dim: int) -> AffineMap:
        return cls((Fraction(0),) * dim, Fraction(0))

    def __call__(self, x: Sequence) -> Fraction:
        return dot(self.a, x) + self.b

    def __add__(self, other: AffineMap) -> AffineMap:
        return AffineMap(tuple(p + q for p, q in zip(self.a, other.a)), self.b + other.b)

    def __sub__(self, other: AffineMap) -> AffineMap:
        return AffineMap(tuple(p - q for p, q in zip(self.a, other.a)), self.b - other.b)

    def __neg__(self) -> AffineMap:
        return AffineMap(tuple(-p for p in self.a), -self.b)

    def __mul__(self, k: RatLike) -> AffineMap:
        k = rat(k)
        return AffineMap(tuple(k * p for p in self.a), k * self.b)

    __rmul__ = __mul__


class CPWL:
    """A function given by one affine map per cell of ``complex``."""

    def __init__(self, complex: Complex, pieces: Mapping[int, AffineMap], check: bool = True):
        self.complex = complex
        self.pieces = {int(k): v for k, v in pieces.items()}
        if set(self.pieces) != {c.id for c in complex.cells}:
            raise ValidationError("pieces must be given for exactly the cells of the complex")
        for piece in self.pieces.values():
            if len(piece.a) != complex.dim:
                raise DimMismatch(f"affine map of length {len(piece.a)} in dimension {complex.dim}")
        if check:
            validate_continuity(self)

    @property
    def dim(self) -> int:
        return self.complex.dim

    def __repr__(self) -> str:
        return f"<CPWL on {self.complex!r}>"

    def __call__(self, x: Sequence[RatLike]) -> Fraction:
        return evaluate(self, x)

    def _same(self, other: CPWL) -> None:
        if not self.complex.same_as(other.complex):
            raise ComplexMismatch("functions live on different complexes")

    def __add__(self, other: CPWL) -> CPWL:
        self._same(other)
        return CPWL(self.complex, {k: p + other.pieces[k] for k, p in self.pieces.items()}, check=False)

    def __sub__(self, other: CPWL) -> CPWL:
        self._same(other)
        return CPWL(self.complex, {k: p - other.pieces[k] for k, p in self.pieces.items()}, check=False)

    def __neg__(self) -> CPWL:
        return CPWL(self.complex, {k: -p for k, p in self.pieces.items()}, check=False)

    def __mul__(self, k: RatLike) -> CPWL:
        return CPWL(self.complex, {i: p * k for i, p in self.pieces.items()}, check=False)

    __rmul__ = __mul__

    def add_affine(self, m: AffineMap) -> CPWL:
        return CPWL(self.complex, {k: p + m for k, p in self.pieces.items()}, check=False)

    def pullback(self, refined: Complex, ancestry: Mapping[int, int]) -> CPWL:
        """The same function written on a refinement of its complex."""
        return CPWL(refined, {new: self.pieces[old] for new, old in ancestry.items()}, check=False)

    def equals(self, other: CPWL) -> bool:
        self._same(other)
        return self.pieces == other.pieces

    def equals_modulo_affine(self, other: CPWL) -> bool:
        diff = self - other
        first = diff.pieces[0]
        return all(p == first for p in diff.pieces.values())

    @classmethod
    def from_callable(cls, complex: Complex, fn: Callable[[Vector], RatLike]) -> CPWL:
        """Interpolate an exact evaluator that is affine on every cell."""
        pieces = {}
        for cell in complex.cells:
            frame = complex.affine_frame(cell.id)
            values = [rat(fn(p)) for p in frame]
            step = frame[1][0] - frame[0][0]
            a = tuple((v - values[0]) / step for v in values[1:])
            pieces[cell.id] = AffineMap(a, values[0] - dot(a, frame[0]))
        return cls(complex, pieces)


def validate_continuity(f: CPWL) -> None:
    """Raise :class:`Discontinuous` naming the first facet where pieces disagree."""
    for facet in f.complex.facets:
        lam = _jump(f, facet.id)
        if lam is None:
            raise Discontinuous(facet.id)


def _jump(f: CPWL, facet_id: int) -> Fraction | None:
    facet = f.complex.facets[facet_id]
    nu, c = facet.hyperplane.normal, facet.hyperplane.offset
    diff = f.pieces[facet.pos] - f.pieces[facet.neg]
    lam = dot(diff.a, nu) / sum(v * v for v in nu)
    if any(d != lam * v for d, v in zip(diff.a, nu)) or diff.b != -lam * c:
        return None
    return lam


def evaluate(f: CPWL, x: Sequence[RatLike]) -> Fraction:
    point = vec(x)
    return f.pieces[locate(f.complex, point)](point)


def weights(f: CPWL) -> Weights:
    """Scaled facet weights of ``f``."""
    out = {}
    for facet in f.complex.facets:
        lam = _jump(f, facet.id)
        if lam is None:
            raise Discontinuous(facet.id)
        out[facet.id] = lam
    return out


def balancing_rows(c: Complex) -> list[dict[int, Fraction]]:
    """Linear conditions on facet weights, ``dim`` rows per codimension-2 face."""
    rows = []
    for face in c.codim2:
        per_coord: list[dict[int, Fraction]] = [{} for _ in range(c.dim)]
        for cell, fid in zip(face.cells, face.facets):
            facet = c.facets[fid]
            s = facet.sign(cell)
            for i, v in enumerate(facet.hyperplane.normal):
                if v:
                    per_coord[i][fid] = per_coord[i].get(fid, 0) + s * v
        rows.extend(r for r in per_coord if r)
    return rows


def balance_residual(omega: Mapping[int, RatLike], c: Complex) -> tuple[int, Vector] | None:
    """First codimension-2 face around which ``omega`` fails to telescope."""
    for face in c.codim2:
        total = [Fraction(0)] * c.dim
        for cell, fid in zip(face.cells, face.facets):
            facet = c.facets[fid]
            lam = rat(omega[fid]) * facet.sign(cell)
            if lam:
                for i, v in enumerate(facet.hyperplane.normal):
                    total[i] += lam * v
        if any(total):
            return face.id, tuple(total)
    return None


def is_balanced(omega: Mapping[int, RatLike], c: Complex) -> bool:
    return balance_residual(omega, c) is None


def from_weights(
    omega: Mapping[int, RatLike], c: Complex, gauge: AffineMap | None = None, base: int = 0
) -> CPWL:
    """The function with scaled weights ``omega`` whose piece on ``base`` is ``gauge``."""
    if set(omega) != {f.id for f in c.facets}:
        raise ValidationError("weights must be given for exactly the facets of the complex")
    bad = balance_residual(omega, c)
    if bad is not None:
        raise NotBalanced(*bad)
    omega = {k: rat(v) for k, v in omega.items()}
    pieces = {base: gauge if gauge is not None else AffineMap.zero(c.dim)}
    adj = c.adjacency()
    queue = deque([base])
    while queue:
        cur = queue.popleft()
        for nb, fid in adj[cur]:
            if nb in pieces:
                continue
            facet = c.facets[fid]
            step = AffineMap(facet.hyperplane.normal, -facet.hyperplane.offset) * omega[fid]
            pieces[nb] = pieces[cur] - step if cur == facet.pos else pieces[cur] + step
            queue.append(nb)
    if len(pieces) != len(c.cells):
        raise ValidationError("dual graph is disconnected")
    f = CPWL(c, pieces, check=False)
    for facet in c.facets:
        if _jump(f, facet.id) != omega[facet.id]:
            raise NotBalanced(None)
    return f


def is_convex(f: CPWL) -> bool:
    return all(w >= 0 for w in weights(f).values())


@dataclass(frozen=True)
class Supports:
    plus: frozenset[int]
    minus: frozenset[int]


def supports(f: CPWL) -> Supports:
    w = weights(f)
    return Supports(
        frozenset(k for k, v in w.items() if v > 0), frozenset(k for k, v in w.items() if v < 0)
    )


def is_strictly_compatible(f: CPWL) -> bool:
    return all(weights(f).values())


@dataclass(frozen=True)
class Coarsening:
    """Cells grouped into the connected regions on which ``f`` is one affine map."""

    partition: tuple[frozenset[int], ...]
    piece_count: int
    component_count: int


def coarsen(f: CPWL) -> Coarsening:
    w = weights(f)
    parent = list(range(len(f.complex.cells)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for facet in f.complex.facets:
        if w[facet.id] == 0:
            a, b = find(facet.pos), find(facet.neg)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, set[int]] = {}
    for i in range(len(parent)):
        groups.setdefault(find(i), set()).add(i)
    blocks = tuple(sorted((frozenset(g) for g in groups.values()), key=min))
    return Coarsening(blocks, len(blocks), len(set(f.pieces.values())))


_WEIGHT_SPACES: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def weight_space(c: Complex) -> AffineSolution:
    """Basis of the balanced weights, as a parametrization of their subspace."""
    if c not in _WEIGHT_SPACES:
        ech = Echelon(len(c.facets))
        for row in balancing_rows(c):
            ech.add({k: mpq(v) for k, v in row.items() if v})
        _WEIGHT_SPACES[c] = AffineSolution([mpq(0)] * len(c.facets), ech.nullspace())
    return _WEIGHT_SPACES[c]


def max_affine(maps: Iterable[AffineMap], name: str = "") -> CPWL:
    """``max`` of affine maps on its coarsest compatible complex."""
    distinct = list(dict.fromkeys(maps))
    if not distinct:
        from .errors import EmptyList

        raise EmptyList("max of an empty list")
    dim = len(distinct[0].a)
    cells, owners = [], []
    for i, g in enumerate(distinct):
        hs, dominated = [], False
        for j, h in enumerate(distinct):
            if j == i:
                continue
            if g.a == h.a:
                dominated = dominated or h.b > g.b
                continue
            hs.append(Halfspace.make([p - q for p, q in zip(g.a, h.a)], h.b - g.b))
        if not dominated and interior_point(dim, hs) is not None:
            cells.append(hs)
            owners.append(g)
    if len(cells) == 1:
        from .geometry import whole_space

        return CPWL(whole_space(dim), {0: owners[0]})
    c = from_cells(dim, cells, name=name or "max-affine")
    return CPWL(c, dict(enumerate(owners)))
