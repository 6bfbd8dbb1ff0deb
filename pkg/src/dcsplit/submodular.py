"""Set functions, their Lovász extensions on the braid fan, and cut functions.

Subsets of ``{0, ..., n-1}`` are bitmasks. A :class:`SetFunction` stores the
normalized table (value 0 on the empty set) plus the constant it subtracted.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .config import Caps, get_caps
from .cpwl import CPWL, AffineMap, coarsen, is_convex
from .decomposition import DecompPoint, is_irreducible, is_reduced, is_vertex, solve_reduced
from .errors import ComplexMismatch, NotSubmodular, ValidationError
from .geometry import Cell, Complex, Facet, Halfspace, Hyperplane
from .rational import RatLike, Vector, rat, vec


@dataclass(frozen=True)
class SetFunction:
    n: int
    values: tuple[Fraction, ...]
    shift: Fraction = Fraction(0)

    @classmethod
    def make(cls, n: int, values: Mapping[int, RatLike] | Sequence[RatLike]) -> SetFunction:
        if isinstance(values, Mapping):
            missing = set(range(1 << n)) - {int(k) for k in values}
            if missing:
                raise ValidationError(f"set function table misses {len(missing)} subsets")
            table = [rat(values[k]) if k in values else rat(values[str(k)]) for k in range(1 << n)]
        else:
            table = [rat(v) for v in values]
        if len(table) != 1 << n:
            raise ValidationError(f"expected {1 << n} values, got {len(table)}")
        base = table[0]
        return cls(n, tuple(v - base for v in table), base)

    @classmethod
    def from_callable(cls, n: int, fn) -> SetFunction:
        return cls.make(n, [fn(frozenset(i for i in range(n) if mask >> i & 1)) for mask in range(1 << n)])

    def __call__(self, mask: int) -> Fraction:
        return self.values[mask] + self.shift

    def table(self) -> list[Fraction]:
        return [v + self.shift for v in self.values]

    def __sub__(self, other: SetFunction) -> SetFunction:
        return SetFunction(self.n, tuple(a - b for a, b in zip(self.values, other.values)), self.shift - other.shift)

    def __add__(self, other: SetFunction) -> SetFunction:
        return SetFunction(self.n, tuple(a + b for a, b in zip(self.values, other.values)), self.shift + other.shift)

    def __neg__(self) -> SetFunction:
        return SetFunction(self.n, tuple(-a for a in self.values), -self.shift)


def mask_of(subset: Iterable[int]) -> int:
    return sum(1 << i for i in set(subset))


def indicator(n: int, mask: int) -> Vector:
    return tuple(Fraction(mask >> i & 1) for i in range(n))


# -- braid fan -----------------------------------------------------------------


def braid_complex(n: int, caps: Caps | None = None) -> Complex:
    """Chambers ``x_{p(1)} <= ... <= x_{p(n)}`` of the braid arrangement, one per permutation."""
    get_caps(caps).check("braid_n", n)
    if n < 2:
        raise ValidationError("the braid fan needs n >= 2")
    perms = list(itertools.permutations(range(n)))
    index = {p: k for k, p in enumerate(perms)}
    cells = []
    for k, p in enumerate(perms):
        hs = []
        for i in range(n - 1):
            row = [0] * n
            row[p[i + 1]], row[p[i]] = 1, -1
            hs.append(Halfspace.make(row, 0))
        cells.append(Cell(k, tuple(hs), "<=".join(f"x{j + 1}" for j in p)))
    facets = []
    for k, p in enumerate(perms):
        for i in range(n - 1):
            q = list(p)
            q[i], q[i + 1] = q[i + 1], q[i]
            other = index[tuple(q)]
            if other < k:
                continue
            a, b = sorted((p[i], p[i + 1]))
            row = [0] * n
            row[a], row[b] = 1, -1
            hyp = Hyperplane.make(row, 0)
            # in p the later coordinate is the larger one
            pos, neg = (k, other) if p[i + 1] == a else (other, k)
            facets.append(Facet(len(facets), hyp, pos, neg))
    return Complex(n, cells, facets, name=f"braid({n})")


def _chain_of(c: Complex, cell: int) -> tuple[int, ...] | None:
    """Coordinates in decreasing order on a braid chamber, or None for other cells."""
    above: dict[int, int] = {}
    for h in c.cells[cell].halfspaces:
        nz = [(i, v) for i, v in enumerate(h.normal) if v]
        if h.offset != 0 or len(nz) != 2 or sorted(v for _, v in nz) != [-1, 1]:
            return None
        big = next(i for i, v in nz if v == 1)
        small = next(i for i, v in nz if v == -1)
        if small in above:
            return None
        above[small] = big
    tops = set(range(c.dim)) - set(above)
    if len(tops) != 1 or len(above) != c.dim - 1:
        return None
    below = {v: k for k, v in above.items()}
    chain = [tops.pop()]
    while chain[-1] in below:
        chain.append(below[chain[-1]])
    return tuple(chain) if len(chain) == c.dim else None


def lovasz(F: SetFunction, caps: Caps | None = None) -> CPWL:
    """The extension affine on every braid chamber that agrees with ``F`` on indicator vectors."""
    c = braid_complex(F.n, caps)
    pieces = {}
    for cell in c.cells:
        a = [Fraction(0)] * F.n
        prev = 0
        for j in _chain_of(c, cell.id):
            cur = prev | 1 << j
            a[j] = F.values[cur] - F.values[prev]
            prev = cur
        pieces[cell.id] = AffineMap(tuple(a), F.shift)
    return CPWL(c, pieces, check=False)


def lovasz_value(F: SetFunction, x: Sequence[RatLike]) -> Fraction:
    """Sort-based evaluation without building the fan."""
    get_caps().check("lovasz_n", F.n)
    x = vec(x)
    if len(x) != F.n:
        raise ValidationError(f"point of length {len(x)} for a set function on {F.n} elements")
    order = sorted(range(F.n), key=lambda i: -x[i])
    total, prev = F.shift, 0
    for j in order:
        cur = prev | 1 << j
        total += x[j] * (F.values[cur] - F.values[prev])
        prev = cur
    return total


def _is_braid(c: Complex) -> bool:
    if c.dim < 2 or len(c.cells) != math.factorial(c.dim):
        return False
    chains = {_chain_of(c, cell.id) for cell in c.cells}
    return None not in chains and len(chains) == len(c.cells)


def to_set_function(f: CPWL) -> SetFunction:
    """Restrict a function on the braid fan to the indicator vectors of subsets."""
    if not _is_braid(f.complex):
        raise ComplexMismatch("function is not defined on a braid fan")
    n = f.dim
    return SetFunction.make(n, [f(indicator(n, mask)) for mask in range(1 << n)])


# -- submodularity -------------------------------------------------------------


def is_submodular(F: SetFunction) -> bool:
    """Local test ``F(A+i) + F(A+j) >= F(A+i+j) + F(A)`` over all ``A`` and ``i, j`` outside it."""
    get_caps().check("lovasz_n", F.n)
    v = F.values
    for a in range(1 << F.n):
        outside = [i for i in range(F.n) if not a >> i & 1]
        for i, j in itertools.combinations(outside, 2):
            if v[a | 1 << i] + v[a | 1 << j] < v[a | 1 << i | 1 << j] + v[a]:
                return False
    return True


def is_modular(F: SetFunction) -> bool:
    singles = [F.values[1 << i] for i in range(F.n)]
    return all(F.values[m] == sum((singles[i] for i in range(F.n) if m >> i & 1), Fraction(0)) for m in range(1 << F.n))


@dataclass(frozen=True)
class SetDecomposition:
    G: SetFunction
    H: SetFunction
    point: DecompPoint
    vertex: bool
    reduced: bool
    irreducible: bool


def decompose_set_function(F: SetFunction, caps: Caps | None = None) -> SetDecomposition:
    """``F = G - H`` with ``G, H`` submodular via a reduced decomposition of the Lovász extension."""
    p = solve_reduced(lovasz(F, caps))
    G, H = to_set_function(p.g), to_set_function(p.h)
    # put the constant on G so that F = G - H holds on every subset
    H = SetFunction(H.n, H.values, Fraction(0))
    G = SetFunction(G.n, G.values, F.shift)
    return SetDecomposition(G, H, p, is_vertex(p), is_reduced(p), is_irreducible(p))


# -- graphs --------------------------------------------------------------------


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    edges: tuple[tuple[int, int, Fraction], ...]

    @classmethod
    def make(cls, n: int, edges: Iterable[Sequence]) -> WeightedGraph:
        out, seen = [], set()
        for u, v, w in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise ValidationError(f"bad edge ({u}, {v}) on {n} vertices")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValidationError(f"duplicate edge {key}")
            seen.add(key)
            out.append((key[0], key[1], rat(w)))
        return cls(n, tuple(out))


def cut_function(g: WeightedGraph) -> SetFunction:
    values = []
    for mask in range(1 << g.n):
        values.append(sum((w for u, v, w in g.edges if (mask >> u & 1) != (mask >> v & 1)), Fraction(0)))
    return SetFunction.make(g.n, values)


def cut_terms(g: WeightedGraph) -> list[tuple]:
    """The cut extension as a hyperplane function: ``sum_e w_e max(x_u - x_v, x_v - x_u)``."""
    terms = []
    for u, v, w in g.edges:
        a = [0] * g.n
        a[u], a[v] = 1, -1
        terms.append((w, a, 0, [-t for t in a], 0))
    return terms


def greedy_vertices(G: SetFunction) -> list[Vector]:
    """Distinct greedy vectors ``x_{p(i)} = G(S_i) - G(S_{i-1})`` over all orders ``p``."""
    if not is_submodular(G):
        raise NotSubmodular("greedy vertices need a submodular function")
    found = set()
    for p in itertools.permutations(range(G.n)):
        x = [Fraction(0)] * G.n
        prev = 0
        for j in p:
            cur = prev | 1 << j
            x[j] = G.values[cur] - G.values[prev]
            prev = cur
        found.add(tuple(x))
    return sorted(found)


def lovasz_pieces(G: SetFunction, caps: Caps | None = None) -> int:
    return coarsen(lovasz(G, caps)).piece_count


def is_convex_extension(F: SetFunction, caps: Caps | None = None) -> bool:
    return is_convex(lovasz(F, caps))
