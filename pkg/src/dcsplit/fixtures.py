"""Small named functions used by the tests, the acceptance suite and the CLI."""

from __future__ import annotations

import itertools
from fractions import Fraction

from .constructions import Polygon, WeightedFan2D
from .cpwl import CPWL
from .geometry import Complex, fan2d, fan3d
from .rational import Vector


def median_value(x: Vector) -> Fraction:
    return sorted([Fraction(0), x[0], x[1]])[1]


def median() -> CPWL:
    """Median of ``0, x1, x2`` on its six-ray fan."""
    c = fan2d([(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)], name="median")
    return CPWL.from_callable(c, median_value)


def tran_fan() -> WeightedFan2D:
    """Four rays with weights 1, 1, -1/3, -1/3; the input is filled with a zero ray at (-1,-1)."""
    return WeightedFan2D.make([(1, 0), (0, 1), (1, 2), (2, 1)], [1, 1, Fraction(-1, 3), Fraction(-1, 3)])


# -- the three-dimensional counterexample to polygon gluing -----------------

_E = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def _comb(*pairs: tuple[int, int]) -> tuple[int, int, int]:
    v = [0, 0, 0]
    for coef, i in pairs:
        v[i] += coef
    return tuple(v)


def counterexample_rays() -> list[tuple[int, int, int]]:
    rays = [tuple(-x for x in e) for e in _E] + list(_E)
    rays += [_comb((1, i), (1, j)) for i, j in itertools.combinations(range(3), 2)]
    rays += [_comb((1, i), (1, j), (2, k)) for i, j, k in _triples() if i < j]
    rays += [_comb((1, i), (2, j), (2, k)) for i, j, k in _triples() if j < k]
    rays.append((1, 1, 1))
    return rays


def _triples():
    return itertools.permutations(range(3))


def counterexample_cones() -> list[tuple[tuple[int, int, int], tuple[int, int, int], str]]:
    """Two-dimensional cones as ray pairs, tagged by family.

    Three zero-weight cones between the negative coordinate rays complete
    the listed cones to a subdivision of the sphere into convex regions.
    """
    neg = [tuple(-x for x in e) for e in _E]
    out = []
    seen = set()

    def add(a, b, tag):
        key = frozenset((a, b))
        if key not in seen:
            seen.add(key)
            out.append((a, b, tag))

    for i, j, k in _triples():
        e_i, e_k = _E[i], _E[k]
        p_jk = _comb((1, j), (1, k))
        q_k = _comb((1, i), (1, j), (2, k))
        r_i = _comb((1, i), (2, j), (2, k))
        add(e_i, neg[j], "e_i,-e_j")
        add(neg[i], q_k, "-e_i,(1,1,2)")
        add(neg[i], p_jk, "-e_i,e_j+e_k")
        add(e_k, q_k, "e_k,(1,1,2)")
        add(p_jk, q_k, "e_j+e_k,(1,1,2)")
        add(q_k, r_i, "(1,1,2),(1,2,2)")
        add(q_k, (1, 1, 1), "(1,1,2),(1,1,1)")
        add(r_i, (1, 1, 1), "(1,2,2),(1,1,1)")
        add(p_jk, r_i, "e_j+e_k,(1,2,2)")
        add(neg[i], neg[j], "-e_i,-e_j")
    return out


def counterexample_value(x: Vector) -> Fraction:
    inner = [min(x[i], x[j] - x[i]) for i, j in itertools.permutations(range(3), 2)]
    return max([Fraction(0)] + inner)


def counterexample_fan() -> Complex:
    rays = counterexample_rays()
    index = {r: n for n, r in enumerate(rays)}
    cones = [(index[a], index[b]) for a, b, _ in counterexample_cones()]
    return fan3d(rays, cones, name="gluing-counterexample")


def counterexample() -> CPWL:
    return CPWL.from_callable(counterexample_fan(), counterexample_value)


# Scaled weight per cone family, read off the listed Euclidean weights
# divided by the length of each cone's primitive normal.
COUNTEREXAMPLE_WEIGHTS = {
    "e_i,-e_j": Fraction(1),
    "-e_i,(1,1,2)": Fraction(-1),
    "-e_i,e_j+e_k": Fraction(2),
    "e_k,(1,1,2)": Fraction(1),
    "e_j+e_k,(1,1,2)": Fraction(1),
    "(1,1,2),(1,2,2)": Fraction(-1),
    "(1,1,2),(1,1,1)": Fraction(1),
    "(1,2,2),(1,1,1)": Fraction(1),
    "e_j+e_k,(1,2,2)": Fraction(0),
    "-e_i,-e_j": Fraction(0),
}

# The four polygons drawn for the counterexample, edge by edge.
COUNTEREXAMPLE_RAYS = {"rho1": (0, 1, 1), "rho2": (1, 1, 2), "rho3": (1, 2, 1), "rho4": (1, 1, 1)}


def counterexample_polygons() -> list[Polygon]:
    def poly(name, *edges):
        return Polygon(name, tuple(e for e, _ in edges), tuple(tuple(Fraction(v) for v in vec) for _, vec in edges))

    return [
        poly("rho1", ("s1", (0, 2, -2)), ("s2", (1, -1, 1)), ("s3", (-1, -1, 1))),
        poly("rho3", ("s2", (-1, 1, -1)), ("s7", (1, 0, -1)), ("s8", (1, -1, 1)), ("s9", (-1, 0, 1))),
        poly(
            "rho4",
            ("s10", (1, -1, 0)),
            ("s11", (0, -1, 1)),
            ("s12", (-1, 0, 1)),
            ("s4", (-1, 1, 0)),
            ("s13", (0, 1, -1)),
            ("s9", (1, 0, -1)),
        ),
        poly("rho2", ("s5", (1, 1, -1)), ("s4", (-1, 1, 0)), ("s3", (-1, -1, 1)), ("s6", (1, -1, 0))),
    ]
