import itertools
import math
import random
from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from dcsplit.config import Caps
from dcsplit.errors import CapExceeded, ValidationError, ZeroVector
from dcsplit.linalg import nullspace, rank, solve_affine
from dcsplit.lp import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    HPolyhedron,
    LinearProgram,
    enumerate_vertices,
    is_vertex,
    solve,
)
from dcsplit.rational import fmt, integer_direction, normalize_halfspace, primitive_normal, rat

import oracles

small = st.integers(-5, 5)


def test_rat_parses_strings_and_rejects_floats():
    assert rat("3/6") == Fraction(1, 2)
    assert rat(mpq(2, 4)) == Fraction(1, 2)
    assert fmt(Fraction(-2, 4)) == "-1/2"
    with pytest.raises(ValidationError):
        rat(0.5)
    with pytest.raises(ValidationError):
        rat("one half")


def test_primitive_normal_sign_and_gcd():
    assert primitive_normal(["-2/3", "4/3", 0]) == (1, -2, 0)
    assert integer_direction([-2, 4]) == (-1, 2)
    assert normalize_halfspace([Fraction(1, 2), 1], 3) == ((1, 2), Fraction(6))
    with pytest.raises(ZeroVector):
        primitive_normal([0, 0])


@given(st.lists(small, min_size=1, max_size=4).filter(any))
def test_primitive_normal_is_primitive(v):
    p = primitive_normal(v)
    assert math.gcd(*p) == 1
    assert next(x for x in p if x) > 0
    # parallel to v
    assert oracles.rank([list(v), list(p)]) == 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=5))
def test_rank_and_nullspace_match_oracle(rows):
    assert rank(rows) == oracles.rank(rows)
    basis = nullspace(rows, 4)
    assert len(basis) == 4 - oracles.rank(rows)
    for v in basis:
        assert all(sum(Fraction(a) * b for a, b in zip(r, v)) == 0 for r in rows)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=5), st.lists(small, min_size=5, max_size=5))
def test_solve_affine_solution_or_certificate(rows, rhs):
    rhs = rhs[: len(rows)]
    sol = solve_affine(rows, rhs, 3)
    if sol.consistent:
        for r, b in zip(rows, rhs):
            assert sum(Fraction(a) * x for a, x in zip(r, sol.x0)) == b
    else:
        y = sol.certificate
        for j in range(3):
            assert sum(yi * r[j] for yi, r in zip(y, rows)) == 0
        assert sum(yi * b for yi, b in zip(y, rhs)) == 1


def _box_poly(A, b):
    return HPolyhedron(len(A[0]), list(zip(A, b)))


def _random_bounded(rng, dim, extra):
    A, b = [], []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        A += [e, [-x for x in e]]
        b += [-rng.randint(1, 4), -rng.randint(1, 4)]
    for _ in range(extra):
        A.append([rng.randint(-3, 3) for _ in range(dim)])
        b.append(rng.randint(-6, 1))
    return A, b


@pytest.mark.parametrize("seed", range(25))
def test_lp_optimum_matches_brute_force_vertices(seed):
    rng = random.Random(seed)
    dim = rng.randint(1, 3)
    A, b = _random_bounded(rng, dim, rng.randint(0, 4))
    c = [rng.randint(-4, 4) for _ in range(dim)]
    verts = oracles.brute_vertices(A, b)
    res = solve(LinearProgram(_box_poly(A, b), c))
    if not verts:
        assert res.status == INFEASIBLE
        assert res.certificate.verify(_box_poly(A, b))
        return
    best = min(sum(Fraction(ci) * xi for ci, xi in zip(c, v)) for v in verts)
    assert res.status == OPTIMAL
    assert res.value == best


@pytest.mark.parametrize("seed", range(25))
def test_vertex_enumeration_matches_brute_force(seed):
    rng = random.Random(100 + seed)
    dim = rng.randint(1, 3)
    A, b = _random_bounded(rng, dim, rng.randint(0, 4))
    poly = _box_poly(A, b)
    got = enumerate_vertices(poly)
    assert got == oracles.brute_vertices(A, b)
    assert all(is_vertex(poly, v) for v in got)


def test_degenerate_pyramid_vertices():
    # apex of a square pyramid lies on four facets: degenerate for the simplex
    A = [[0, 0, 1], [1, 0, -1], [-1, 0, -1], [0, 1, -1], [0, -1, -1]]
    b = [0, -1, -1, -1, -1]
    got = enumerate_vertices(_box_poly(A, b))
    assert got == oracles.brute_vertices(A, b)
    assert len(got) == 5


def test_infeasible_certificate_verifies():
    poly = HPolyhedron(2, [([1, 0], 1), ([-1, 0], 0)])
    res = solve(LinearProgram(poly, [1, 1]))
    assert res.status == INFEASIBLE
    assert res.certificate.verify(poly)


def test_inconsistent_equalities_certificate():
    poly = HPolyhedron(2, [], eqs=[([1, 1], 1), ([2, 2], 3)])
    res = solve(LinearProgram(poly))
    assert res.status == INFEASIBLE
    assert res.certificate.verify(poly)


def test_unbounded_reports_ray():
    poly = HPolyhedron(2, [([1, 0], 0), ([0, 1], 0)])
    res = solve(LinearProgram(poly, [-1, 0]))
    assert res.status == UNBOUNDED
    assert res.ray[0] > 0 and res.ray[1] >= 0


def test_equality_constrained_optimum():
    # min x + 2y on x + y = 3, x, y >= 0
    poly = HPolyhedron(2, [([1, 0], 0), ([0, 1], 0)], eqs=[([1, 1], 3)])
    res = solve(LinearProgram(poly, [1, 2]))
    assert res.point == (3, 0)
    assert res.value == 3


def test_vertex_caps():
    A = [[1 if j == i else 0 for j in range(5)] for i in range(5)]
    poly = HPolyhedron(5, list(zip(A, [0] * 5)))
    with pytest.raises(CapExceeded):
        enumerate_vertices(poly, Caps(vertex_dim=4))
    with pytest.raises(CapExceeded):
        enumerate_vertices(poly, Caps(vertex_ineqs=4))


def test_cube_has_eight_vertices():
    A, b = [], []
    for i in range(3):
        e = [int(j == i) for j in range(3)]
        A += [e, [-x for x in e]]
        b += [0, -1]
    got = enumerate_vertices(_box_poly(A, b))
    assert got == sorted(tuple(Fraction(v) for v in p) for p in itertools.product((0, 1), repeat=3))
