import random
from fractions import Fraction

import pytest

from dcsplit import fixtures
from dcsplit.config import Caps
from dcsplit.cpwl import CPWL, from_weights, is_convex, weight_space, weights
from dcsplit.decomposition import (
    DecompPoint,
    build,
    decompose_via_regular,
    enumerate_decompositions,
    is_irreducible,
    is_reduced,
    is_regular,
    is_vertex,
    minimal_set,
    solve_reduced,
    strictly_convex_function,
    unique_vertex_certificate,
)
from dcsplit.errors import CapExceeded, ComplexMismatch, DecompositionMismatch, NotConvex, ValidationError
from dcsplit.geometry import arrangement_complex, fan2d, fan_rays2d

import oracles

# random planar fans with at most six rays: small enough for the 3^m oracle
FANS = [
    [(1, 0), (0, 1), (-1, -1)],
    [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)],
    [(1, 0), (2, 1), (0, 1), (-1, 1), (-1, -2), (1, -3)],
    [(1, 0), (0, 1), (-1, 0), (0, -1)],
    [(3, 1), (-1, 2), (-2, -1), (1, -2), (1, 1)],
]


def _random_function(seed):
    rng = random.Random(seed)
    rays = FANS[seed % len(FANS)]
    c = fan2d(rays)
    basis = weight_space(c).basis
    coeffs = [Fraction(rng.randint(-3, 3)) for _ in basis]
    omega = {k: sum(a * Fraction(v[k]) for a, v in zip(coeffs, basis)) for k in range(len(c.facets))}
    return from_weights(omega, c)


def _oracle_vertices(f):
    rays = fan_rays2d(f.complex)
    wf = weights(f)
    m = len(f.complex.facets)
    return oracles.planar_decomposition_vertices([rays[k] for k in range(m)], [wf[k] for k in range(m)])


def test_median_has_single_vertex():
    f = fixtures.median()
    verts = enumerate_decompositions(f)
    assert len(verts) == 1
    p = verts[0]
    pts = oracles.grid(2, -2, 2, 1)
    assert oracles.differs_by_affine(p.g, lambda x: max(x[0] + x[1], x[0], x[1]), pts)
    assert oracles.differs_by_affine(p.h, lambda x: max(x[0], x[1], 0), pts)
    assert p.pieces() == (3, 3)
    assert is_vertex(p) and is_reduced(p) and is_irreducible(p)


@pytest.mark.parametrize("seed", range(20))
def test_enumeration_matches_oracle(seed):
    f = _random_function(seed)
    got = [tuple(p.weights_g[k] for k in range(len(f.complex.facets))) for p in enumerate_decompositions(f)]
    assert got == _oracle_vertices(f)


@pytest.mark.parametrize("seed", range(20))
def test_structural_properties(seed):
    f = _random_function(seed)
    p = solve_reduced(f)
    assert is_convex(p.g) and is_convex(p.h)
    assert (p.g - p.h).equals(f)
    assert is_vertex(p)
    assert is_reduced(p)
    verts = enumerate_decompositions(f)
    keys = {tuple(sorted(v.weights_g.items())) for v in verts}
    assert tuple(sorted(p.weights_g.items())) in keys
    for q in minimal_set(f):
        assert tuple(sorted(q.weights_g.items())) in keys
    for v in verts:
        assert is_vertex(v)


@pytest.mark.parametrize("seed", range(8))
def test_one_dimensional_sign_split(seed):
    rng = random.Random(seed)
    m = rng.randint(1, 6)
    ts = sorted(rng.sample(range(-10, 11), m))
    jumps = [Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3)) for _ in ts]
    hinge = oracles.hinge_sum_1d(jumps, ts)
    slope, const = Fraction(rng.randint(-2, 2)), Fraction(rng.randint(-2, 2))
    c = arrangement_complex([((1,), t) for t in ts], 1)
    f = CPWL.from_callable(c, lambda x: hinge(x[0]) + slope * x[0] + const)
    survivors, measured = oracles.sign_split_1d(lambda t: f((t,)), ts)
    assert measured == jumps
    assert len(survivors) == 1
    g_jumps, h_jumps = survivors[0]
    verts = enumerate_decompositions(f)
    assert len(verts) == 1
    p = verts[0]
    samples = [Fraction(k, 2) for k in range(-30, 31)]
    assert oracles.second_differences_equal(lambda t: p.g((t,)), oracles.hinge_sum_1d(g_jumps, ts), samples)
    assert oracles.second_differences_equal(lambda t: p.h((t,)), oracles.hinge_sum_1d(h_jumps, ts), samples)


def test_convex_function_splits_trivially():
    c = fan2d([(1, 1), (-1, 0), (0, -1)])
    f = CPWL.from_callable(c, lambda x: max(x[0], x[1], 0))
    p = solve_reduced(f)
    assert all(v == 0 for v in p.weights_h.values())
    assert enumerate_decompositions(f)[0].pieces() == (3, 1)


@pytest.mark.parametrize("seed", [1, 2])
def test_objective_reaches_every_vertex(seed):
    # penalizing the facets where a vertex leaves its lower bound makes that vertex optimal here
    f = _random_function(seed)
    wf = weights(f)
    m = len(wf)
    verts = enumerate_decompositions(f)
    assert len(verts) == 3
    keys = {tuple(sorted(v.weights_g.items())) for v in verts}
    reached = set()
    for v in verts:
        obj = [1 if v.weights_g[k] == max(0, wf[k]) else 1000 for k in range(m)]
        p = solve_reduced(f, obj)
        assert is_vertex(p)
        reached.add(tuple(sorted(p.weights_g.items())))
    assert reached == keys


def test_objective_must_be_positive():
    f = fixtures.median()
    with pytest.raises(ValidationError):
        solve_reduced(f, [1, 1, 0, 1, 1, 1])
    with pytest.raises(ValidationError):
        solve_reduced(f, [1, 1])


def test_non_vertex_and_non_reduced_points():
    f = fixtures.median()
    p = solve_reduced(f)
    phi = CPWL.from_callable(f.complex, lambda x: abs(x[0] - x[1]) + abs(x[0]) + abs(x[1]))
    q = DecompPoint(p.g + phi, p.h + phi)
    assert not is_reduced(q)
    assert not is_vertex(q)
    assert not is_irreducible(q)


def test_certificate_detects_mismatch():
    f = fixtures.median()
    p = solve_reduced(f)
    assert unique_vertex_certificate(f, p.g, p.h)
    with pytest.raises(DecompositionMismatch):
        unique_vertex_certificate(f, p.g, p.g)
    with pytest.raises(NotConvex):
        unique_vertex_certificate(f, f, f * 0)


def test_regular_route():
    f = fixtures.median()
    assert is_regular(f.complex)
    phi = strictly_convex_function(f.complex)
    assert all(v > 0 for v in weights(phi).values())
    p = decompose_via_regular(f)
    assert is_convex(p.g) and is_convex(p.h)
    assert (p.g - p.h).equals(f)
    with pytest.raises(ComplexMismatch):
        decompose_via_regular(f, CPWL.from_callable(fan2d([(1, 0), (0, 1), (-1, -1)]), lambda x: 0))


def test_build_shape():
    f = fixtures.median()
    dp = build(f)
    m = len(f.complex.facets)
    assert dp.polyhedron.num_ineqs == 2 * m
    assert dp.polyhedron.dim == m


def test_enumeration_cap():
    f = fixtures.median()
    with pytest.raises(CapExceeded):
        enumerate_decompositions(f, Caps(vertex_ineqs=4))
