import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcsplit import fixtures
from dcsplit.cpwl import (
    CPWL,
    AffineMap,
    balance_residual,
    coarsen,
    from_weights,
    is_balanced,
    is_convex,
    max_affine,
    supports,
    weight_space,
    weights,
)
from dcsplit.errors import Discontinuous, EmptyList, NotBalanced
from dcsplit.geometry import arrangement_complex, fan2d

import oracles


def _random_max(seed, n, k):
    rng = random.Random(seed)
    maps = oracles.random_affine_maps(n, k, rng)
    return maps, max_affine(AffineMap.make(a, b) for a, b in maps)


def test_hinge_weights():
    c = arrangement_complex([((1,), 0)], 1)
    relu = CPWL.from_callable(c, lambda x: max(x[0], 0))
    assert list(weights(relu).values()) == [1]
    absval = CPWL.from_callable(c, lambda x: abs(x[0]))
    assert list(weights(absval).values()) == [2]
    assert list(weights(-absval).values()) == [-2]


def test_scaled_weight_uses_primitive_normal():
    # max(x + 2y, 0): the jump (1, 2) along the primitive normal (1, 2) scales to 1
    c = arrangement_complex([((1, 2), 0)], 2)
    f = CPWL.from_callable(c, lambda x: max(x[0] + 2 * x[1], 0))
    assert list(weights(f).values()) == [1]
    g = CPWL.from_callable(c, lambda x: max(3 * x[0] + 6 * x[1], 0))
    assert list(weights(g).values()) == [3]


def test_median_weights_alternate():
    f = fixtures.median()
    w = weights(f)
    s = supports(f)
    assert sorted(w.values()) == [-1, -1, -1, 1, 1, 1]
    assert len(s.plus) == 3 and len(s.minus) == 3
    assert is_balanced(w, f.complex)
    assert not is_convex(f)


def test_discontinuous_pieces_rejected():
    c = arrangement_complex([((1,), 0)], 1)
    with pytest.raises(Discontinuous):
        CPWL(c, {0: AffineMap.make([1], 0), 1: AffineMap.make([0], 1)})


def test_unbalanced_weights_rejected():
    c = fan2d([(1, 0), (0, 1), (-1, -1)])
    assert balance_residual({0: 1, 1: 1, 2: 1}, c) is None
    assert balance_residual({0: 1, 1: 2, 2: 1}, c) is not None
    with pytest.raises(NotBalanced):
        from_weights({0: 1, 1: 2, 2: 1}, c)


def test_weight_space_dimension_of_planar_fan():
    # balanced weights on m rays in the plane: m - 2 free parameters
    for rays in ([(1, 0), (0, 1), (-1, -1)], [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)]):
        c = fan2d(rays)
        assert len(weight_space(c).basis) == len(rays) - 2


@pytest.mark.parametrize("seed", range(15))
def test_max_affine_matches_direct_max(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    maps, f = _random_max(seed, n, rng.randint(1, 6))
    ref = oracles.max_of(maps)
    for x in oracles.random_points(n, 30, seed):
        assert f(x) == ref(x)
    assert is_convex(f)
    assert all(v > 0 for v in weights(f).values())


@pytest.mark.parametrize("seed", range(15))
def test_weights_round_trip(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    _, f = _random_max(seed, n, rng.randint(2, 6))
    g = from_weights(weights(f), f.complex)
    assert f.equals_modulo_affine(g)
    assert weights(g) == weights(f)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=6, max_size=6))
def test_weights_linear_and_round_trip_on_median_fan(coeffs):
    # any balanced combination on the median fan survives the round trip
    c = fixtures.median().complex
    basis = weight_space(c).basis
    omega = {k: sum(Fraction(a) * Fraction(v[k]) for a, v in zip(coeffs, basis)) for k in range(len(c.facets))}
    f = from_weights(omega, c)
    assert weights(f) == omega
    assert is_convex(f) == all(v >= 0 for v in omega.values())


def test_convexity_agrees_with_midpoint_oracle():
    f = fixtures.median()
    pts = oracles.grid(2, -2, 2, 1)
    midpoint_ok = all(
        f(tuple((a + b) / 2 for a, b in zip(p, q))) <= (f(p) + f(q)) / 2 for p in pts for q in pts
    )
    assert not midpoint_ok
    assert not is_convex(f)
    relu_sum = CPWL.from_callable(f.complex, lambda x: max(x[0], 0) + max(x[1], 0) + max(x[0], x[1]))
    assert is_convex(relu_sum)


def test_coarsen_counts_regions():
    # max(x, y, 0) on the refinement by the extra line x + y = 5
    c = arrangement_complex([((1, 0), 0), ((0, 1), 0), ((1, -1), 0), ((1, 1), 5)], 2)
    f = CPWL.from_callable(c, lambda x: max(x[0], x[1], 0))
    co = coarsen(f)
    assert co.piece_count == 3 == co.component_count
    assert len(c.cells) > 3


def test_max_affine_empty():
    with pytest.raises(EmptyList):
        max_affine([])


def test_linear_operations():
    f = fixtures.median()
    two = f + f
    assert weights(two) == {k: 2 * v for k, v in weights(f).items()}
    assert weights(3 * f) == weights(two + f)
    assert (f - f).equals(f * 0)
    shifted = f.add_affine(AffineMap.make([1, 1], 1))
    assert shifted.equals_modulo_affine(f)
    assert shifted((0, 0)) == f((0, 0)) + 1
