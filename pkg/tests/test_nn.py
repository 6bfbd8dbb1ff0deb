import math
import random
from fractions import Fraction

import pytest

from dcsplit import fixtures
from dcsplit.cpwl import CPWL, AffineMap, max_affine
from dcsplit.decomposition import solve_reduced
from dcsplit.errors import DecompositionMismatch, NotConvex, ParamsTooSmall, ValidationError, WrongDim
from dcsplit.geometry import arrangement_complex
from dcsplit.nn import (
    Layer,
    ReluNetwork,
    components,
    convex_1d,
    dc_network,
    depth_formula,
    evaluate_network,
    grouped_convex,
    max_tree,
    sample_points,
    stats,
    verify,
)

import oracles


def _random_convex(seed, n=None, k=None):
    rng = random.Random(seed)
    n = n or rng.randint(1, 3)
    k = k or rng.randint(1, 8)
    maps = oracles.random_affine_maps(n, k, rng)
    return maps, max_affine(AffineMap.make(a, b) for a, b in maps)


def test_evaluate_small_network():
    # relu(x) - relu(-x) = x
    net = ReluNetwork(1, (Layer(((1,), (-1,)), (0, 0), True), Layer(((1, -1),), (0,), False)))
    assert evaluate_network(net, ["-7/3"]) == Fraction(-7, 3)
    assert evaluate_network(net, [Fraction(5)], mode="float") == 5.0
    assert stats(net).depth == 2 and stats(net).size == 2 and stats(net).width == 2


def test_network_validation():
    with pytest.raises(ValidationError):
        ReluNetwork(1, (Layer(((1, 2),), (0,), False),))
    with pytest.raises(ValidationError):
        ReluNetwork(1, (Layer(((1,),), (0,), True),))


def test_max_tree_with_constant():
    # max(x, 0) needs a single hidden unit
    net = max_tree([AffineMap.make([1], 0), AffineMap.make([0], 0)])
    assert stats(net).size == 1
    assert stats(net).depth == 2
    for x in (-3, 0, 5):
        assert evaluate_network(net, [x]) == max(x, 0)


@pytest.mark.parametrize("k", [1, 2, 3, 5, 8])
def test_max_tree_depth(k):
    rng = random.Random(k)
    maps = oracles.random_affine_maps(2, k, rng)
    net = max_tree([AffineMap.make(a, b) for a, b in maps])
    ref = oracles.max_of(maps)
    for x in oracles.random_points(2, 30, k):
        assert evaluate_network(net, x) == ref(x)
    assert stats(net).depth == math.ceil(math.log2(k)) + 1


def test_convex_1d_sizes():
    c = arrangement_complex([((1,), t) for t in (-2, -1, 0, 1)], 1)
    # five pieces with slopes -2..2; one breakpoint is inactive, three hinges remain
    f = CPWL.from_callable(c, lambda x: max(-2 * x[0] - 3, -x[0] - 1, Fraction(0), x[0] - 1, 2 * x[0] - 2))
    net = convex_1d(f)
    assert stats(net).depth == 2
    assert stats(net).size == 3
    assert verify(net, f).passed
    absval = CPWL.from_callable(arrangement_complex([((1,), 0)], 1), lambda x: abs(x[0]))
    net = convex_1d(absval)
    assert stats(net).size == 2
    assert verify(net, absval).passed
    # max(x, 2x) has one breakpoint but no subset with the right slope sum: one extra unit
    m2 = CPWL.from_callable(arrangement_complex([((1,), 0)], 1), lambda x: max(x[0], 2 * x[0]))
    net = convex_1d(m2)
    assert stats(net).size == 2
    assert verify(net, m2).passed


def test_convex_1d_needs_dimension_one():
    with pytest.raises(WrongDim):
        convex_1d(fixtures.median() * 0)


def test_components_need_convexity():
    with pytest.raises(NotConvex):
        components(fixtures.median())


@pytest.mark.parametrize("seed", range(25))
def test_grouped_networks_on_random_convex(seed):
    maps, f = _random_convex(seed)
    k = len(components(f))
    n = f.dim
    for r in sorted({1, k}):
        s = -(-k // r)
        net = grouped_convex(f, r, s)
        assert verify(net, f, samples=100, seed=seed).passed
        assert stats(net).depth == depth_formula(n, r, s)
    ref = oracles.max_of(maps)
    net = grouped_convex(f, 1, k)
    for x in oracles.random_points(n, 20, seed + 99):
        assert evaluate_network(net, x) == ref(x)


def test_depth_formula_values():
    assert depth_formula(2, 1, 8) == 4
    assert depth_formula(3, 4, 2) == 4
    assert depth_formula(1, 1, 5) == 2
    assert depth_formula(1, 5, 1) == 5
    assert depth_formula(1, 2, 3) == 3


def test_params_too_small():
    _, f = _random_convex(3, n=2, k=6)
    k = len(components(f))
    with pytest.raises(ParamsTooSmall):
        grouped_convex(f, 1, k - 1)


@pytest.mark.parametrize("r,s", [(1, 3), (2, 2), (3, 1)])
def test_median_dc_network(r, s):
    f = fixtures.median()
    p = solve_reduced(f)
    net = dc_network(f, p, r, s)
    assert stats(net).depth == depth_formula(2, r, s) == 3
    report = verify(net, f, samples=100, seed=1)
    assert report.passed
    assert report.checked == 100 + len(f.complex.cells)
    assert evaluate_network(net, [2, 1]) == 1


def test_dc_network_rejects_wrong_pair():
    f = fixtures.median()
    p = solve_reduced(f)
    from dcsplit.decomposition import DecompPoint

    with pytest.raises(DecompositionMismatch):
        dc_network(f, DecompPoint(p.g, p.g), 1, 3)


def test_float_mode_verification():
    f = fixtures.median()
    net = dc_network(f, solve_reduced(f), 1, 3)
    assert verify(net, f, mode="float").passed


def test_sampling_is_seeded():
    assert sample_points(3, 5, seed=4) == sample_points(3, 5, seed=4)
    assert sample_points(3, 5, seed=4) != sample_points(3, 5, seed=5)
