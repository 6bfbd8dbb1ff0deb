"""Exact ReLU networks for convex CPWL functions and their differences.

Every network is a list of affine layers with ReLU on all but the last one.
Builders keep track of *signals*: affine forms over the current layer that
still have to be combined. A constant signal costs nothing to carry across a
ReLU layer; any other signal ``y`` is carried as ``ReLU(y) - ReLU(-y)``.
"""

from __future__ import annotations

import math
import random
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .cpwl import CPWL, AffineMap, is_convex
from .decomposition import DecompPoint
from .errors import DecompositionMismatch, DimMismatch, EmptyList, NotConvex, ParamsTooSmall, WrongDim
from .rational import RatLike, Vector, rat, vec


@dataclass(frozen=True)
class Layer:
    W: tuple[tuple[Fraction, ...], ...]
    b: tuple[Fraction, ...]
    relu: bool


@dataclass(frozen=True)
class ReluNetwork:
    input_dim: int
    layers: tuple[Layer, ...]

    def __post_init__(self):
        width = self.input_dim
        for i, layer in enumerate(self.layers):
            if any(len(row) != width for row in layer.W) or len(layer.b) != len(layer.W):
                raise DimMismatch(f"layer {i} does not chain with the previous width {width}")
            width = len(layer.W)
        if not self.layers or self.layers[-1].relu or width != 1:
            raise DimMismatch("the last layer must be affine with a single output")
        if any(not layer.relu for layer in self.layers[:-1]):
            raise DimMismatch("only the last layer may skip the ReLU")

    def __call__(self, x: Sequence[RatLike]) -> Fraction:
        return evaluate_network(self, x)


@dataclass(frozen=True)
class NetworkStats:
    depth: int
    width: int
    size: int


def stats(net: ReluNetwork) -> NetworkStats:
    hidden = [len(layer.W) for layer in net.layers[:-1]]
    return NetworkStats(len(net.layers), max(hidden, default=0), sum(hidden))


def evaluate_network(net: ReluNetwork, x: Sequence[RatLike], mode: str = "exact"):
    if len(x) != net.input_dim:
        raise DimMismatch(f"input of length {len(x)} for a network on {net.input_dim} inputs")
    if mode == "exact":
        cur: list = list(vec(x))
        zero = Fraction(0)
    elif mode == "float":
        cur = [float(v) for v in x]
        zero = 0.0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    for layer in net.layers:
        out = []
        for row, b in zip(layer.W, layer.b):
            if mode == "float":
                row, b = [float(v) for v in row], float(b)
            v = sum((w * c for w, c in zip(row, cur) if w), b)
            out.append(max(v, zero) if layer.relu else v)
        cur = out
    return cur[0]


# -- signals and the layer builder ---------------------------------------------


@dataclass(frozen=True)
class _Form:
    """``<coef, y> + const`` over the outputs ``y`` of the current layer."""

    coef: tuple[Fraction, ...]
    const: Fraction

    def __add__(self, other: _Form) -> _Form:
        return _Form(tuple(p + q for p, q in zip(self.coef, other.coef)), self.const + other.const)

    def __sub__(self, other: _Form) -> _Form:
        return self + other * -1

    def __mul__(self, k: RatLike) -> _Form:
        k = rat(k)
        return _Form(tuple(k * p for p in self.coef), k * self.const)

    @property
    def constant(self) -> bool:
        return not any(self.coef)


def _const(width: int, value: RatLike) -> _Form:
    return _Form((Fraction(0),) * width, rat(value))


def _unit(width: int, j: int) -> _Form:
    return _Form(tuple(Fraction(int(i == j)) for i in range(width)), Fraction(0))


# A request asks for some hidden units and says how to read its result from them.
_Request = tuple[list[_Form], Callable[[list[_Form]], _Form]]


class _Builder:
    def __init__(self, n: int):
        self.n = n
        self.width = n
        self.layers: list[Layer] = []

    def inputs(self, maps: Sequence[AffineMap]) -> list[_Form]:
        return [_Form(m.a, m.b) for m in maps]

    def relu_layer(self, requests: Sequence[_Request]) -> list[_Form]:
        units = [u for forms, _ in requests for u in forms]
        if not units:
            # keep the layer well formed: one dead unit
            units = [_const(self.width, 0)]
        self.layers.append(Layer(tuple(u.coef for u in units), tuple(u.const for u in units), True))
        self.width = len(units)
        out, pos = [], 0
        for forms, combine in requests:
            unit_forms = [_unit(self.width, pos + j) for j in range(len(forms))]
            pos += len(forms)
            out.append(combine(unit_forms))
        return out

    def finish(self, out: _Form) -> ReluNetwork:
        self.layers.append(Layer((out.coef,), (out.const,), False))
        return ReluNetwork(self.n, tuple(self.layers))


def _carry(y: _Form, new_width: Callable[[], int]) -> _Request:
    if y.constant:
        return [], lambda units: _const(new_width(), y.const)
    return [y, y * -1], lambda units: units[0] - units[1]


def _pair_max(p: _Form, q: _Form, new_width: Callable[[], int]) -> _Request:
    """``max(p, q) = ReLU(p - q) + q`` with ``q`` carried across the layer."""
    if p.constant and q.constant:
        return [], lambda units: _const(new_width(), max(p.const, q.const))
    if q.constant:
        return [p - q], lambda units: units[0] + _const(new_width(), q.const)
    if p.constant:
        return [q - p], lambda units: units[0] + _const(new_width(), p.const)
    diff = p - q
    if diff.constant:
        return _carry(p if diff.const >= 0 else q, new_width)
    return [diff, q, q * -1], lambda units: units[0] + units[1] - units[2]


# -- one-dimensional convex functions --------------------------------------------


def _envelope_1d(maps: Sequence[AffineMap]) -> tuple[list[Fraction], list[Fraction]]:
    """Breakpoints ``t_1 < ... < t_m`` and slopes ``a_0 < ... < a_m`` of ``max`` of lines."""
    best: dict[Fraction, Fraction] = {}
    for m in maps:
        a = m.a[0]
        best[a] = max(best.get(a, m.b), m.b)
    lines = sorted(best.items())
    hull: list[tuple[Fraction, Fraction]] = []
    for a, b in lines:
        while hull:
            a1, b1 = hull[-1]
            if len(hull) >= 2:
                a0, b0 = hull[-2]
                # the middle line never wins once the new one crosses the left one earlier
                if (b0 - b) * (a1 - a0) <= (b0 - b1) * (a - a0):
                    hull.pop()
                    continue
            break
        hull.append((a, b))
    breaks = [(hull[i][1] - hull[i + 1][1]) / (hull[i + 1][0] - hull[i][0]) for i in range(len(hull) - 1)]
    return breaks, [a for a, _ in hull]


def _subset_with_sum(values: Sequence[Fraction], target: Fraction) -> list[int] | None:
    reach: dict[Fraction, tuple[int, ...]] = {Fraction(0): ()}
    for i, v in enumerate(values):
        for s, idx in list(reach.items()):
            reach.setdefault(s + v, idx + (i,))
    hit = reach.get(target)
    return list(hit) if hit is not None else None


def _convex_1d_request(maps: Sequence[AffineMap], x: _Form, new_width: Callable[[], int]) -> _Request:
    """One ReLU layer computing ``max`` of lines in one variable ``x``.

    With breakpoints ``t_i`` and slope jumps ``d_i`` the function is
    ``sum_i d_i ReLU(s_i (x - t_i)) + const`` where the units with ``s_i = -1``
    must account for the leftmost slope. When no subset of jumps does, one
    extra unit at the first breakpoint supplies the linear part.
    """
    breaks, slopes = _envelope_1d(maps)
    value = lambda t: max(m.a[0] * t + m.b for m in maps)  # noqa: E731
    if not breaks:
        a = slopes[0]
        b = value(Fraction(0))
        if a == 0:
            return [], lambda units: _const(new_width(), b)
        return _carry(x * a + _const(len(x.coef), b), new_width)
    jumps = [slopes[i + 1] - slopes[i] for i in range(len(breaks))]
    width = len(x.coef)
    flipped = _subset_with_sum(jumps, -slopes[0]) if len(jumps) <= 20 else None
    units, coefs, spec = [], [], []
    if flipped is not None:
        for i, (t, d) in enumerate(zip(breaks, jumps)):
            s = -1 if i in flipped else 1
            units.append((x - _const(width, t)) * s)
            coefs.append(d)
            spec.append((s, t))
    else:
        t1 = breaks[0]
        units.append(x - _const(width, t1))
        coefs.append(slopes[1])
        spec.append((1, t1))
        units.append((x - _const(width, t1)) * -1)
        coefs.append(-slopes[0])
        spec.append((-1, t1))
        for t, d in zip(breaks[1:], jumps[1:]):
            units.append(x - _const(width, t))
            coefs.append(d)
            spec.append((1, t))
    probe = breaks[0]
    offset = value(probe) - sum((c * max(s * (probe - t), Fraction(0)) for c, (s, t) in zip(coefs, spec)), Fraction(0))

    def combine(us: list[_Form]) -> _Form:
        out = _const(new_width(), offset)
        for u, c in zip(us, coefs):
            out = out + u * c
        return out

    return units, combine


# -- scheduled max trees ---------------------------------------------------------


def _clog2(k: int) -> int:
    return 0 if k <= 1 else math.ceil(math.log2(k))


class _MaxPlan:
    """Maxima of groups of affine maps, then the maximum of the group results.

    Stage one takes ``inner`` layers (pairwise tree, or a single layer in one
    variable), stage two ``outer`` layers; lanes that finish early are
    carried so that the depth always matches the schedule.
    """

    def __init__(self, b: _Builder, groups: Sequence[Sequence[AffineMap]], inner: int, outer: int, one_d: bool):
        self.b = b
        self.lanes = [b.inputs(g) for g in groups]
        self.groups = [list(g) for g in groups]
        self.inner, self.outer, self.one_d = inner, outer, one_d
        self.step_no = 0

    @property
    def steps(self) -> int:
        return self.inner + self.outer

    def requests(self) -> list[_Request]:
        if self.step_no == self.inner:
            self.lanes = [[y for lane in self.lanes for y in lane]]
        nw = lambda: self.b.width  # noqa: E731
        reqs: list[_Request] = []
        self._shape = []
        for li, lane in enumerate(self.lanes):
            if self.one_d and self.step_no == 0:
                x = _Form((Fraction(1),), Fraction(0))
                reqs.append(_convex_1d_request(self.groups[li], x, nw))
                self._shape.append(1)
                continue
            count = 0
            for i in range(0, len(lane) - 1, 2):
                reqs.append(_pair_max(lane[i], lane[i + 1], nw))
                count += 1
            if len(lane) % 2:
                reqs.append(_carry(lane[-1], nw))
                count += 1
            self._shape.append(count)
        return reqs

    def accept(self, outputs: list[_Form]) -> None:
        lanes, pos = [], 0
        for count in self._shape:
            lanes.append(outputs[pos : pos + count])
            pos += count
        self.lanes = lanes
        self.step_no += 1
        if self.step_no == self.inner:
            self.lanes = [[y for lane in self.lanes for y in lane]]

    def result(self) -> _Form:
        lanes = [y for lane in self.lanes for y in lane]
        assert len(lanes) == 1, "schedule too short for the groups"
        return lanes[0]


def _run(b: _Builder, plans: Sequence[_MaxPlan]) -> list[_Form]:
    depth = max((p.steps for p in plans), default=0)
    for p in plans:
        if p.steps != depth:
            raise ValueError("parallel branches must share a schedule length")
    if depth == 0:
        for p in plans:
            p.lanes = [[y for lane in p.lanes for y in lane]]
    for _ in range(depth):
        chunks = [p.requests() for p in plans]
        flat = [r for chunk in chunks for r in chunk]
        outputs = b.relu_layer(flat)
        pos = 0
        for p, chunk in zip(plans, chunks):
            p.accept(outputs[pos : pos + len(chunk)])
            pos += len(chunk)
    return [p.result() for p in plans]


def max_tree(components: Sequence[AffineMap], n: int | None = None) -> ReluNetwork:
    """``max`` of affine maps by a balanced tree of pairwise maxima, depth ``ceil(log2 k) + 1``."""
    if not components:
        raise EmptyList("max of an empty list")
    n = len(components[0].a) if n is None else n
    if any(len(m.a) != n for m in components):
        raise DimMismatch("components must share the input dimension")
    b = _Builder(n)
    plan = _MaxPlan(b, [components], _clog2(len(components)), 0, one_d=False)
    (out,) = _run(b, [plan])
    return b.finish(out)


def components(f: CPWL) -> list[AffineMap]:
    """Distinct affine maps of a convex function, in cell order."""
    if not is_convex(f):
        raise NotConvex("network builders need a convex function")
    return list(dict.fromkeys(f.pieces[c.id] for c in f.complex.cells))


def convex_1d(f: CPWL) -> ReluNetwork:
    """Depth-2 network for a convex function of one variable."""
    if f.dim != 1:
        raise WrongDim(f"convex_1d needs a function of one variable, got dimension {f.dim}")
    comps = components(f)
    b = _Builder(1)
    (out,) = _run(b, [_MaxPlan(b, [comps], 1, 0, one_d=True)])
    return b.finish(out)


def inner_depth(s: int, n: int) -> int:
    return 2 if n == 1 else _clog2(s) + 1


def depth_formula(n: int, r: int, s: int) -> int:
    return inner_depth(s, n) + _clog2(r)


def _groups(comps: Sequence[AffineMap], r: int, s: int) -> list[list[AffineMap]]:
    k = len(comps)
    if r < 1 or s < 1 or r * s < k:
        raise ParamsTooSmall(f"r*s = {r * s} is below the {k} affine components")
    count = min(r, k)
    base, extra = divmod(k, count)
    out, pos = [], 0
    for i in range(count):
        size = base + (i < extra)
        out.append(list(comps[pos : pos + size]))
        pos += size
    return out


def _convex_plan(b: _Builder, comps: Sequence[AffineMap], r: int, s: int) -> _MaxPlan:
    groups = _groups(comps, r, s)
    one_d = b.n == 1
    inner = 1 if one_d else _clog2(s)
    return _MaxPlan(b, groups, inner, _clog2(r), one_d)


def grouped_convex(f: CPWL, r: int, s: int) -> ReluNetwork:
    """``max`` over ``r`` groups of at most ``s`` components each, depth ``inner_depth(s, n) + ceil(log2 r)``."""
    b = _Builder(f.dim)
    (out,) = _run(b, [_convex_plan(b, components(f), r, s)])
    return b.finish(out)


def dc_network(f: CPWL, decomposition: DecompPoint, r: int, s: int) -> ReluNetwork:
    """Grouped networks for ``g`` and ``h`` side by side; the output layer subtracts them."""
    if f.dim != decomposition.g.dim:
        raise DimMismatch("decomposition does not match the function's dimension")
    for cell in decomposition.complex.cells:
        x = decomposition.complex.interior(cell.id)
        if decomposition.g(x) - decomposition.h(x) != f(x):
            raise DecompositionMismatch("g - h differs from f")
    b = _Builder(f.dim)
    g_out, h_out = _run(
        b,
        [_convex_plan(b, components(decomposition.g), r, s), _convex_plan(b, components(decomposition.h), r, s)],
    )
    return b.finish(g_out - h_out)


# -- verification ----------------------------------------------------------------


@dataclass
class VerifyReport:
    checked: int
    failures: list[tuple[Vector, Fraction, object]] = field(default_factory=list)
    mode: str = "exact"
    note: str = ""

    @property
    def passed(self) -> bool:
        return not self.failures


def sample_points(n: int, count: int, seed: int = 0, spread: int = 20, denom: int = 7) -> list[Vector]:
    rng = random.Random(seed)
    return [tuple(Fraction(rng.randint(-spread, spread), rng.randint(1, denom)) for _ in range(n)) for _ in range(count)]


def verify(net: ReluNetwork, f: CPWL, samples: int = 100, seed: int = 0, mode: str = "exact") -> VerifyReport:
    """Compare the network with ``f`` at seeded rational points and one interior point per cell."""
    if net.input_dim != f.dim:
        raise DimMismatch(f"network on {net.input_dim} inputs, function on R^{f.dim}")
    points = sample_points(f.dim, samples, seed) + [f.complex.interior(c.id) for c in f.complex.cells]
    report = VerifyReport(len(points), mode=mode)
    if f.dim >= 2:
        report.note = "inner builder is a pairwise max tree; depth follows ceil(log2 s) + 1 per group"
    for x in points:
        want = f(x)
        got = evaluate_network(net, x, mode)
        ok = got == want if mode == "exact" else math.isclose(got, float(want), rel_tol=1e-9, abs_tol=1e-9)
        if not ok:
            report.failures.append((x, want, got))
    return report
