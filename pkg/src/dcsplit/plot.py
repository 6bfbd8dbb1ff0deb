"""Static SVG drawings of planar complexes with their facet weights.

Convex breakpoints (positive weight) are solid blue, concave ones dashed
red, and zero-weight facets dotted grey.
"""

from __future__ import annotations

from collections.abc import Mapping
from fractions import Fraction
from xml.sax.saxutils import escape

from .cpwl import CPWL, weights
from .errors import WrongDim
from .geometry import Complex
from .rational import RatLike, rat

_STYLE = {
    1: 'stroke="#004c80" stroke-width="2"',
    -1: 'stroke="#cc3300" stroke-width="2" stroke-dasharray="8,5"',
    0: 'stroke="#888888" stroke-width="1" stroke-dasharray="2,4"',
}


def _segment(c: Complex, fid: int) -> tuple[tuple, Fraction | None, Fraction | None, tuple]:
    """Point, parameter bounds and direction of the facet's line piece."""
    facet = c.facets[fid]
    nu, off = facet.hyperplane.normal, facet.hyperplane.offset
    d = (Fraction(-nu[1]), Fraction(nu[0]))
    norm2 = nu[0] * nu[0] + nu[1] * nu[1]
    p0 = (Fraction(nu[0]) * off / norm2, Fraction(nu[1]) * off / norm2)
    lo: Fraction | None = None
    hi: Fraction | None = None
    for h in c.cells[facet.pos].halfspaces:
        rate = h.normal[0] * d[0] + h.normal[1] * d[1]
        base = h.normal[0] * p0[0] + h.normal[1] * p0[1] - h.offset
        if rate == 0:
            continue
        t = -base / rate
        if rate > 0:
            lo = t if lo is None else max(lo, t)
        else:
            hi = t if hi is None else min(hi, t)
    return p0, lo, hi, d


def svg_complex(c: Complex, omega: Mapping[int, RatLike], size: int = 480) -> str:
    if c.dim != 2:
        raise WrongDim("only planar complexes can be drawn")
    segs = [_segment(c, f.id) for f in c.facets]
    finite = [abs(float(p[i] + t * d[i])) for p, lo, hi, d in segs for t in (lo, hi) if t is not None for i in (0, 1)]
    R = max([2.0] + [1.5 * v + 1 for v in finite])
    scale = size / (2 * R)

    def screen(x: float, y: float) -> tuple[float, float]:
        return size / 2 + x * scale, size / 2 - y * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for f, (p, lo, hi, d) in zip(c.facets, segs):
        dx, dy = float(d[0]), float(d[1])
        reach = 4 * R / max(abs(dx), abs(dy))
        a = float(lo) if lo is not None else -reach
        b = float(hi) if hi is not None else reach
        x0, y0 = float(p[0]) + a * dx, float(p[1]) + a * dy
        x1, y1 = float(p[0]) + b * dx, float(p[1]) + b * dy
        x0, y0, x1, y1 = _clip(x0, y0, x1, y1, R)
        w = rat(omega[f.id])
        sign = (w > 0) - (w < 0)
        (sx0, sy0), (sx1, sy1) = screen(x0, y0), screen(x1, y1)
        parts.append(
            f'<line class="facet sign{sign:+d}" data-facet="{f.id}" x1="{sx0:.2f}" y1="{sy0:.2f}" '
            f'x2="{sx1:.2f}" y2="{sy1:.2f}" {_STYLE[sign]}/>'
        )
        # label near the far end when one end is unbounded, else the middle
        tx, ty = (sx1, sy1) if hi is None else ((sx0, sy0) if lo is None else ((sx0 + sx1) / 2, (sy0 + sy1) / 2))
        tx = min(max(tx, 14), size - 40)
        ty = min(max(ty, 14), size - 6)
        parts.append(f'<text x="{tx:.2f}" y="{ty:.2f}" font-size="13" font-family="sans-serif">{escape(str(w))}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _clip(x0: float, y0: float, x1: float, y1: float, R: float) -> tuple[float, float, float, float]:
    """Liang-Barsky clipping to the square ``[-R, R]^2``."""
    t0, t1 = 0.0, 1.0
    dx, dy = x1 - x0, y1 - y0
    for p, q in ((-dx, x0 + R), (dx, R - x0), (-dy, y0 + R), (dy, R - y0)):
        if p == 0:
            continue
        t = q / p
        if p < 0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
    if t0 > t1:
        return x0, y0, x0, y0
    return x0 + t0 * dx, y0 + t0 * dy, x0 + t1 * dx, y0 + t1 * dy


def svg_function(f: CPWL, size: int = 480) -> str:
    return svg_complex(f.complex, weights(f), size)
