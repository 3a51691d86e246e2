"""Static SVG pictures of successive hyperbolic minima.

Each plotted minimum z contributes two markers, at z and -z. For the last
two minima that have a successor, the hyperbola |z1 z2| = Π²(z) is drawn in
all four quadrants, clipped to the square |x| <= |successor|.

The linear view is scaled by the sup-norm of the last minimum. The log view
maps t to sign(t) * (log10|t| - floor), which keeps deep runs readable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from .exactreal import fraction_to_sci, log_magnitude
from .lattice import LatticePoint, MinimaSequence

_LN10 = Decimal(10).ln()
_QUADRANTS = ((1, 1), (-1, 1), (-1, -1), (1, -1))


class TooFewMinima(ValueError):
    pass


@dataclass(frozen=True)
class SvgOptions:
    width: int = 640
    height: int = 640
    samples: int = 200
    log_scale: bool = False


def _log10(x: Fraction) -> float:
    return float(log_magnitude(x).value / _LN10)


class _Linear:
    def __init__(self, scale: Fraction):
        self.scale = scale

    def coord(self, t: Fraction) -> float:
        return float(t / self.scale)

    def arc(self, pi2: Fraction, clip: Fraction, samples: int) -> list[tuple[float, float]]:
        # first-quadrant branch x*y = pi2, both coordinates at most clip
        lo, hi = pi2 / clip, clip
        if lo >= hi:
            return []
        pts = []
        for i in range(samples):
            x = lo + (hi - lo) * Fraction(i, max(samples - 1, 1))
            pts.append((self.coord(x), self.coord(pi2 / x)))
        return pts


class _SymLog:
    def __init__(self, floor: float, span: float):
        self.floor = floor
        self.span = span

    def coord(self, t: Fraction) -> float:
        if t == 0:
            return 0.0
        mag = max(0.0, _log10(abs(t)) - self.floor) / self.span
        return mag if t > 0 else -mag

    def arc(self, pi2: Fraction, clip: Fraction, samples: int) -> list[tuple[float, float]]:
        # in log coordinates the branch is the segment u + v = log10(pi2)
        lp, lc = _log10(pi2), _log10(clip)
        lo, hi = lp - lc, lc
        if lo >= hi:
            return []
        pts = []
        for i in range(samples):
            u = lo + (hi - lo) * i / max(samples - 1, 1)
            pts.append((max(0.0, u - self.floor) / self.span, max(0.0, lp - u - self.floor) / self.span))
        return pts


def _mid(z: LatticePoint, attr: str) -> Fraction:
    return getattr(z, attr).midpoint()


def render_svg(minima: MinimaSequence, options: SvgOptions = SvgOptions()) -> str:
    pts = list(minima.certified)
    if len(pts) < 2:
        raise TooFewMinima("plotting needs at least two certified minima")
    last_norm = _mid(pts[-1], "supnorm")
    if options.log_scale:
        coords = [abs(_mid(z, a)) for z in pts for a in ("coord1", "coord2")]
        floor = math.floor(min(_log10(c) for c in coords)) - 1
        view = _SymLog(floor, _log10(last_norm) - floor)
    else:
        view = _Linear(last_norm)

    w, h = options.width, options.height
    half = min(w, h) / 2 * 0.9
    cx, cy = w / 2, h / 2
    px = lambda u: f"{cx + u * half:.3f}"
    py = lambda v: f"{cy - v * half:.3f}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
        f'<g class="axes" stroke="#888" stroke-width="1">'
        f'<line x1="0" y1="{cy:.3f}" x2="{w}" y2="{cy:.3f}"/>'
        f'<line x1="{cx:.3f}" y1="0" x2="{cx:.3f}" y2="{h}"/></g>',
    ]
    arcs = [(z, nxt) for z, nxt in zip(pts, pts[1:])][-2:]
    for z, nxt in arcs:
        pi2, clip = _mid(z, "pi2"), _mid(nxt, "supnorm")
        branch = view.arc(pi2, clip, options.samples)
        for sx, sy in _QUADRANTS:
            path = " ".join(f"{px(sx * u)},{py(sy * v)}" for u, v in branch)
            out.append(f'<polyline class="hyperbola" data-label="{z.label}" data-pi2="{fraction_to_sci(pi2)}" '
                       f'data-clip="{fraction_to_sci(clip)}" fill="none" stroke="#36c" points="{path}"/>')
    for z in pts:
        c1, c2 = _mid(z, "coord1"), _mid(z, "coord2")
        for sign in (1, -1):
            out.append(
                f'<circle class="marker" data-label="{"" if sign > 0 else "-"}{z.label}" '
                f'data-c1="{fraction_to_sci(sign * c1)}" data-c2="{fraction_to_sci(sign * c2)}" '
                f'cx="{px(view.coord(sign * c1))}" cy="{py(view.coord(sign * c2))}" r="3" fill="#c33"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
