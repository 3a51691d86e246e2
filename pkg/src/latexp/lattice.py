"""The lattice A Z^2 with A = [[theta, -1], [1, eta]] and its minima.

Points are stored by integer preimage ``(x, y)``; the image coordinates
``theta*x - y`` and ``x + eta*y`` are carried as rational enclosures.
The relative minima are the images of ``±(1,0), ±(0,1), ±(q_k, p_k),
±(r_k, -s_k)``, which is what :func:`candidates` enumerates. The brute-force
oracles at the bottom of the module check these claims by enumerating every
integer preimage in a box.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .cfcore import ConvergentTable, DepthUnavailable, remainder_enclosure, remainder_sign, value_enclosure
from .construct import (
    DEFAULT_MAX_BITS,
    PairConstruction,
    extend_construction,
)
from .exactreal import (
    DEFAULT_PRECISION_CAP,
    Ordering,
    PrecisionExhausted,
    RatInterval,
    fraction_to_sci,
    int_to_dec,
    iv_abs,
    iv_compare,
    iv_max,
    iv_mul,
)

DEFAULT_PRECISION_BITS = 64
REFINE_ROUNDS = 5
REFINE_STEP = 2


class UnresolvableOrder(ArithmeticError):
    """Two enclosures still overlap after all refinement rounds."""


class BoundTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class LatticePoint:
    family: str  # "V", "W", "E1", "E2", or "P" for an arbitrary point
    index: int
    preimage: tuple[int, int]
    coord1: RatInterval
    coord2: RatInterval
    supnorm: RatInterval
    pi2: RatInterval

    @property
    def label(self) -> str:
        return self.family if self.index < 0 else f"{self.family}{self.index}"


@dataclass(frozen=True)
class MinimaSequence:
    """Successive hyperbolic minima, ordered by increasing sup-norm.

    ``certified_from`` is the position where the unbroken chain
    ``V_m, W_m, V_{m+1}, W_{m+1}, ...`` starts and runs to the end.
    """

    points: tuple[LatticePoint, ...]
    certified_from: int
    horizon: Optional[Fraction] = None

    @property
    def certified(self) -> tuple[LatticePoint, ...]:
        return self.points[self.certified_from:]

    def __len__(self):
        return len(self.points)


class Lattice:
    """Enclosure bookkeeping for one construction.

    Coordinates are tightened by moving to deeper convergents until their
    relative width is at most ``2**-precision_bits`` or the tables run out.
    """

    def __init__(self, construction: PairConstruction, precision_bits: int = DEFAULT_PRECISION_BITS):
        self.construction = construction
        self.precision_bits = precision_bits
        self._cache: dict[tuple[str, int], RatInterval] = {}
        self._points: dict[tuple[str, int], LatticePoint] = {}

    def _table(self, which: str) -> ConvergentTable:
        return self.construction.theta if which == "theta" else self.construction.eta

    def value(self, which: str, j: Optional[int] = None) -> RatInterval:
        table = self._table(which)
        j = table.depth - 1 if j is None else j
        key = (which, j)
        if key not in self._cache:
            self._cache[key] = value_enclosure(table, j)
        return self._cache[key]

    def _good(self, iv: RatInterval) -> bool:
        if iv.lo <= 0 <= iv.hi:
            return False
        return iv.width * 2**self.precision_bits <= min(abs(iv.lo), abs(iv.hi))

    def linear(self, which: str, mult: int, shift: int, known: Optional[RatInterval] = None) -> RatInterval:
        """Enclose ``mult * value + shift`` where value is theta or eta."""
        if mult == 0:
            return RatInterval.point(shift)
        table = self._table(which)
        last = table.depth - 1
        if last < 0:
            raise DepthUnavailable("table too shallow for a value enclosure")
        need = 2 * abs(mult).bit_length() + self.precision_bits
        j = 0
        while j < last and (table.q[j] * table.q[j + 1]).bit_length() < need:
            j += 1
        while True:
            iv = self.value(which, j) * mult + shift
            if known is not None:
                iv = iv.intersect(known)
            if self._good(iv) or j >= last:
                return iv
            j += 1

    def _make(self, family, index, x, y, c1: RatInterval, c2: RatInterval) -> LatticePoint:
        a1, a2 = iv_abs(c1), iv_abs(c2)
        return LatticePoint(family, index, (x, y), c1, c2, iv_max(a1, a2), iv_mul(a1, a2))

    def point(self, x: int, y: int, family: str = "P", index: int = -2) -> LatticePoint:
        c1 = self.linear("theta", x, -y)
        c2 = self.linear("eta", y, x)
        return self._make(family, index, x, y, c1, c2)

    def e1(self) -> LatticePoint:
        return self.point(1, 0, "E1", -1)

    def e2(self) -> LatticePoint:
        return self.point(0, 1, "E2", -1)

    def v(self, k: int) -> LatticePoint:
        if ("V", k) not in self._points:
            self._points["V", k] = self._v(k)
        return self._points["V", k]

    def w(self, k: int) -> LatticePoint:
        if ("W", k) not in self._points:
            self._points["W", k] = self._w(k)
        return self._points["W", k]

    def _v(self, k: int) -> LatticePoint:
        theta = self.construction.theta
        theta._need(k + 1)
        q, p = theta.q[k], theta.p[k]
        known = remainder_enclosure(theta, k) * remainder_sign(k)
        c1 = self.linear("theta", q, -p, known)
        c2 = self.linear("eta", p, q)
        return self._make("V", k, q, p, c1, c2)

    def _w(self, k: int) -> LatticePoint:
        eta = self.construction.eta
        eta._need(k + 1)
        r, s = eta.p[k], eta.q[k]
        known = remainder_enclosure(eta, k) * -remainder_sign(k)
        c1 = self.linear("theta", r, s)
        c2 = self.linear("eta", -s, r, known)
        return self._make("W", k, r, -s, c1, c2)


def _as_lattice(obj: Union[Lattice, PairConstruction]) -> Lattice:
    return obj if isinstance(obj, Lattice) else Lattice(obj)


def candidates(construction: Union[Lattice, PairConstruction], depth: int) -> list[LatticePoint]:
    """E1, E2, then V_k, W_k for 0 <= k <= depth.

    Needs tables to ``depth + 2``.
    """
    lat = _as_lattice(construction)
    if lat.construction.depth < depth + 2:
        raise DepthUnavailable(f"candidates to depth {depth} need tables to {depth + 2}")
    out = [lat.e1(), lat.e2()]
    for k in range(depth + 1):
        out.append(lat.v(k))
        out.append(lat.w(k))
    return out


def completeness_horizon(construction: PairConstruction, depth: int) -> Fraction:
    """Every relative minimum beyond V_depth, W_depth has sup-norm above this."""
    return Fraction(min(construction.theta.q[depth + 1], construction.eta.q[depth + 1]))


def _cmp_supnorm(a: LatticePoint, b: LatticePoint) -> int:
    order = iv_compare(a.supnorm, b.supnorm)
    if order is Ordering.LESS:
        return -1
    if order is Ordering.GREATER:
        return 1
    if a.supnorm.is_exact and a.supnorm == b.supnorm:
        return 0
    raise UnresolvableOrder(f"sup-norms of {a.label} and {b.label} overlap")


def _alternation_start(points) -> int:
    start = len(points)
    for i in range(len(points) - 1, -1, -1):
        z = points[i]
        if z.family not in ("V", "W"):
            break
        if i + 1 < len(points):
            nxt = points[i + 1]
            expected = ("W", z.index) if z.family == "V" else ("V", z.index + 1)
            if (nxt.family, nxt.index) != expected:
                break
        start = i
    return start


def hyperbolic_filter(cands: list[LatticePoint], horizon: Optional[Fraction] = None) -> MinimaSequence:
    """Strict running minima of Π² along the candidates sorted by sup-norm.

    With ``horizon`` given, entries whose sup-norm could reach it are dropped,
    since uncollected relative minima might undercut them.
    """
    ordered = sorted(cands, key=functools.cmp_to_key(_cmp_supnorm))
    kept: list[LatticePoint] = []
    for z in ordered:
        if kept:
            order = iv_compare(z.pi2, kept[-1].pi2)
            if order is Ordering.OVERLAP:
                if z.pi2.is_exact and z.pi2 == kept[-1].pi2:
                    continue
                raise UnresolvableOrder(f"Π² of {z.label} and {kept[-1].label} overlap")
            if order is Ordering.GREATER:
                continue
        kept.append(z)
    if horizon is not None:
        kept = [z for z in kept if z.supnorm.hi < horizon]
    return MinimaSequence(tuple(kept), _alternation_start(kept), horizon)


def compute_minima(construction: PairConstruction, depth: int, *,
                   precision_bits: int = DEFAULT_PRECISION_BITS,
                   rounds: int = REFINE_ROUNDS, step: int = REFINE_STEP,
                   cap: int = DEFAULT_PRECISION_CAP,
                   max_bits: int = DEFAULT_MAX_BITS) -> tuple[MinimaSequence, Lattice]:
    """Hyperbolic minima among the candidates to ``depth``.

    Overlapping enclosures trigger up to ``rounds`` refinements, each adding
    ``step`` indices of lookahead and doubling the target precision.
    """
    c = construction
    if c.depth < depth + 2:
        raise DepthUnavailable(f"minima to depth {depth} need tables to {depth + 2}")
    bits = precision_bits
    for attempt in range(rounds + 1):
        lat = Lattice(c, bits)
        try:
            seq = hyperbolic_filter(candidates(lat, depth), completeness_horizon(c, depth))
            return seq, lat
        except UnresolvableOrder:
            if attempt == rounds:
                raise
        try:
            c = extend_construction(c, c.depth + step, cap=cap, max_bits=max_bits)
        except PrecisionExhausted as exc:
            raise UnresolvableOrder("refinement hit the size cap") from exc
        bits *= 2
    raise AssertionError("unreachable")


# --------------------------------------------------------------------------
# brute force

_FLOAT_SLACK = 1e-9
_DESK_LIMIT = 2**40


def _float_values(lat: Lattice) -> tuple[float, float]:
    return float(lat.value("theta").midpoint()), float(lat.value("eta").midpoint())


def preimage_bounds(lat: Lattice, supnorm: Fraction) -> tuple[int, int]:
    """Bounds on |x|, |y| for every preimage with sup-norm at most ``supnorm``.

    From the inverse matrix: x = (eta z1 + z2)/(theta eta + 1),
    y = (theta z2 - z1)/(theta eta + 1).
    """
    th, et = lat.value("theta"), lat.value("eta")
    det_lo = th.lo * et.lo + 1
    x_max = supnorm * (et.hi + 1) / det_lo
    y_max = supnorm * (th.hi + 1) / det_lo
    return int(x_max), int(y_max)


def enumerate_box(lat: Lattice, supnorm: Fraction, search_bound: int):
    """All nonzero integer preimages whose image might have sup-norm <= ``supnorm``.

    Returns ``(x, y, c1, c2)`` numpy arrays; ``c1, c2`` are float images used
    only for pruning, with a slack far above their rounding error.
    """
    if supnorm > _DESK_LIMIT:
        raise ValueError("brute force is limited to desk-scale sup-norms")
    x_max, y_max = preimage_bounds(lat, supnorm)
    if max(x_max, y_max) > search_bound:
        raise BoundTooSmall(f"need a search bound of at least {max(x_max, y_max)}")
    th, et = _float_values(lat)
    s = float(supnorm) + _FLOAT_SLACK * (1 + float(supnorm))
    xs = np.arange(-x_max, x_max + 1, dtype=np.int64)
    xf = xs.astype(np.float64)
    lo = np.maximum.reduce([np.ceil(th * xf - s) - 1, np.ceil((-s - xf) / et) - 1, np.full_like(xf, -y_max)])
    hi = np.minimum.reduce([np.floor(th * xf + s) + 1, np.floor((s - xf) / et) + 1, np.full_like(xf, y_max)])
    counts = np.maximum(hi - lo + 1, 0).astype(np.int64)
    x = np.repeat(xs, counts)
    starts = np.cumsum(counts) - counts
    y = np.repeat(lo.astype(np.int64), counts) + (np.arange(counts.sum(), dtype=np.int64) - np.repeat(starts, counts))
    c1 = th * x - y
    c2 = x + et * y
    keep = (np.maximum(np.abs(c1), np.abs(c2)) <= s) & ((x != 0) | (y != 0))
    return x[keep], y[keep], c1[keep], c2[keep]


def _slack(supnorm: Fraction) -> float:
    return _FLOAT_SLACK * (1 + float(supnorm))


def _same_pair(x: int, y: int, pre: tuple[int, int]) -> bool:
    return (x, y) == pre or (-x, -y) == pre


def _settled(order: Ordering, a: RatInterval, b: RatInterval) -> Optional[int]:
    """-1, 0, 1 for a < b, a = b, a > b; None while the enclosures overlap."""
    if order is Ordering.LESS:
        return -1
    if order is Ordering.GREATER:
        return 1
    return 0 if a.is_exact and a == b else None


def _hyperbolic_witness(z: LatticePoint, w: LatticePoint) -> Optional[bool]:
    norm = _settled(iv_compare(w.supnorm, z.supnorm), w.supnorm, z.supnorm)
    if norm == 1:
        return False
    if norm is None:
        return None
    pi = _settled(iv_compare(w.pi2, z.pi2), w.pi2, z.pi2)
    return None if pi is None else pi < 0


def _relative_witness(z: LatticePoint, w: LatticePoint) -> Optional[bool]:
    a1, a2, b1, b2 = iv_abs(z.coord1), iv_abs(z.coord2), iv_abs(w.coord1), iv_abs(w.coord2)
    o1, o2 = _settled(iv_compare(b1, a1), b1, a1), _settled(iv_compare(b2, a2), b2, a2)
    if 1 in (o1, o2):
        return False
    if None in (o1, o2):
        return None
    return (o1, o2) != (0, 0)


def _same_point(lat: Lattice, z: LatticePoint) -> LatticePoint:
    if z.family == "V":
        return lat.v(z.index)
    if z.family == "W":
        return lat.w(z.index)
    return lat.point(*z.preimage, z.family, z.index)


def _refinements(lat: Lattice):
    """``lat`` followed by ever deeper and more precise versions of it."""
    yield lat
    c, bits = lat.construction, lat.precision_bits
    for _ in range(REFINE_ROUNDS):
        try:
            c = extend_construction(c, c.depth + REFINE_STEP)
        except (ValueError, PrecisionExhausted):
            return
        bits *= 2
        yield Lattice(c, bits)


def _is_witness(lat: Lattice, z: LatticePoint, pre: tuple[int, int], judge) -> bool:
    for level in _refinements(lat):
        zz = z if level is lat else _same_point(level, z)
        verdict = judge(zz, level.point(*pre))
        if verdict is not None:
            return verdict
    raise UnresolvableOrder(f"cannot compare {z.label} with preimage {pre}")


def oracle_hyperbolic(point: LatticePoint, construction: Union[Lattice, PairConstruction],
                      search_bound: int) -> bool:
    """True iff no nonzero w ≠ ±z has |w| <= |z| and Π(w) < Π(z)."""
    lat = _as_lattice(construction)
    x, y, c1, c2 = enumerate_box(lat, point.supnorm.hi, search_bound)
    tol = _slack(point.supnorm.hi)
    pi2 = np.abs(c1) * np.abs(c2)
    idx = np.nonzero(pi2 < float(point.pi2.hi) + tol * (2 * float(point.supnorm.hi) + 2))[0]
    for i in idx:
        pre = int(x[i]), int(y[i])
        if not _same_pair(*pre, point.preimage) and _is_witness(lat, point, pre, _hyperbolic_witness):
            return False
    return True


def oracle_relative(point: LatticePoint, construction: Union[Lattice, PairConstruction],
                    search_bound: int) -> bool:
    """True iff the box |w_i| <= |z_i| holds no lattice points besides 0, ±z and vertices."""
    lat = _as_lattice(construction)
    x, y, c1, c2 = enumerate_box(lat, point.supnorm.hi, search_bound)
    tol = _slack(point.supnorm.hi)
    a1, a2 = iv_abs(point.coord1), iv_abs(point.coord2)
    idx = np.nonzero((np.abs(c1) <= float(a1.hi) + tol) & (np.abs(c2) <= float(a2.hi) + tol))[0]
    for i in idx:
        pre = int(x[i]), int(y[i])
        if not _same_pair(*pre, point.preimage) and _is_witness(lat, point, pre, _relative_witness):
            return False
    return True


def _normalise(x: int, y: int) -> tuple[int, int]:
    return (x, y) if (x > 0 or (x == 0 and y > 0)) else (-x, -y)


def relative_minima_in_box(construction: Union[Lattice, PairConstruction], supnorm: Fraction,
                           search_bound: int) -> list[LatticePoint]:
    """Every relative minimum with sup-norm <= ``supnorm``, one per ± pair.

    A float Pareto sweep discards points that are dominated by a clear margin
    (so certainly not minimal); the survivors go through :func:`oracle_relative`.
    """
    lat = _as_lattice(construction)
    x, y, c1, c2 = enumerate_box(lat, Fraction(supnorm), search_bound)
    tol = 4 * _slack(Fraction(supnorm))
    a1, a2 = np.abs(c1), np.abs(c2)
    order = np.argsort(a1, kind="stable")
    a1s, a2s = a1[order], a2[order]
    prefix_min = np.minimum.accumulate(a2s)
    cut = np.searchsorted(a1s, a1s - tol, side="right")
    dominated = (cut > 0) & (prefix_min[np.maximum(cut - 1, 0)] <= a2s - tol)
    seen, found = set(), []
    for i in order[~dominated]:
        pre = _normalise(int(x[i]), int(y[i]))
        if pre in seen:
            continue
        seen.add(pre)
        z = lat.point(*pre)
        if z.supnorm.hi <= supnorm or iv_compare(z.supnorm, RatInterval.point(supnorm)) is not Ordering.GREATER:
            if oracle_relative(z, lat, search_bound):
                found.append(z)
    found.sort(key=functools.cmp_to_key(_cmp_supnorm))
    return found


# --------------------------------------------------------------------------
# JSON


def _iv_json(iv: RatInterval) -> list[str]:
    return [fraction_to_sci(iv.lo, 12, "down"), fraction_to_sci(iv.hi, 12, "up")]


def point_to_json(z: LatticePoint) -> dict:
    return {
        "family": z.family,
        "k": str(z.index),
        "preimage": [int_to_dec(z.preimage[0]), int_to_dec(z.preimage[1])],
        "supnorm": _iv_json(z.supnorm),
        "pi2": _iv_json(z.pi2),
        "exact": z.supnorm.is_exact and z.pi2.is_exact,
    }


def minima_to_json(seq: MinimaSequence) -> dict:
    return {
        "schema": "latexp/minima",
        "certified_from": str(seq.certified_from),
        "horizon": int_to_dec(int(seq.horizon)) if seq.horizon is not None else None,
        "points": [point_to_json(z) for z in seq.points],
    }
