"""Check the inequality chains behind the β construction, index by index.

Seven checks, each a list of strict inequalities ("links") evaluated at
every k in 1..K:

C1  s_{k-1}^β < q_k < s_{k-1}^β + q_{k-1}, q_k < 2 s_{k-1}^β, and the s_k twin
C2  q_{k-1}^e / 2 < a_k < 2^β q_{k-1}^e + 1 (e = β² - 1), and the b_k twin
C3  1/(2^β q_k^e + 3) < q_k |q_k θ - p_k| < 2 / q_k^e, and the s_k twin
C4  2 q_k < q_k + p_k η < 5 q_k and 2 s_k < r_k θ + s_k < 5 s_k
C5  the two (6/5)-separated product chains linking v_k, w_k, v_{k+1}
C6  |v_k| < |w_k| < |v_{k+1}|
C7  Π(v_k) > (6/5) Π(w_k) and Π(w_k) > (6/5) Π(v_{k+1})

Integer-only links are decided exactly by raising both sides to a common
power. Links involving θ or η use lattice enclosures, which are tightened a
few times before a link is declared inconclusive.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .cfcore import DepthUnavailable
from .construct import DEFAULT_MAX_BITS, Mode, PairConstruction, extend_construction
from .exactreal import DEFAULT_PRECISION_CAP, RatInterval, fraction_to_sci, iv_abs
from .lattice import Lattice

CHECK_IDS = ("C1", "C2", "C3", "C4", "C5", "C6", "C7")
REFINE_LEVELS = 5
BASE_BITS = 64


class Verdict(enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class Power:
    """``coef * prod(base ** exp)`` with rational exponents, kept symbolic."""

    coef: Fraction
    terms: tuple[tuple[int, Fraction], ...] = ()

    def __str__(self):
        parts = [] if self.coef == 1 and self.terms else [str(self.coef)]
        for base, exp in self.terms:
            parts.append(f"{_short(base)}^({exp})")
        return "*".join(parts)


def _short(n: int) -> str:
    return str(n) if n.bit_length() <= 64 else fraction_to_sci(Fraction(n), 12)


def power_sign(x: Fraction, p: Power) -> int:
    """Exact sign of ``x - p``."""
    if x <= 0:
        return -1 if p.coef > 0 else (0 if x == 0 and p.coef == 0 else -1)
    lcm = math.lcm(*(e.denominator for _, e in p.terms)) if p.terms else 1
    lhs = (x / p.coef) ** lcm
    rhs = Fraction(1)
    for base, exp in p.terms:
        n = exp * lcm
        assert n.denominator == 1
        if n >= 0:
            rhs *= Fraction(base) ** int(n)
        else:
            lhs *= Fraction(base) ** int(-n)
    return (lhs > rhs) - (lhs < rhs)


Side = Union[Fraction, int, RatInterval, Power]


def _less(left: Side, right: Side, strict: bool = True) -> Optional[bool]:
    """Decide ``left < right`` (``<=`` unless strict); ``None`` if undecided."""
    if isinstance(left, Power) and isinstance(right, Power):
        raise TypeError("one side must be numeric")
    if isinstance(right, Power):
        lo, hi = _bounds(left)
        sign_hi, sign_lo = power_sign(hi, right), power_sign(lo, right)
    elif isinstance(left, Power):
        lo, hi = _bounds(right)
        sign_hi, sign_lo = -power_sign(lo, left), -power_sign(hi, left)
    else:
        (llo, lhi), (rlo, rhi) = _bounds(left), _bounds(right)
        sign_hi = (lhi > rlo) - (lhi < rlo)
        sign_lo = (llo > rhi) - (llo < rhi)
    if sign_hi < 0 or (not strict and sign_hi == 0):
        return True
    if sign_lo > 0 or (strict and sign_lo == 0):
        return False
    return None


def _bounds(x) -> tuple[Fraction, Fraction]:
    if isinstance(x, RatInterval):
        return x.lo, x.hi
    return Fraction(x), Fraction(x)


def _render(x: Side) -> str:
    if isinstance(x, Power):
        return str(x)
    lo, hi = _bounds(x)
    if lo == hi:
        return _short(lo.numerator) if lo.denominator == 1 else fraction_to_sci(lo, 12)
    return f"[{fraction_to_sci(lo, 12, 'down')}, {fraction_to_sci(hi, 12, 'up')}]"


@dataclass(frozen=True)
class KVerdict:
    k: int
    verdict: Verdict
    witness: Optional[dict] = None


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    verdicts: tuple[KVerdict, ...]

    @property
    def k0(self) -> Optional[int]:
        """Start of the trailing run of PASS verdicts (None if the last one fails)."""
        k0 = None
        for v in reversed(self.verdicts):
            if v.verdict is not Verdict.PASS:
                break
            k0 = v.k
        return k0

    @property
    def relapse(self) -> bool:
        """A PASS somewhere before k0, followed by a non-PASS."""
        k0 = self.k0
        limit = k0 if k0 is not None else math.inf
        return any(v.verdict is Verdict.PASS and v.k < limit for v in self.verdicts)

    @property
    def ok(self) -> bool:
        return self.k0 is not None and not self.relapse


@dataclass(frozen=True)
class AuditReport:
    beta: str
    depth: int
    checks: tuple[CheckResult, ...]
    required_from: dict = field(default_factory=dict)

    def check(self, check_id: str) -> CheckResult:
        return next(c for c in self.checks if c.check_id == check_id)

    @property
    def overall(self) -> bool:
        for c in self.checks:
            if not c.ok:
                return False
            need = self.required_from.get(c.check_id)
            if need is not None and c.k0 > need:
                return False
        return True


# --------------------------------------------------------------------------


# (name, sides) is a strict link; a third element False makes it non-strict
Link = tuple


class _Context:
    def __init__(self, c: PairConstruction):
        self.c = c
        self.beta = c.beta.value
        self.e = self.beta**2 - 1
        self.q, self.p = c.theta.q, c.theta.p
        self.s, self.r = c.eta.q, c.eta.p
        self.a, self.b = c.theta.a, c.eta.a
        self._lattices = [Lattice(c, BASE_BITS)]

    def lattice(self, level: int) -> Lattice:
        while len(self._lattices) <= level:
            self._lattices.append(Lattice(self.c, BASE_BITS << len(self._lattices)))
        return self._lattices[level]


def _c1(ctx: _Context, k: int) -> list[Link]:
    beta, q, s = ctx.beta, ctx.q, ctx.s
    s_pow = Power(Fraction(1), ((s[k - 1], beta),))
    q_pow = Power(Fraction(1), ((q[k], beta),))
    return [
        ("s_{k-1}^b < q_k", lambda _: (s_pow, q[k])),
        # equality whenever q_{k-1} divides s_{k-1}^b - q_{k-2}
        ("q_k <= s_{k-1}^b + q_{k-1}", lambda _: (q[k] - q[k - 1], s_pow), False),
        ("q_k < 2 s_{k-1}^b", lambda _: (q[k], Power(Fraction(2), s_pow.terms))),
        ("q_k^b < s_k", lambda _: (q_pow, s[k])),
        ("s_k <= q_k^b + s_{k-1}", lambda _: (s[k] - s[k - 1], q_pow), False),
        ("s_k < 2 q_k^b", lambda _: (s[k], Power(Fraction(2), q_pow.terms))),
    ]


def _c2(ctx: _Context, k: int) -> list[Link]:
    beta, e = ctx.beta, ctx.e
    links = []
    for name, quot, den in (("a", ctx.a, ctx.q), ("b", ctx.b, ctx.s)):
        base = den[k - 1]
        links.append((f"{name}_k > base^e/2", lambda _, base=base, quot=quot: (Power(Fraction(1, 2), ((base, e),)), quot[k])))
        links.append((f"{name}_k < 2^b base^e + 1",
                      lambda _, base=base, quot=quot: (quot[k] - 1, Power(Fraction(1), ((2, beta), (base, e))))))
    return links


def _remainders(lat: Lattice, k: int) -> tuple[RatInterval, RatInterval]:
    return iv_abs(lat.v(k).coord1), iv_abs(lat.w(k).coord2)


def _c3(ctx: _Context, k: int) -> list[Link]:
    beta, e = ctx.beta, ctx.e
    links = []
    for name, den, idx in (("q", ctx.q, 0), ("s", ctx.s, 1)):
        d = den[k]
        product = lambda lat, d=d, idx=idx: _remainders(lat, k)[idx] * d
        links.append((f"{name}_k|.| < 2/{name}_k^e", lambda lat, product=product, d=d: (
            product(lat), Power(Fraction(2), ((d, -e),)))))
        # 1/(2^b d^e + 3) < X  <=>  1/X - 3 < 2^b d^e
        links.append((f"1/(2^b {name}_k^e + 3) < {name}_k|.|", lambda lat, product=product, d=d: (
            product(lat).reciprocal() - 3, Power(Fraction(1), ((2, beta), (d, e))))))
    return links


def _c4(ctx: _Context, k: int) -> list[Link]:
    q, s = ctx.q[k], ctx.s[k]
    return [
        ("2q_k < q_k + p_k eta", lambda lat: (2 * q, lat.v(k).coord2)),
        ("q_k + p_k eta < 5q_k", lambda lat: (lat.v(k).coord2, 5 * q)),
        ("2s_k < r_k theta + s_k", lambda lat: (2 * s, lat.w(k).coord1)),
        ("r_k theta + s_k < 5s_k", lambda lat: (lat.w(k).coord1, 5 * s)),
    ]


def _c5(ctx: _Context, k: int) -> list[Link]:
    q, s = ctx.q, ctx.s
    qr = lambda lat, j: iv_abs(lat.v(j).coord1) * q[j]
    sr = lambda lat, j: iv_abs(lat.w(j).coord2) * s[j]
    six_fifths = Fraction(6, 5)
    return [
        ("Pi2(v_k) > 2 q_k|.|", lambda lat: (qr(lat, k) * 2, lat.v(k).pi2)),
        ("2 q_k|.| > 6 s_k|.|", lambda lat: (sr(lat, k) * 6, qr(lat, k) * 2)),
        ("6 s_k|.| > 6/5 Pi2(w_k)", lambda lat: (lat.w(k).pi2 * six_fifths, sr(lat, k) * 6)),
        ("Pi2(w_k) > 2 s_k|.|", lambda lat: (sr(lat, k) * 2, lat.w(k).pi2)),
        ("2 s_k|.| > 6 q_{k+1}|.|", lambda lat: (qr(lat, k + 1) * 6, sr(lat, k) * 2)),
        ("6 q_{k+1}|.| > 6/5 Pi2(v_{k+1})", lambda lat: (lat.v(k + 1).pi2 * six_fifths, qr(lat, k + 1) * 6)),
    ]


def _c6(ctx: _Context, k: int) -> list[Link]:
    return [
        ("|v_k| < |w_k|", lambda lat: (lat.v(k).supnorm, lat.w(k).supnorm)),
        ("|w_k| < |v_{k+1}|", lambda lat: (lat.w(k).supnorm, lat.v(k + 1).supnorm)),
    ]


def _c7(ctx: _Context, k: int) -> list[Link]:
    # Π(x) > (6/5) Π(y)  <=>  Π²(x) > (36/25) Π²(y)
    f = Fraction(36, 25)
    return [
        ("Pi(v_k) > 6/5 Pi(w_k)", lambda lat: (lat.w(k).pi2 * f, lat.v(k).pi2)),
        ("Pi(w_k) > 6/5 Pi(v_{k+1})", lambda lat: (lat.v(k + 1).pi2 * f, lat.w(k).pi2)),
    ]


_BUILDERS = {"C1": _c1, "C2": _c2, "C3": _c3, "C4": _c4, "C5": _c5, "C6": _c6, "C7": _c7}


def _evaluate(ctx: _Context, links: list[Link], k: int) -> KVerdict:
    undecided = []
    for name, sides, *flags in links:
        strict = flags[0] if flags else True
        outcome = None
        for level in range(REFINE_LEVELS):
            left, right = sides(ctx.lattice(level))
            outcome = _less(left, right, strict)
            if outcome is not None or not any(isinstance(x, RatInterval) for x in (left, right)):
                break
        if outcome is False:
            return KVerdict(k, Verdict.FAIL, {"link": name, "left": _render(left), "right": _render(right)})
        if outcome is None:
            undecided.append(name)
    if undecided:
        return KVerdict(k, Verdict.INCONCLUSIVE, {"link": undecided[0]})
    return KVerdict(k, Verdict.PASS)


def run_audit(construction: PairConstruction, depth: int, *, required_from: Optional[dict] = None,
              cap: int = DEFAULT_PRECISION_CAP, max_bits: int = DEFAULT_MAX_BITS) -> AuditReport:
    """Evaluate C1..C7 at every 1 <= k <= depth.

    Tables are extended to ``depth + 2`` when possible; a perturbed
    construction must already be that deep.
    """
    c = construction
    if c.mode is not Mode.BETA:
        raise ValueError("the audit applies to beta-mode constructions")
    if depth < 3:
        raise ValueError("audit depth must be at least 3")
    if c.depth < depth + 2:
        if c.perturbed is not None:
            raise DepthUnavailable(f"perturbed run needs tables to {depth + 2}")
        c = extend_construction(c, depth + 2, cap=cap, max_bits=max_bits)
    ctx = _Context(c)
    checks = []
    for cid in CHECK_IDS:
        verdicts = tuple(_evaluate(ctx, _BUILDERS[cid](ctx, k), k) for k in range(1, depth + 1))
        checks.append(CheckResult(cid, verdicts))
    return AuditReport(str(c.beta), depth, tuple(checks), dict(required_from or {}))


def report_to_json(report: AuditReport) -> dict:
    return {
        "schema": "latexp/audit",
        "beta": report.beta,
        "depth": str(report.depth),
        "overall": "PASS" if report.overall else "FAIL",
        "checks": [
            {
                "id": c.check_id,
                "k0": None if c.k0 is None else str(c.k0),
                "relapse": c.relapse,
                "verdicts": [
                    {"k": str(v.k), "verdict": v.verdict.value, "witness": v.witness} for v in c.verdicts
                ],
            }
            for c in report.checks
        ],
    }


def report_table(report: AuditReport) -> str:
    ks = [v.k for v in report.checks[0].verdicts]
    mark = {Verdict.PASS: "ok", Verdict.FAIL: "FAIL", Verdict.INCONCLUSIVE: "?"}
    lines = ["check  k0  " + " ".join(f"{k:>4}" for k in ks)]
    for c in report.checks:
        k0 = "-" if c.k0 is None else str(c.k0)
        row = " ".join(f"{mark[v.verdict]:>4}" for v in c.verdicts)
        lines.append(f"{c.check_id:<6} {k0:>2}  {row}" + ("  (relapse)" if c.relapse else ""))
    lines.append(f"overall: {'PASS' if report.overall else 'FAIL'}")
    return "\n".join(lines)
