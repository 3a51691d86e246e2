"""Finite-depth estimates of the Diophantine exponents.

Every gamma is a quotient of two enclosed logarithms, so it comes with an
error bar; printed values never carry more digits than the bar supports.
Running statistics are reported as the midpoint of the interval swept out by
the per-entry bars.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from typing import Optional, Sequence

from .cfcore import ConvergentTable, DepthUnavailable
from .exactreal import BetaSpec, LogApprox, fraction_to_sci, log_interval, log_magnitude
from .lattice import LatticePoint, MinimaSequence

_CTX = Context(prec=60)
_UP = Context(prec=60, rounding=ROUND_CEILING)
_DOWN = Context(prec=60, rounding=ROUND_FLOOR)
_MAX_DIGITS = 20
LABEL = "finite-depth estimate"


class Kind(enum.Enum):
    OMEGA_NUMBER = "omega_number"
    OMEGA_LATTICE = "omega_lattice"
    WEAK_UNIFORM = "weak_uniform"


class EmptySequence(ValueError):
    pass


@dataclass(frozen=True)
class Gamma:
    key: str
    k: int
    value: Decimal
    err: Decimal

    @property
    def lo(self) -> Decimal:
        return _CTX.subtract(self.value, self.err)

    @property
    def hi(self) -> Decimal:
        return _CTX.add(self.value, self.err)


@dataclass(frozen=True)
class ExponentEstimate:
    kind: Kind
    per_k: tuple[Gamma, ...]
    running_stat: Decimal
    running_err: Decimal
    target: Optional[Fraction] = None

    @property
    def deviation(self) -> Optional[Decimal]:
        """Upper bound on |running_stat - target| including the error bar."""
        if self.target is None:
            return None
        t = _CTX.divide(Decimal(self.target.numerator), Decimal(self.target.denominator))
        return _CTX.add(abs(_CTX.subtract(self.running_stat, t)), self.running_err)


def ratio(num: LogApprox, den: LogApprox) -> tuple[Decimal, Decimal]:
    """``num/den`` with a bound on its error given the two log errors."""
    b = abs(den.value)
    if b <= den.abs_err:
        raise ZeroDivisionError("denominator logarithm is not bounded away from zero")
    value = _CTX.divide(num.value, den.value)
    spread = _UP.add(_UP.multiply(num.abs_err, b), _UP.multiply(abs(num.value), den.abs_err))
    err = _UP.divide(spread, _DOWN.multiply(b, _DOWN.subtract(b, den.abs_err)))
    # value itself is rounded to 60 digits
    return value, _UP.add(err, _UP.multiply(abs(value), Decimal("1e-58")))


def _half(x: LogApprox) -> LogApprox:
    return LogApprox(_CTX.divide(x.value, 2), _UP.divide(x.abs_err, 2))


def _sweep(values: Sequence[Gamma], pick) -> tuple[Decimal, Decimal]:
    lo = pick(g.lo for g in values)
    hi = pick(g.hi for g in values)
    return _CTX.divide(_CTX.add(lo, hi), 2), _UP.divide(_UP.subtract(hi, lo), 2)


def omega_number(table: ConvergentTable, depth: int) -> ExponentEstimate:
    """gamma_k = 1 + ln a_{k+1} / ln q_k for 2 <= k <= depth; running max."""
    if depth < 2:
        raise ValueError("depth must be at least 2")
    if table.depth < depth + 1:
        raise DepthUnavailable(f"need a_{depth + 1}, table depth is {table.depth}")
    per_k = []
    for k in range(2, depth + 1):
        value, err = ratio(log_magnitude(table.a[k + 1]), log_magnitude(table.q[k]))
        per_k.append(Gamma(f"k={k}", k, _CTX.add(value, 1), err))
    stat, err = _sweep(per_k, max)
    return ExponentEstimate(Kind.OMEGA_NUMBER, tuple(per_k), stat, err)


def _gamma(z_pi: LatticePoint, z_norm: LatticePoint) -> tuple[Decimal, Decimal]:
    return ratio(-_half(log_interval(z_pi.pi2)), log_interval(z_norm.supnorm))


def omega_lattice(minima: MinimaSequence) -> ExponentEstimate:
    """gamma = -ln Π(z) / ln |z| over certified minima; running max."""
    pts = minima.certified
    if not pts:
        raise EmptySequence("no certified minima")
    per_k = [Gamma(z.label, z.index, *_gamma(z, z)) for z in pts]
    stat, err = _sweep(per_k, max)
    return ExponentEstimate(Kind.OMEGA_LATTICE, tuple(per_k), stat, err)


def weak_uniform(minima: MinimaSequence) -> ExponentEstimate:
    """gamma = -ln Π(z_i) / ln |z_{i+1}| over consecutive certified minima.

    The running statistic is the minimum over the later half of the pairs
    (rounded up), standing in for the tail infimum.
    """
    pts = minima.certified
    if len(pts) < 2:
        raise EmptySequence("weak-uniform estimates need two certified minima")
    per_k = [Gamma(f"{z.label}>{nxt.label}", z.index, *_gamma(z, nxt)) for z, nxt in zip(pts, pts[1:])]
    tail = per_k[len(per_k) // 2:]
    stat, err = _sweep(tail, min)
    return ExponentEstimate(Kind.WEAK_UNIFORM, tuple(per_k), stat, err)


def target_weak_uniform(beta: BetaSpec) -> Fraction:
    return (beta.value - 1 / beta.value) / 2


def target_omega_lattice(beta: BetaSpec) -> Fraction:
    return (beta.value**2 - 1) / 2


def target_omega_number(beta: BetaSpec) -> Fraction:
    return beta.value**2


def with_target(est: ExponentEstimate, target: Optional[Fraction]) -> ExponentEstimate:
    return ExponentEstimate(est.kind, est.per_k, est.running_stat, est.running_err, target)


# --------------------------------------------------------------------------
# rendering


def render(value: Decimal, err: Decimal) -> str:
    """Round ``value`` to the last decimal place that ``err`` leaves meaningful."""
    if err <= 0:
        places = _MAX_DIGITS
    else:
        places = min(_MAX_DIGITS, max(0, -err.adjusted()))
    return str(value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN, context=_CTX))


def render_err(err: Decimal) -> str:
    """Error bars rounded up to two significant digits."""
    if err <= 0:
        return "0"
    return str(err.quantize(Decimal(1).scaleb(err.adjusted() - 1), rounding=ROUND_CEILING, context=_CTX))


def _gamma_json(g: Gamma) -> dict:
    return {"key": g.key, "k": str(g.k), "gamma": render(g.value, g.err), "error": render_err(g.err)}


def estimate_to_json(est: ExponentEstimate) -> dict:
    doc = {
        "kind": est.kind.value,
        "label": LABEL,
        "per_k": [_gamma_json(g) for g in est.per_k],
        "running_stat": render(est.running_stat, est.running_err),
        "running_error": render_err(est.running_err),
        "target": None,
        "deviation": None,
    }
    if est.target is not None:
        doc["target"] = fraction_to_sci(est.target, 12)
        doc["deviation"] = render_err(est.deviation)
    return doc
