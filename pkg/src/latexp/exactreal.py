"""Rigorous real arithmetic on big rationals.

Everything irrational in this package (the continued-fraction values, the
linear forms, real powers with rational exponents) is carried as a
:class:`RatInterval` whose endpoints are exact :class:`fractions.Fraction`
values. Logarithms are the only place where decimals appear; they come with
an explicit absolute error bound (:class:`LogApprox`).
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from typing import Union

import gmpy2

Rational = Union[int, Fraction]

DEFAULT_PRECISION_CAP = 2**20
START_BITS = 128
PRECISION_ENV = "LATEXP_PRECISION_CAP"

# Working precision for logarithms. Decimal.ln is correctly rounded, so with
# 60 digits and |ln x| < 1e12 every output is good to well below 1e-40.
_LOG_CTX = Context(prec=60, rounding=ROUND_HALF_EVEN)
_LOG_ERR = Decimal("1e-40")
_ERR_CTX = Context(prec=60, rounding=ROUND_CEILING)  # error bars only ever round up
_LN2 = _LOG_CTX.ln(Decimal(2))
_MANTISSA_BITS = 256


def _err_sum(*errs: Decimal) -> Decimal:
    total = Decimal(0)
    for e in errs:
        total = _ERR_CTX.add(total, e)
    return total


class PrecisionExhausted(ArithmeticError):
    """Precision escalation hit the configured bit cap."""


class NonPositiveInput(ValueError):
    pass


def default_precision_cap() -> int:
    """Precision cap in bits, taken from ``LATEXP_PRECISION_CAP`` if set."""
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_PRECISION_CAP
    cap = int(raw)
    if cap < START_BITS:
        raise ValueError(f"{PRECISION_ENV} must be at least {START_BITS}")
    return cap


def int_to_dec(n: int) -> str:
    # str(int) is capped at 4300 digits on recent CPython; GMP is not.
    return str(gmpy2.mpz(n))


def dec_to_int(s: str) -> int:
    return int(gmpy2.mpz(s.strip()))


class Ordering(enum.Enum):
    LESS = "LESS"
    GREATER = "GREATER"
    OVERLAP = "OVERLAP"


@dataclass(frozen=True)
class RatInterval:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not isinstance(self.lo, Fraction):
            object.__setattr__(self, "lo", Fraction(self.lo))
        if not isinstance(self.hi, Fraction):
            object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: Rational) -> "RatInterval":
        x = Fraction(x)
        return cls(x, x)

    @classmethod
    def hull(cls, x: Rational, y: Rational) -> "RatInterval":
        x, y = Fraction(x), Fraction(y)
        return cls(min(x, y), max(x, y))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Rational) -> bool:
        return self.lo <= x <= self.hi

    def subset_of(self, other: "RatInterval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def intersect(self, other: "RatInterval") -> "RatInterval":
        return RatInterval(max(self.lo, other.lo), min(self.hi, other.hi))

    def __add__(self, other):
        return iv_add(self, _coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return RatInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return iv_add(self, -_coerce(other))

    def __rsub__(self, other):
        return iv_add(_coerce(other), -self)

    def __mul__(self, other):
        return iv_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __abs__(self):
        return iv_abs(self)

    def reciprocal(self) -> "RatInterval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return RatInterval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        return iv_mul(self, _coerce(other).reciprocal())

    def __repr__(self):
        return f"RatInterval({self.lo}, {self.hi})"


def _coerce(x) -> RatInterval:
    if isinstance(x, RatInterval):
        return x
    if isinstance(x, (int, Fraction)):
        return RatInterval.point(x)
    return NotImplemented


def iv_add(a: RatInterval, b: RatInterval) -> RatInterval:
    return RatInterval(a.lo + b.lo, a.hi + b.hi)


def iv_mul(a: RatInterval, b: RatInterval) -> RatInterval:
    if a.lo >= 0 and b.lo >= 0:
        return RatInterval(a.lo * b.lo, a.hi * b.hi)
    products = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
    return RatInterval(min(products), max(products))


def iv_abs(a: RatInterval) -> RatInterval:
    if a.lo >= 0:
        return a
    if a.hi <= 0:
        return RatInterval(-a.hi, -a.lo)
    return RatInterval(Fraction(0), max(-a.lo, a.hi))


def iv_max(a: RatInterval, b: RatInterval) -> RatInterval:
    return RatInterval(max(a.lo, b.lo), max(a.hi, b.hi))


def iv_compare(a: RatInterval, b: RatInterval) -> Ordering:
    if a.hi < b.lo:
        return Ordering.LESS
    if a.lo > b.hi:
        return Ordering.GREATER
    return Ordering.OVERLAP


# --------------------------------------------------------------------------
# logarithms


@dataclass(frozen=True)
class LogApprox:
    """``value ± abs_err`` enclosing a natural logarithm."""

    value: Decimal
    abs_err: Decimal

    def __add__(self, other: "LogApprox") -> "LogApprox":
        return LogApprox(_LOG_CTX.add(self.value, other.value), _err_sum(self.abs_err, other.abs_err))

    def __sub__(self, other: "LogApprox") -> "LogApprox":
        return LogApprox(_LOG_CTX.subtract(self.value, other.value), _err_sum(self.abs_err, other.abs_err))

    def __neg__(self):
        return LogApprox(-self.value, self.abs_err)

    def contains(self, x: Decimal) -> bool:
        lo = _LOG_CTX.subtract(self.value, self.abs_err)
        hi = _LOG_CTX.add(self.value, self.abs_err)
        return lo <= x <= hi


def _log_int(n: int) -> LogApprox:
    bits = n.bit_length()
    if bits <= _MANTISSA_BITS:
        return LogApprox(_LOG_CTX.ln(Decimal(n)), _LOG_ERR)
    shift = bits - _MANTISSA_BITS
    mantissa = n >> shift
    # n lies in [m, m+1) * 2**shift, so truncation costs at most ln(1 + 1/m) < 2**-255
    value = _LOG_CTX.add(_LOG_CTX.ln(Decimal(mantissa)), _LOG_CTX.multiply(Decimal(shift), _LN2))
    return LogApprox(value, _LOG_ERR)


def log_magnitude(x: Rational) -> LogApprox:
    """Natural logarithm of a positive rational of any size."""
    x = Fraction(x)
    if x <= 0:
        raise NonPositiveInput(f"log of non-positive value {x}")
    if x.denominator == 1:
        return _log_int(x.numerator)
    return _log_int(x.numerator) - _log_int(x.denominator)


def log_interval(iv: RatInterval) -> LogApprox:
    """Enclose ``ln`` over a positive interval: log-midpoint plus half log-width."""
    if iv.lo <= 0:
        raise NonPositiveInput("interval is not strictly positive")
    lo = log_magnitude(iv.lo)
    if iv.is_exact:
        return lo
    hi = log_magnitude(iv.hi)
    centre = _LOG_CTX.divide(_LOG_CTX.add(lo.value, hi.value), 2)
    half = _LOG_CTX.divide(_LOG_CTX.subtract(hi.value, lo.value), 2)
    return LogApprox(centre, _err_sum(half, lo.abs_err, hi.abs_err, _LOG_ERR))


# --------------------------------------------------------------------------
# rational exponents


@dataclass(frozen=True)
class BetaSpec:
    """Exact rational exponent ``num/den`` greater than one."""

    num: int
    den: int = 1

    def __post_init__(self):
        if self.den == 0:
            raise ValueError("beta denominator must be nonzero")
        f = Fraction(self.num, self.den)
        object.__setattr__(self, "num", f.numerator)
        object.__setattr__(self, "den", f.denominator)
        if f <= 1:
            raise ValueError("beta must exceed 1")

    @classmethod
    def parse(cls, text: str) -> "BetaSpec":
        text = text.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return cls(int(num), int(den))
        return cls(int(text))

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def is_integer(self) -> bool:
        return self.den == 1

    def __str__(self):
        return f"{self.num}/{self.den}"


def integer_root(x: int, n: int) -> tuple[int, bool]:
    """``(floor(x ** (1/n)), exact)`` for ``x >= 0``."""
    root, exact = gmpy2.iroot(gmpy2.mpz(x), n)
    return int(root), bool(exact)


def root_enclosure(x: int, n: int, frac_bits: int) -> RatInterval:
    """Enclosure of ``x ** (1/n)`` with ``frac_bits`` bits after the binary point."""
    if x < 0:
        raise NonPositiveInput("root of a negative integer")
    if n == 1:
        return RatInterval.point(x)
    scaled, exact = gmpy2.iroot(gmpy2.mpz(x) << (n * frac_bits), n)
    lo = Fraction(int(scaled), 1 << frac_bits)
    if exact:
        return RatInterval(lo, lo)
    return RatInterval(lo, Fraction(int(scaled) + 1, 1 << frac_bits))


def pow_enclosure(s: int, beta: BetaSpec, frac_bits: int) -> RatInterval:
    """Enclosure of ``s ** beta`` for an integer base ``s >= 0``."""
    return root_enclosure(int(gmpy2.mpz(s) ** beta.num), beta.den, frac_bits)


def escalate(evaluate, cap: int = DEFAULT_PRECISION_CAP, start: int = START_BITS):
    """Call ``evaluate(bits)`` with doubling precision until it returns non-None.

    Raises :class:`PrecisionExhausted` once ``bits`` would exceed ``cap``.
    """
    bits = start
    while bits <= cap:
        result = evaluate(bits)
        if result is not None:
            return result
        bits *= 2
    raise PrecisionExhausted(f"undecided at the precision cap of {cap} bits")


def _floor_div(x: Fraction, div: int) -> int:
    return (x.numerator) // (x.denominator * div)


def pow_floor_div(s: int, beta: BetaSpec, sub: int, div: int,
                  cap: int = DEFAULT_PRECISION_CAP) -> int:
    """Exact ``floor((s**beta - sub) / div)``.

    Integer exponents are handled in exact integer arithmetic, as are bases
    that are perfect ``den``-th powers. Otherwise ``s**beta`` is enclosed with
    escalating precision until the floor is pinned down.
    """
    if s < 1 or div < 1:
        raise ValueError("pow_floor_div needs s >= 1 and div >= 1")
    power = gmpy2.mpz(s) ** beta.num
    if beta.den == 1:
        return int((power - sub) // div)
    root, exact = gmpy2.iroot(power, beta.den)
    if exact:
        return int((root - sub) // div)
    power = int(power)

    def attempt(bits):
        enc = root_enclosure(power, beta.den, bits)
        lo = _floor_div(enc.lo - sub, div)
        hi = _floor_div(enc.hi - sub, div)
        return lo if lo == hi else None

    return escalate(attempt, cap)


def decide(evaluate, cap: int = DEFAULT_PRECISION_CAP) -> Ordering:
    """Escalate ``evaluate(bits) -> (left, right)`` until the intervals separate."""

    def attempt(bits):
        left, right = evaluate(bits)
        order = iv_compare(left, right)
        return None if order is Ordering.OVERLAP else order

    return escalate(attempt, cap)


def fraction_to_sci(x: Fraction, digits: int = 12, direction: str = "nearest") -> str:
    """Render a rational in scientific notation with ``digits`` significant digits.

    ``direction`` is ``"down"``, ``"up"`` or ``"nearest"``; directed rounding
    keeps rendered interval endpoints outward.
    """
    x = Fraction(x)
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    m = -x if x < 0 else x
    if sign:
        direction = {"down": "up", "up": "down"}.get(direction, direction)
    # estimate the decimal exponent, then correct it exactly
    e = int((m.numerator.bit_length() - m.denominator.bit_length()) * 0.30102999566398120)
    while _pow10(e) > m:
        e -= 1
    while _pow10(e + 1) <= m:
        e += 1
    scaled = m / _pow10(e - digits + 1)
    q, r = divmod(scaled.numerator, scaled.denominator)
    if direction == "up" and r:
        q += 1
    elif direction == "nearest" and 2 * r >= scaled.denominator:
        q += 1
    if q >= 10**digits:
        q //= 10
        e += 1
    mant = str(q)
    body = mant[0] + ("." + mant[1:] if digits > 1 else "")
    return f"{sign}{body}e{e:+d}"


def _pow10(e: int) -> Fraction:
    return Fraction(10**e) if e >= 0 else Fraction(1, 10**-e)
