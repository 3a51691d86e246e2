"""Paired partial-quotient sequences defining theta and eta.

Three modes:

* ``beta``     -- a_k = floor((s_{k-1}^beta - q_{k-2}) / q_{k-1}) + 1,
                  b_k = floor((q_k^beta - s_{k-2}) / s_{k-1}) + 1;
* ``superexp`` -- the same recursion with exponent ``k`` at step ``k``;
* ``bounded``  -- periodic patterns of bounded partial quotients.

In every mode a_0 = b_0 = 1. Here p/q are the convergents of theta and r/s
those of eta.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import gmpy2

from .cfcore import ConvergentTable, extend_convergents, value_enclosure
from .exactreal import (
    DEFAULT_PRECISION_CAP,
    BetaSpec,
    Ordering,
    PrecisionExhausted,
    RatInterval,
    dec_to_int,
    int_to_dec,
    iv_compare,
    pow_floor_div,
)

DEFAULT_MAX_BITS = 2**24
SUPEREXP_SEED_BETA = BetaSpec(2)


class Mode(enum.Enum):
    BETA = "beta"
    SUPEREXP = "superexp"
    BOUNDED = "bounded"


class SizeLimitExceeded(PrecisionExhausted):
    """A power in the recursion would exceed the integer size cap."""


class DegenerateEqualValues(ValueError):
    pass


class ConstructionInvariantError(AssertionError):
    pass


@dataclass(frozen=True)
class PairConstruction:
    mode: Mode
    theta: ConvergentTable
    eta: ConvergentTable
    beta: Optional[BetaSpec] = None
    a_pattern: Optional[tuple[int, ...]] = None
    b_pattern: Optional[tuple[int, ...]] = None
    ordered: Optional[bool] = None  # 1 < eta < theta < 2 certified / refuted / undecided
    perturbed: Optional[tuple[int, int]] = None  # (k, delta) from the failure-injection hook

    @property
    def depth(self) -> int:
        return min(self.theta.depth, self.eta.depth)

    def exponent(self, k: int) -> BetaSpec:
        """Exponent used by the recursion at step ``k``."""
        if self.mode is Mode.BETA:
            return self.beta
        if self.mode is Mode.SUPEREXP:
            return SUPEREXP_SEED_BETA if k <= 2 else BetaSpec(k)
        raise ValueError("bounded constructions have no exponent")


def _guard(base: int, e: BetaSpec, max_bits: int):
    projected = base.bit_length() * e.num
    if projected > max_bits:
        raise SizeLimitExceeded(
            f"base**{e.num} would have about {projected} bits (cap {max_bits})")


def _strictly_between(x: int, base: int, e: BetaSpec) -> bool:
    """``base**e < x < 2 * base**e`` in exact integer arithmetic."""
    lhs = gmpy2.mpz(x) ** e.den
    power = gmpy2.mpz(base) ** e.num
    return power < lhs < (power << e.den)


def _certify_order(theta: ConvergentTable, eta: ConvergentTable) -> Optional[bool]:
    depth = min(theta.depth, eta.depth)
    if depth < 1:
        return None
    th = value_enclosure(theta, depth - 1)
    et = value_enclosure(eta, depth - 1)
    one, two = RatInterval.point(1), RatInterval.point(2)
    orders = [iv_compare(one, et), iv_compare(et, th), iv_compare(th, two)]
    if all(o is Ordering.LESS for o in orders):
        return True
    if any(o is Ordering.GREATER for o in orders):
        return False
    return None


def _recursive(mode: Mode, beta: Optional[BetaSpec], depth: int, cap: int, max_bits: int) -> PairConstruction:
    if depth < 2:
        raise ValueError("depth must be at least 2")
    stub = PairConstruction(mode, ConvergentTable((), (), ()), ConvergentTable((), (), ()), beta=beta)
    seed = beta if mode is Mode.BETA else SUPEREXP_SEED_BETA
    b1 = pow_floor_div(2, seed, 0, 1, cap) + 1
    theta = ConvergentTable.from_quotients([1, 2])
    eta = ConvergentTable.from_quotients([1, b1])
    q, s = theta.q, eta.q
    if not _strictly_between(s[1], q[1], seed):
        raise ConstructionInvariantError("seed b_1 violates q_1^beta < s_1 < 2 q_1^beta")
    for k in range(2, depth + 1):
        e = stub.exponent(k)
        _guard(s[k - 1], e, max_bits)
        a_k = pow_floor_div(s[k - 1], e, q[k - 2], q[k - 1], cap) + 1
        theta = extend_convergents(theta, a_k)
        q = theta.q
        _guard(q[k], e, max_bits)
        b_k = pow_floor_div(q[k], e, s[k - 2], s[k - 1], cap) + 1
        eta = extend_convergents(eta, b_k)
        s = eta.q
        # q_1 = 2 = 2 s_0^beta is a seed value, so the q-bounds start at k = 2
        if not (_strictly_between(q[k], s[k - 1], e) and _strictly_between(s[k], q[k], e)):
            raise ConstructionInvariantError(f"denominator bounds fail at k={k}")
    return replace(stub, theta=theta, eta=eta, ordered=_certify_order(theta, eta))


def generate_beta(beta: BetaSpec, depth: int, *, cap: int = DEFAULT_PRECISION_CAP,
                  max_bits: int = DEFAULT_MAX_BITS) -> PairConstruction:
    """Build theta, eta for a rational ``beta > 1`` with tables to index ``depth``."""
    return _recursive(Mode.BETA, beta, depth, cap, max_bits)


def generate_superexp(depth: int, *, cap: int = DEFAULT_PRECISION_CAP,
                      max_bits: int = DEFAULT_MAX_BITS) -> PairConstruction:
    """Exponent ``k`` at step ``k``; seeds shared with ``beta = 2`` (b_1 = 5)."""
    return _recursive(Mode.SUPEREXP, None, depth, cap, max_bits)


def _periodic(pattern: Sequence[int], depth: int) -> list[int]:
    return [1] + [pattern[i % len(pattern)] for i in range(depth)]


def generate_bounded(a_pattern: Sequence[int], b_pattern: Sequence[int], depth: int) -> PairConstruction:
    """theta = [1; a_pattern repeated], eta = [1; b_pattern repeated]."""
    a_pattern, b_pattern = tuple(a_pattern), tuple(b_pattern)
    if not a_pattern or not b_pattern:
        raise ValueError("patterns must be nonempty")
    if min(a_pattern + b_pattern) < 1:
        raise ValueError("partial quotients must be positive")
    if depth < 2:
        raise ValueError("depth must be at least 2")
    period = math.lcm(len(a_pattern), len(b_pattern))
    if _periodic(a_pattern, period) == _periodic(b_pattern, period):
        raise DegenerateEqualValues("the two patterns define the same number")
    theta = ConvergentTable.from_quotients(_periodic(a_pattern, depth))
    eta = ConvergentTable.from_quotients(_periodic(b_pattern, depth))
    return PairConstruction(Mode.BOUNDED, theta, eta, a_pattern=a_pattern, b_pattern=b_pattern,
                            ordered=_certify_order(theta, eta))


def extend_construction(c: PairConstruction, depth: int, *, cap: int = DEFAULT_PRECISION_CAP,
                        max_bits: int = DEFAULT_MAX_BITS) -> PairConstruction:
    """Regenerate ``c`` with tables to index ``depth`` (never shallower)."""
    depth = max(depth, c.depth)
    if c.perturbed is not None:
        raise ValueError("perturbed constructions cannot be extended")
    if c.mode is Mode.BETA:
        return generate_beta(c.beta, depth, cap=cap, max_bits=max_bits)
    if c.mode is Mode.SUPEREXP:
        return generate_superexp(depth, cap=cap, max_bits=max_bits)
    return generate_bounded(c.a_pattern, c.b_pattern, depth)


def perturb_quotient(c: PairConstruction, k: int, delta: int = 1) -> PairConstruction:
    """Test hook: bump a single a_k by ``delta`` and rebuild theta's convergents."""
    if not 1 <= k <= c.theta.depth:
        raise ValueError(f"no partial quotient a_{k} to perturb")
    a = list(c.theta.a)
    a[k] += delta
    theta = ConvergentTable.from_quotients(a)
    return replace(c, theta=theta, ordered=_certify_order(theta, c.eta), perturbed=(k, delta))


# --------------------------------------------------------------------------
# JSON


def to_json(c: PairConstruction) -> dict:
    doc = {
        "schema": "latexp/construction",
        "mode": c.mode.value,
        "beta": str(c.beta) if c.beta is not None else None,
        "a_pattern": [str(x) for x in c.a_pattern] if c.a_pattern else None,
        "b_pattern": [str(x) for x in c.b_pattern] if c.b_pattern else None,
        "depth": str(c.depth),
        "ordered": c.ordered,
        "a": [int_to_dec(x) for x in c.theta.a],
        "b": [int_to_dec(x) for x in c.eta.a],
        "p": [int_to_dec(x) for x in c.theta.p],
        "q": [int_to_dec(x) for x in c.theta.q],
        "r": [int_to_dec(x) for x in c.eta.p],
        "s": [int_to_dec(x) for x in c.eta.q],
    }
    if c.perturbed is not None:
        doc["perturbed"] = [str(x) for x in c.perturbed]
    return doc


def from_json(doc: dict) -> PairConstruction:
    theta = ConvergentTable.from_quotients(dec_to_int(x) for x in doc["a"])
    eta = ConvergentTable.from_quotients(dec_to_int(x) for x in doc["b"])
    for table, pk, qk in ((theta, "p", "q"), (eta, "r", "s")):
        if [int_to_dec(x) for x in table.p] != doc[pk] or [int_to_dec(x) for x in table.q] != doc[qk]:
            raise ValueError(f"convergents {pk}/{qk} disagree with the partial quotients")
    pattern = lambda key: tuple(int(x) for x in doc[key]) if doc.get(key) else None
    perturbed = tuple(int(x) for x in doc["perturbed"]) if doc.get("perturbed") else None
    return PairConstruction(
        Mode(doc["mode"]),
        theta,
        eta,
        beta=BetaSpec.parse(doc["beta"]) if doc.get("beta") else None,
        a_pattern=pattern("a_pattern"),
        b_pattern=pattern("b_pattern"),
        ordered=doc.get("ordered"),
        perturbed=perturbed,
    )
