"""Continued fractions given by their partial quotients."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .exactreal import RatInterval


class DepthUnavailable(IndexError):
    """The table is too shallow for the requested index."""


@dataclass(frozen=True)
class ConvergentTable:
    """Partial quotients ``a`` and convergents ``p[k]/q[k]`` of ``[a0; a1, a2, ...]``.

    Tables are immutable; :func:`extend_convergents` returns a new one.
    """

    a: tuple[int, ...]
    p: tuple[int, ...]
    q: tuple[int, ...]

    @classmethod
    def from_quotients(cls, quotients: Iterable[int]) -> "ConvergentTable":
        table = cls((), (), ())
        for x in quotients:
            table = extend_convergents(table, x)
        return table

    @property
    def depth(self) -> int:
        """Largest available index (``-1`` for an empty table)."""
        return len(self.a) - 1

    def _need(self, k: int):
        if k < 0 or k > self.depth:
            raise DepthUnavailable(f"index {k} needed, table depth is {self.depth}")


def extend_convergents(table: ConvergentTable, a_next: int) -> ConvergentTable:
    if a_next < 1:
        raise ValueError("partial quotients must be positive")
    # seeds p[-2]=0, p[-1]=1, q[-2]=1, q[-1]=0
    p2, p1 = ((0, 1) + table.p[-2:])[-2:]
    q2, q1 = ((1, 0) + table.q[-2:])[-2:]
    return ConvergentTable(
        table.a + (a_next,),
        table.p + (a_next * p1 + p2,),
        table.q + (a_next * q1 + q2,),
    )


def value_enclosure(table: ConvergentTable, k: int) -> RatInterval:
    """Interval between the ``k``-th and ``k+1``-th convergents; it contains the value."""
    table._need(k + 1)
    return RatInterval.hull(Fraction(table.p[k], table.q[k]), Fraction(table.p[k + 1], table.q[k + 1]))


def remainder_enclosure(table: ConvergentTable, k: int) -> RatInterval:
    """Enclosure of ``|q_k x - p_k|``: ``1/(q_{k+1}+q_k) <= . <= 1/q_{k+1}``."""
    table._need(k + 1)
    q_next = table.q[k + 1]
    return RatInterval(Fraction(1, q_next + table.q[k]), Fraction(1, q_next))


def remainder_sign(k: int) -> int:
    """Sign of ``q_k x - p_k`` for an infinite continued fraction."""
    return 1 if k % 2 == 0 else -1
