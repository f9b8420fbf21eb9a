"""Exact arithmetic in the ring Z[sqrt(3)].

Perimeters and areas of hexagonal / square-grid configurations are all of
the form ``x + y*sqrt(3)`` with integer ``x`` and ``y``.  Keeping them in
that form lets the restricted search pick minima and detect ties with pure
integer comparisons.
"""
from __future__ import annotations

import decimal
import math
from dataclasses import dataclass

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

SQRT3 = math.sqrt(3.0)


def _checked(value: int) -> int:
    if not INT64_MIN <= value <= INT64_MAX:
        raise OverflowError(f"integer overflow in Z[sqrt3] arithmetic: {value}")
    return value


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True, slots=True)
class Q3:
    """The real number ``x + y*sqrt(3)``; the representation is unique."""

    x: int = 0
    y: int = 0

    def __post_init__(self):
        _checked(self.x)
        _checked(self.y)

    def __add__(self, other: Q3) -> Q3:
        return q3_add(self, other)

    def __sub__(self, other: Q3) -> Q3:
        return Q3(_checked(self.x - other.x), _checked(self.y - other.y))

    def __neg__(self) -> Q3:
        return Q3(_checked(-self.x), _checked(-self.y))

    def __mul__(self, other: Q3 | int) -> Q3:
        if isinstance(other, int):
            return Q3(_checked(self.x * other), _checked(self.y * other))
        return q3_mul(self, other)

    __rmul__ = __mul__

    def __lt__(self, other: Q3) -> bool:
        return q3_cmp(self, other) < 0

    def __le__(self, other: Q3) -> bool:
        return q3_cmp(self, other) <= 0

    def __gt__(self, other: Q3) -> bool:
        return q3_cmp(self, other) > 0

    def __ge__(self, other: Q3) -> bool:
        return q3_cmp(self, other) >= 0

    def __float__(self) -> float:
        return q3_to_real(self)

    def __str__(self) -> str:
        if self.y == 0:
            return str(self.x)
        if self.x == 0:
            return f"{self.y}√3"
        sign = "+" if self.y >= 0 else "-"
        return f"{self.x}{sign}{abs(self.y)}√3"

    def to_json(self) -> dict:
        return {"x": self.x, "y": self.y}

    @classmethod
    def from_json(cls, data: dict) -> Q3:
        return cls(int(data["x"]), int(data["y"]))


def q3_add(a: Q3, b: Q3) -> Q3:
    return Q3(_checked(a.x + b.x), _checked(a.y + b.y))


def q3_mul(a: Q3, b: Q3) -> Q3:
    x = _checked(_checked(a.x * b.x) + _checked(3 * _checked(a.y * b.y)))
    y = _checked(_checked(a.x * b.y) + _checked(a.y * b.x))
    return Q3(x, y)


def q3_cmp(a: Q3, b: Q3) -> int:
    """Return -1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``.

    Only integer operations are used: with ``dx = a.x - b.x`` and
    ``dy = a.y - b.y`` the sign of ``dx + dy*sqrt(3)`` follows from the signs
    of ``dx`` and ``dy`` and, when they disagree, from ``dx**2`` vs ``3*dy**2``.
    """
    dx = _checked(a.x - b.x)
    dy = _checked(a.y - b.y)
    sx, sy = _sign(dx), _sign(dy)
    if sx == sy:
        return sx
    if sx == 0:
        return sy
    if sy == 0:
        return sx
    # opposite signs: the larger magnitude wins
    lhs = _checked(dx * dx)
    rhs = _checked(3 * _checked(dy * dy))
    if lhs > rhs:
        return sx
    # lhs == rhs is impossible because sqrt(3) is irrational
    return sy


_CTX = decimal.Context(prec=60)
_SQRT3_DEC = _CTX.sqrt(decimal.Decimal(3))


def q3_to_real(a: Q3) -> float:
    """Closest double to ``x + y*sqrt(3)`` (evaluated with 60 digits first)."""
    if a.y == 0:
        return float(a.x)
    return float(_CTX.add(decimal.Decimal(a.x), _CTX.multiply(decimal.Decimal(a.y), _SQRT3_DEC)))
