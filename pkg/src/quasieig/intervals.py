"""Closed real intervals with exact rational endpoints.

Finite endpoints are held as :class:`fractions.Fraction`, so sums, products
and squares of intervals built from float data are exact and a bound that
touches zero stays exactly zero. Unbounded ends are ``float('inf')``, which
compares correctly against fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Number = Union[Fraction, float, int]

_INF = math.inf


def exact(x: Number) -> Number:
    """Exact value of x: a Fraction when finite, +-inf otherwise."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if math.isnan(x):
        raise ValueError("NaN has no exact value")
    if math.isinf(x):
        return x
    return Fraction(x)


def _add(a: Number, b: Number) -> Number:
    if isinstance(a, float) or isinstance(b, float):
        s = float(a) + float(b)
        if math.isnan(s):
            raise ValueError("inf - inf in interval sum")
        return s
    return a + b


def _mul(a: Number, b: Number) -> Number:
    # an exactly zero factor wins over an unbounded one
    if a == 0 or b == 0:
        return Fraction(0)
    if isinstance(a, float) or isinstance(b, float):
        return float(a) * float(b)
    return a * b


@dataclass(frozen=True)
class Interval:
    lo: Number
    hi: Number

    def __post_init__(self):
        lo, hi = exact(self.lo), exact(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{float(lo)}, {float(hi)}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: Number) -> "Interval":
        return cls(x, x)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def bounded(self) -> bool:
        return not (isinstance(self.lo, float) or isinstance(self.hi, float))

    def contains(self, x: Number) -> bool:
        return self.lo <= exact(x) <= self.hi

    def _coerce(self, other) -> "Interval":
        return other if isinstance(other, Interval) else Interval.point(other)

    def __add__(self, other) -> "Interval":
        o = self._coerce(other)
        return Interval(_add(self.lo, o.lo), _add(self.hi, o.hi))

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> "Interval":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Interval":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "Interval":
        o = self._coerce(other)
        products = [_mul(a, b) for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, k) -> "Interval":
        if isinstance(k, Interval):
            raise TypeError("division by an interval is not supported")
        k = exact(k)
        if k == 0:
            raise ZeroDivisionError("interval division by zero")
        a, b = _mul(self.lo, 1 / k), _mul(self.hi, 1 / k)
        return Interval(min(a, b), max(a, b))

    def square(self) -> "Interval":
        """Tight enclosure of {x*x : x in self}."""
        if self.lo <= 0 <= self.hi:
            return Interval(Fraction(0), max(_mul(self.lo, self.lo), _mul(self.hi, self.hi)))
        m = min(abs(self.lo), abs(self.hi))
        M = max(abs(self.lo), abs(self.hi))
        return Interval(_mul(m, m), _mul(M, M))

    def __repr__(self) -> str:
        return f"Interval({float(self.lo)!r}, {float(self.hi)!r})"
