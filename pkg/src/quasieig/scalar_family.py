"""Closed family of positive scalar functions and their degree calculus.

Three shapes cover every coefficient function used by the operators in this
package::

    MonomialSum          t -> sum_i c_i t**k_i
    PowerOfMonomialSum   t -> (sum_i c_i t**k_i)**e
    Exponential          t -> exp(beta * t)

For a positive function f the degree function is ``2 t f'(t) / f(t)`` and the
k-th degree is ``2 t**k f^(k)(t) / f(t)``. All derivatives are closed form.
Global bounds on the degree are *certified* when they follow from an exact
argument (a positively weighted average of the exponents lies between the
smallest and largest exponent) and merely *sampled* otherwise.

Text form (see :func:`parse`)::

    pow(t, 0.5)                 single power t**0.5
    msum(1*t^0.5 + 2*t^1)       monomial sum
    msum(1*t^0 + 3*t^2)^1.5     real power of a monomial sum
    exp(1.0*t)                  exponential
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "DomainError",
    "ParseError",
    "MonomialSum",
    "PowerOfMonomialSum",
    "Exponential",
    "ScalarFunc",
    "DegreeBounds",
    "monomial",
    "msum",
    "evaluate",
    "degree",
    "kth_degree",
    "degree_slope",
    "degree_bounds",
    "degree_slope_range",
    "degree_derivative_bound",
    "degree_limits",
    "sampled_degree_bounds",
    "parse",
    "SAMPLE_GRID",
]

# 400-point log grid used whenever bounds cannot be certified
SAMPLE_GRID = np.logspace(-8.0, 8.0, 400)


class DomainError(ValueError):
    """Evaluation outside the domain of a scalar function."""


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


def _as_array(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("scalar functions are defined for t >= 0 only")
    return arr


def _out(arr, like):
    if np.ndim(like) == 0:
        return float(arr)
    return arr


@dataclass(frozen=True)
class DegreeBounds:
    """Bounds [inf, sup] of a (k-th) degree function over t > 0.

    ``certified`` is true only when the bounds come from an exact argument,
    never from sampling.
    """

    inf: float
    sup: float
    certified: bool

    def __post_init__(self):
        if self.inf > self.sup:
            raise ValueError(f"inf {self.inf} exceeds sup {self.sup}")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.inf) and math.isfinite(self.sup)

    @property
    def constant(self) -> bool:
        return self.certified and self.inf == self.sup


@dataclass(frozen=True)
class MonomialSum:
    """``t -> sum c_i t**k_i`` with strictly increasing exponents.

    Use :func:`msum` to build one from unsorted or repeated terms.
    """

    terms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        terms = tuple((float(c), float(k)) for c, k in self.terms)
        if not terms:
            raise ValueError("a monomial sum needs at least one term")
        for c, k in terms:
            if c == 0.0 or not math.isfinite(c) or not math.isfinite(k):
                raise ValueError(f"invalid term {c}*t^{k}")
        ks = [k for _, k in terms]
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError(f"exponents must be strictly increasing, got {ks}")
        object.__setattr__(self, "terms", terms)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms])

    @property
    def exponents(self) -> np.ndarray:
        return np.array([k for _, k in self.terms])

    @property
    def positive(self) -> bool:
        return all(c > 0 for c, _ in self.terms)

    @property
    def is_power(self) -> bool:
        return len(self.terms) == 1

    def __mul__(self, other: "MonomialSum") -> "MonomialSum":
        if not isinstance(other, MonomialSum):
            return NotImplemented
        return msum([(c1 * c2, k1 + k2) for c1, k1 in self.terms for c2, k2 in other.terms])

    def __str__(self) -> str:
        if len(self.terms) == 1 and self.terms[0][0] == 1.0:
            return f"pow(t, {self.terms[0][1]!r})"
        parts = []
        for i, (c, k) in enumerate(self.terms):
            if i == 0:
                parts.append(f"{c!r}*t^{k!r}")
            elif c < 0:
                parts.append(f" - {-c!r}*t^{k!r}")
            else:
                parts.append(f" + {c!r}*t^{k!r}")
        return "msum(" + "".join(parts) + ")"

    # -- closed-form pieces ------------------------------------------------

    def _check_zero(self, arr):
        if np.any(arr == 0) and self.exponents[0] < 0:
            raise DomainError(f"{self} is singular at t = 0")

    def _moments(self, arr):
        """(f, mean exponent, variance, mean of k(k-1)) under weights c_i t^k_i."""
        c, k = self.coefficients, self.exponents
        t = np.atleast_1d(arr).ravel()
        if self.positive:
            with np.errstate(divide="ignore"):
                logt = np.log(t)[:, None]
            # k * log(0) with k == 0 must be 0, not nan
            logw = np.where(k[None, :] == 0.0, 0.0, k[None, :] * logt) + np.log(c)[None, :]
            top = logw.max(axis=1, keepdims=True)
            w = np.exp(logw - top)
            total = w.sum(axis=1)
            with np.errstate(over="ignore"):
                value = np.exp(top[:, 0]) * total
            w = w / total[:, None]
            mean = w @ k
            var = (w * (k[None, :] - mean[:, None]) ** 2).sum(axis=1)
            second = w @ (k * (k - 1.0))
            return value, mean, var, second
        with np.errstate(divide="ignore", invalid="ignore"):
            powers = np.where(k[None, :] == 0.0, 1.0, t[:, None] ** k[None, :])
        s0 = powers @ c
        s1 = powers @ (c * k)
        s2 = powers @ (c * k * k)
        s11 = powers @ (c * k * (k - 1.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            mean = s1 / s0
            var = s2 / s0 - mean ** 2
            second = s11 / s0
        return s0, mean, var, second

    def value(self, t):
        arr = _as_array(t)
        self._check_zero(arr)
        c, k = self.coefficients, self.exponents
        tt = np.atleast_1d(arr).ravel()[:, None]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            powers = np.where(k[None, :] == 0.0, 1.0, tt ** k[None, :])
        v = powers @ c
        return _out(v.reshape(np.shape(arr)), t)

    def degree(self, t):
        arr = _as_array(t)
        _, mean, _, _ = self._moments(arr)
        return _out((2.0 * mean).reshape(np.shape(arr)), t)

    def second_degree(self, t):
        arr = _as_array(t)
        _, _, _, second = self._moments(arr)
        return _out((2.0 * second).reshape(np.shape(arr)), t)

    def degree_slope(self, t):
        """t * d/dt degree(t) = 2 * variance of the exponents."""
        arr = _as_array(t)
        _, _, var, _ = self._moments(arr)
        return _out((2.0 * var).reshape(np.shape(arr)), t)

    def derivative(self, t, order: int = 1):
        arr = _as_array(t)
        if order == 0:
            return self.value(t)
        c, k = self.coefficients, self.exponents
        coef = c.copy()
        for j in range(order):
            coef = coef * (k - j)
        keep = coef != 0.0
        if not np.any(keep):
            return _out(np.zeros(np.shape(arr)), t)
        expo = k[keep] - order
        if np.any(arr == 0) and np.any(expo < 0):
            raise DomainError(f"derivative of {self} is singular at t = 0")
        tt = np.atleast_1d(arr).ravel()[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            p = np.where(expo[None, :] == 0.0, 1.0, tt ** expo[None, :])
        res = p @ coef[keep]
        return _out(res.reshape(np.shape(arr)), t)


@dataclass(frozen=True)
class PowerOfMonomialSum:
    """``t -> base(t)**e``."""

    base: MonomialSum
    e: float

    def __post_init__(self):
        if not isinstance(self.base, MonomialSum):
            raise TypeError("base must be a MonomialSum")
        e = float(self.e)
        if e == 0.0 or not math.isfinite(e):
            raise ValueError(f"invalid exponent {self.e}")
        object.__setattr__(self, "e", e)

    @property
    def positive(self) -> bool:
        return self.base.positive

    def __str__(self) -> str:
        b = self.base
        inner = str(b) if not (b.is_power and b.terms[0][0] == 1.0) else f"msum(1.0*t^{b.terms[0][1]!r})"
        return f"{inner}^{self.e!r}"

    def value(self, t):
        bv = self.base.value(t)
        if np.any(np.asarray(bv) < 0) and not float(self.e).is_integer():
            raise DomainError(f"{self}: negative base raised to a non-integer power")
        with np.errstate(over="ignore"):
            return bv ** self.e

    def degree(self, t):
        return self.e * self.base.degree(t)

    def second_degree(self, t):
        d = self.base.degree(t)
        return self.e * (self.e - 1.0) * d * d / 2.0 + self.e * self.base.second_degree(t)

    def degree_slope(self, t):
        return self.e * self.base.degree_slope(t)

    def derivative(self, t, order: int = 1):
        f = self.value(t)
        if order == 0:
            return f
        arr = _as_array(t)
        if np.any(arr == 0):
            raise DomainError("closed-form derivatives of a power are taken for t > 0")
        if order == 1:
            return f * self.degree(t) / (2.0 * arr if np.ndim(t) else 2.0 * float(t))
        if order == 2:
            tt = arr if np.ndim(t) else float(t)
            return f * self.second_degree(t) / (2.0 * tt * tt)
        raise ValueError("only derivatives up to order 2 are available")


@dataclass(frozen=True)
class Exponential:
    """``t -> exp(beta * t)``."""

    beta: float

    def __post_init__(self):
        b = float(self.beta)
        if not math.isfinite(b):
            raise ValueError("rate must be finite")
        object.__setattr__(self, "beta", b)

    positive = True

    def __str__(self) -> str:
        return f"exp({self.beta!r}*t)"

    def value(self, t):
        arr = _as_array(t)
        with np.errstate(over="ignore"):
            return _out(np.exp(self.beta * arr), t)

    def degree(self, t):
        return _out(2.0 * self.beta * _as_array(t), t)

    def second_degree(self, t):
        arr = _as_array(t)
        return _out(2.0 * self.beta ** 2 * arr * arr, t)

    def degree_slope(self, t):
        return self.degree(t)

    def derivative(self, t, order: int = 1):
        return self.beta ** order * self.value(t)


ScalarFunc = Union[MonomialSum, PowerOfMonomialSum, Exponential]


def monomial(k: float, c: float = 1.0) -> MonomialSum:
    """``c * t**k``."""
    return MonomialSum(((c, k),))


def msum(terms) -> MonomialSum:
    """Build a MonomialSum from (coefficient, exponent) pairs in any order.

    Repeated exponents are merged; terms whose coefficients cancel are
    dropped.
    """
    acc: dict[float, float] = {}
    for c, k in terms:
        acc[float(k)] = acc.get(float(k), 0.0) + float(c)
    kept = tuple((c, k) for k, c in sorted(acc.items()) if c != 0.0)
    return MonomialSum(kept)


# -- module level operations ------------------------------------------------


def evaluate(f: ScalarFunc, t):
    """f(t) in closed form. Raises DomainError at t = 0 for negative exponents."""
    return f.value(t)


def degree(f: ScalarFunc, t):
    """``2 t f'(t) / f(t)``."""
    arr = _as_array(t)
    if np.any(arr == 0):
        raise DomainError("degree is evaluated for t > 0; use degree_limits at 0")
    return f.degree(t)


def kth_degree(f: ScalarFunc, k: int, t):
    """``2 t**k f^(k)(t) / f(t)`` for k in {1, 2}."""
    if k == 1:
        return degree(f, t)
    if k == 2:
        arr = _as_array(t)
        if np.any(arr == 0):
            raise DomainError("degree is evaluated for t > 0")
        return f.second_degree(t)
    raise ValueError(f"k-th degree is only supported for k in (1, 2), got {k}")


def degree_slope(f: ScalarFunc, t):
    """``t * d/dt degree(f)(t)`` in closed form."""
    return f.degree_slope(t)


def degree_limits(f: ScalarFunc) -> tuple[float, float]:
    """Limits of the degree function as t -> 0+ and t -> +inf."""
    if isinstance(f, MonomialSum):
        if f.positive:
            return 2.0 * f.terms[0][1], 2.0 * f.terms[-1][1]
        c0, k0 = f.terms[0]
        return 2.0 * k0, 2.0 * f.terms[-1][1]
    if isinstance(f, PowerOfMonomialSum):
        a, b = degree_limits(f.base)
        return f.e * a, f.e * b
    if isinstance(f, Exponential):
        return 0.0, math.copysign(math.inf, f.beta) if f.beta != 0 else 0.0
    raise TypeError(f"unsupported scalar function {f!r}")


def sampled_degree_bounds(f: ScalarFunc, k: int = 1, grid=SAMPLE_GRID) -> DegreeBounds:
    values = np.asarray(kth_degree(f, k, grid), dtype=float)
    values = values[np.isfinite(values)]
    if values.size == 0:
        return DegreeBounds(-math.inf, math.inf, False)
    return DegreeBounds(float(values.min()), float(values.max()), False)


def _second_degree_interval(f: ScalarFunc):
    from .intervals import Interval

    if isinstance(f, MonomialSum):
        vals = [2.0 * k * (k - 1.0) for _, k in f.terms]
        return Interval(min(vals), max(vals))
    if isinstance(f, PowerOfMonomialSum):
        d = Interval(2.0 * f.base.terms[0][1], 2.0 * f.base.terms[-1][1])
        d2 = _second_degree_interval(f.base)
        return f.e * (f.e - 1.0) / 2.0 * d.square() + f.e * d2
    raise TypeError(f"unsupported scalar function {f!r}")


def degree_bounds(f: ScalarFunc, k: int = 1) -> DegreeBounds:
    """Global bounds of the k-th degree of f over t > 0.

    Positively weighted monomial sums have a degree that is a weighted mean
    of ``2 k_i`` (and a second degree that is a weighted mean of
    ``2 k_i (k_i - 1)``), so the extreme exponents give certified bounds.
    """
    if k not in (1, 2):
        raise ValueError(f"k-th degree is only supported for k in (1, 2), got {k}")
    if isinstance(f, Exponential):
        if f.beta == 0.0:
            return DegreeBounds(0.0, 0.0, True)
        if k == 2:
            return DegreeBounds(0.0, math.inf, True)
        return DegreeBounds(0.0, math.inf, True) if f.beta > 0 else DegreeBounds(-math.inf, 0.0, True)
    if not f.positive:
        return sampled_degree_bounds(f, k)
    if k == 1:
        base = f.base if isinstance(f, PowerOfMonomialSum) else f
        lo, hi = 2.0 * base.terms[0][1], 2.0 * base.terms[-1][1]
        if isinstance(f, PowerOfMonomialSum):
            lo, hi = sorted((f.e * lo, f.e * hi))
        return DegreeBounds(lo, hi, True)
    iv = _second_degree_interval(f)
    return DegreeBounds(iv.lo, iv.hi, True)


def degree_slope_range(f: ScalarFunc) -> DegreeBounds:
    """Bounds on ``t * degree'(t)`` over t > 0.

    For a positive monomial sum this quantity is twice the variance of the
    exponents under the weights ``c_i t^k_i``. A variance of values in
    ``[k_1, k_m]`` is at most ``(k_m - k_1)**2 / 4``, so the range
    ``[0, (k_m - k_1)**2]`` is safe with room to spare.
    """
    if isinstance(f, Exponential):
        if f.beta == 0.0:
            return DegreeBounds(0.0, 0.0, True)
        return DegreeBounds(0.0, math.inf, True) if f.beta > 0 else DegreeBounds(-math.inf, 0.0, True)
    if not f.positive:
        vals = np.asarray(degree_slope(f, SAMPLE_GRID))
        vals = vals[np.isfinite(vals)]
        return DegreeBounds(float(vals.min()), float(vals.max()), False)
    base = f.base if isinstance(f, PowerOfMonomialSum) else f
    spread = base.terms[-1][1] - base.terms[0][1]
    hi = spread * spread
    if isinstance(f, PowerOfMonomialSum):
        lo, hi = sorted((0.0, f.e * hi))
        return DegreeBounds(lo, hi, True)
    return DegreeBounds(0.0, hi, True)


def degree_derivative_bound(f: ScalarFunc) -> float:
    """Certified upper bound of ``t * degree'(t)``; the lower bound is 0."""
    if isinstance(f, Exponential):
        raise TypeError("the degree of an exponential has an unbounded slope")
    if isinstance(f, PowerOfMonomialSum) and f.e < 0:
        raise ValueError("slope bound needs a positive outer exponent")
    if not f.positive:
        raise ValueError("slope bound needs positive coefficients")
    return degree_slope_range(f).sup


# -- text form --------------------------------------------------------------

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?inf")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str):
        raise ParseError(message, self.text, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, token: str) -> bool:
        self.skip()
        return self.text.startswith(token, self.pos)

    def expect(self, token: str):
        if not self.peek(token):
            self.error(f"expected {token!r}")
        self.pos += len(token)

    def number(self) -> float:
        self.skip()
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            self.error("expected a number")
        self.pos = m.end()
        return float(m.group())

    def term(self, sign: float) -> tuple[float, float]:
        # c*t^k | c | t^k | t | c*t
        if self.peek("t"):
            coef = 1.0
        else:
            coef = self.number()
            if not self.peek("*"):
                return sign * coef, 0.0
            self.expect("*")
        self.expect("t")
        k = 1.0
        if self.peek("^"):
            self.expect("^")
            k = self.number()
        return sign * coef, k

    def func(self) -> ScalarFunc:
        self.skip()
        start = self.pos
        if self.peek("pow"):
            self.expect("pow")
            self.expect("(")
            self.expect("t")
            self.expect(",")
            k = self.number()
            self.expect(")")
            f: ScalarFunc = monomial(k)
        elif self.peek("msum"):
            self.expect("msum")
            self.expect("(")
            terms = [self.term(1.0)]
            while True:
                if self.peek("+"):
                    self.expect("+")
                    terms.append(self.term(1.0))
                elif self.peek("-"):
                    self.expect("-")
                    terms.append(self.term(-1.0))
                else:
                    break
            self.expect(")")
            try:
                f = msum(terms)
            except ValueError as exc:
                self.pos = start
                self.error(str(exc))
        elif self.peek("exp"):
            self.expect("exp")
            self.expect("(")
            if self.peek("t"):
                beta = 1.0
                self.expect("t")
            else:
                beta = self.number()
                self.expect("*")
                self.expect("t")
            self.expect(")")
            f = Exponential(beta)
        else:
            self.error("expected pow(...), msum(...) or exp(...)")
        if self.peek("^"):
            self.expect("^")
            e = self.number()
            if isinstance(f, Exponential):
                f = Exponential(f.beta * e)
            elif e != 1.0:
                f = PowerOfMonomialSum(f, e)
        return f


def parse(text: str) -> ScalarFunc:
    """Parse the text form of a scalar function.

    >>> str(parse("msum(2*t^1 + 1*t^0.5)"))
    'msum(1.0*t^0.5 + 2.0*t^1.0)'
    """
    p = _Parser(text)
    f = p.func()
    p.skip()
    if p.pos != len(text):
        p.error("unexpected trailing input")
    return f
