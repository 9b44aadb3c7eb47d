"""Truncated formal power series over exact rationals.

A :class:`TruncatedSeries` stores ordinary coefficients ``c_0..c_N`` of
``sum c_n t^n``.  Exponential generating function coefficients are recovered
on demand with :func:`egf_coefficient`, which scales by ``n!``.

Arithmetic between series of different orders silently truncates to the
smaller order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class TruncatedSeries:
    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable[Scalar]):
        cs = tuple(Fraction(c) for c in coeffs)
        if not cs:
            raise ValueError("a truncated series needs at least one coefficient")
        object.__setattr__(self, "coeffs", cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, c: Scalar, order: int) -> TruncatedSeries:
        return cls([c] + [0] * order)

    @classmethod
    def zero(cls, order: int) -> TruncatedSeries:
        return cls([0] * (order + 1))

    @classmethod
    def from_egf(cls, values: Sequence[Scalar]) -> TruncatedSeries:
        """Build ``sum values[n] t^n / n!``; the order is ``len(values) - 1``."""
        return cls(Fraction(v) / factorial(n) for n, v in enumerate(values))

    @classmethod
    def exp_linear(cls, a: Scalar, order: int) -> TruncatedSeries:
        """Truncation of ``e^{a t}``."""
        a = Fraction(a)
        return cls(a**n / factorial(n) for n in range(order + 1))

    def truncate(self, order: int) -> TruncatedSeries:
        if order > self.order:
            raise ValueError(f"cannot extend a series of order {self.order} to {order}")
        return TruncatedSeries(self.coeffs[: order + 1])

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n]

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        return add(self, other)

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        order = min(self.order, other.order)
        return TruncatedSeries(self.coeffs[i] - other.coeffs[i] for i in range(order + 1))

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries(-c for c in self.coeffs)

    def __mul__(self, other: Union[TruncatedSeries, Scalar]) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            return multiply(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> TruncatedSeries:
        return power(self, k)

    def __repr__(self) -> str:
        terms = ", ".join(str(c) for c in self.coeffs)
        return f"TruncatedSeries([{terms}])"


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    order = min(a.order, b.order)
    return TruncatedSeries(a.coeffs[i] + b.coeffs[i] for i in range(order + 1))


def scale(a: TruncatedSeries, c: Scalar) -> TruncatedSeries:
    c = Fraction(c)
    return TruncatedSeries(c * x for x in a.coeffs)


def multiply(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product, truncated at ``min(a.order, b.order)``."""
    order = min(a.order, b.order)
    ac, bc = a.coeffs, b.coeffs
    out = []
    for n in range(order + 1):
        s = Fraction(0)
        for i in range(n + 1):
            if ac[i] and bc[n - i]:
                s += ac[i] * bc[n - i]
        out.append(s)
    return TruncatedSeries(out)


def power(a: TruncatedSeries, k: int) -> TruncatedSeries:
    if k < 0:
        raise ValueError("power exponent must be nonnegative")
    result = TruncatedSeries.constant(1, a.order)
    base = a
    while k:
        if k & 1:
            result = multiply(result, base)
        k >>= 1
        if k:
            base = multiply(base, base)
    return result


def exponential(a: TruncatedSeries) -> TruncatedSeries:
    """``exp(a)`` as ``sum_k a^k / k!``; requires a zero constant term."""
    if a.coeffs[0] != 0:
        raise ValueError(
            f"exponential needs a series with zero constant term, got {a.coeffs[0]}"
        )
    result = TruncatedSeries.constant(1, a.order)
    term = TruncatedSeries.constant(1, a.order)
    # a^k vanishes below t^k, so k <= order suffices
    for k in range(1, a.order + 1):
        term = scale(multiply(term, a), Fraction(1, k))
        result = add(result, term)
    return result


def egf_coefficient(a: TruncatedSeries, n: int) -> Fraction:
    """Coefficient of ``t^n / n!``, i.e. ``c_n * n!``."""
    if n < 0 or n > a.order:
        raise IndexError(f"coefficient index {n} outside 0..{a.order}")
    return a.coeffs[n] * factorial(n)
