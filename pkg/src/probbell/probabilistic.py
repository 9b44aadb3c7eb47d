"""Probabilistic r-Stirling numbers and probabilistic r-Bell polynomials.

For a random variable ``Y`` (a :class:`~probbell.moments.MomentModel`) and
``S_k`` the sum of ``k`` independent copies, the probabilistic r-Stirling
numbers are the EGF coefficients of ``(E[e^{tY}] - 1)^k e^{rt} / k!`` and
the probabilistic r-Bell polynomial is ``sum_k {n+r, k+r}_{r,Y} x^k``.

Several independent routes are provided for each quantity so that they can
be checked against each other:

* alternating moment sums of ``S_j + r`` versus series expansion,
* direct sum versus partial Bell polynomials versus the one-step recurrence,
* the generalized Spivey relation at three levels of generality, with the
  two special cases transcribed separately rather than delegated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Union

from .classical import binomial, compositions, ipow, multinomial, partial_bell
from .moments import (
    MomentModel,
    joint_moment,
    joint_moment_series,
    mgf_series,
    moment,
    sum_moment,
)
from .series import TruncatedSeries, egf_coefficient, exponential, multiply, power, scale

Scalar = Union[int, Fraction]

ROUTES = ("moment-sum", "egf", "partial-bell", "recurrence", "spivey")


@dataclass(frozen=True)
class ProbStirlingKey:
    model_id: str
    n: int
    k: int
    r: int


@dataclass(frozen=True)
class ProbBellValue:
    value: Fraction
    provenance: str

    def __post_init__(self):
        if self.provenance not in ROUTES:
            raise ValueError(f"unknown route {self.provenance!r}")


_models: dict[str, MomentModel] = {}


def _key(model: MomentModel, n: int, k: int, r: int) -> ProbStirlingKey:
    _models.setdefault(model.canonical_id, model)
    return ProbStirlingKey(model.canonical_id, n, k, r)


@lru_cache(maxsize=None)
def _prob_stirling2(key: ProbStirlingKey) -> Fraction:
    model = _models[key.model_id]
    n, k = key.n, key.k
    total = Fraction(0)
    for l in range(k + 1):
        total += binomial(k, l) * (-1) ** (k - l) * sum_moment(model, l, n)
    return total / factorial(k)


def prob_stirling2(model: MomentModel, n: int, k: int) -> Fraction:
    """``{n, k}_Y = (1/k!) sum_l C(k,l) (-1)^(k-l) E[S_l^n]``; zero for ``k > n``."""
    if k > n or k < 0:
        return Fraction(0)
    return _prob_stirling2(_key(model, n, k, 0))


def shifted_sum_moment(model: MomentModel, j: int, n: int, r: int) -> Fraction:
    """``E[(S_j + r)^n]`` by binomial expansion in ``r``."""
    return sum(
        (binomial(n, i) * ipow(r, n - i) * sum_moment(model, j, i) for i in range(n + 1)),
        Fraction(0),
    )


@lru_cache(maxsize=None)
def _prob_r_stirling2(key: ProbStirlingKey) -> Fraction:
    model = _models[key.model_id]
    n, k, r = key.n, key.k, key.r
    total = Fraction(0)
    for j in range(k + 1):
        total += binomial(k, j) * (-1) ** (k - j) * shifted_sum_moment(model, j, n, r)
    return total / factorial(k)


def prob_r_stirling2(model: MomentModel, n: int, k: int, r: int) -> Fraction:
    """``{n+r, k+r}_{r,Y}`` as an alternating sum of moments of ``S_j + r``.

    No shortcut is taken for ``k > n``; the alternating sum vanishes there
    on its own.
    """
    if n < 0 or k < 0:
        return Fraction(0)
    return _prob_r_stirling2(_key(model, n, k, r))


@lru_cache(maxsize=None)
def _egf_base(model: MomentModel, k: int, r: int, order: int) -> TruncatedSeries:
    shifted = mgf_series(model, order) - TruncatedSeries.constant(1, order)
    base = multiply(power(shifted, k), TruncatedSeries.exp_linear(r, order))
    return scale(base, Fraction(1, factorial(k)))


def prob_r_stirling2_egf(model: MomentModel, n: int, k: int, r: int) -> Fraction:
    """``{n+r, k+r}_{r,Y}`` read off ``(E[e^{tY}] - 1)^k e^{rt} / k!``."""
    if n < 0 or k < 0:
        return Fraction(0)
    # one guard coefficient past the requested index
    return egf_coefficient(_egf_base(model, k, r, n + 1), n)


def prob_bell_poly(model: MomentModel, n: int, x: Scalar) -> Fraction:
    x = Fraction(x)
    return sum((prob_stirling2(model, n, k) * x**k for k in range(n + 1)), Fraction(0))


def prob_r_bell_poly(model: MomentModel, n: int, r: int, x: Scalar) -> Fraction:
    """``phi_{n,r}^Y(x) = sum_k {n+r, k+r}_{r,Y} x^k``."""
    x = Fraction(x)
    return sum((prob_r_stirling2(model, n, k, r) * x**k for k in range(n + 1)), Fraction(0))


def prob_r_bell_egf(model: MomentModel, n: int, r: int, x: Scalar) -> Fraction:
    """``phi_{n,r}^Y(x)`` as the coefficient of ``exp(x (E[e^{tY}] - 1)) e^{rt}``."""
    order = n + 1
    inner = scale(mgf_series(model, order) - TruncatedSeries.constant(1, order), x)
    gf = multiply(exponential(inner), TruncatedSeries.exp_linear(r, order))
    return egf_coefficient(gf, n)


def prob_r_bell_via_partial_bell(model: MomentModel, n: int, r: int, x: Scalar) -> Fraction:
    """``sum_l C(n,l) r^(n-l) sum_k B_{l,k}(x E[Y], ..., x E[Y^{l-k+1}])``."""
    x = Fraction(x)
    total = Fraction(0)
    for l in range(n + 1):
        inner = Fraction(0)
        for k in range(l + 1):
            args = [x * moment(model, i) for i in range(1, l - k + 2)]
            inner += partial_bell(l, k, args)
        total += binomial(n, l) * ipow(r, n - l) * inner
    return total


def recurrence_step(model: MomentModel, n: int, r: int, x: Scalar) -> Fraction:
    """Right side of the one-step recurrence; equals ``phi_{n+1,r}^Y(x)``."""
    x = Fraction(x)
    total = Fraction(0)
    for k in range(n + 1):
        total += binomial(n, k) * moment(model, k + 1) * prob_r_bell_poly(model, n - k, r, x)
    return x * total + r * prob_r_bell_poly(model, n, r, x)


def prob_r_bell_by_recurrence(model: MomentModel, n: int, r: int, x: Scalar) -> Fraction:
    """``phi_{n,r}^Y(x)`` built up from ``phi_0 = 1`` using only the recurrence."""
    x = Fraction(x)
    phis = [Fraction(1)]
    for m in range(n):
        step = sum(
            (binomial(m, k) * moment(model, k + 1) * phis[m - k] for k in range(m + 1)),
            Fraction(0),
        )
        phis.append(x * step + r * phis[m])
    return phis[n]


def spivey_general_rhs(model: MomentModel, y: Scalar, r: int, n: int, j: int) -> Fraction:
    """Generalized Spivey sum for ``phi_{j+n,r}^Y(y)``.

    ``sum_l C(n,l) r^(n-l) sum_k sum_m y^k/k! C(j,m)
    sum_{l_1+..+l_k=l} multinomial(l; l_1..l_k) E[S_k^(j-m) prod Y_i^l_i]
    phi_{m,r}^Y(y)`` with every ``l_i >= 1``.
    """
    y = Fraction(y)
    phis = [prob_r_bell_poly(model, m, r, y) for m in range(j + 1)]
    total = Fraction(0)
    for l in range(n + 1):
        outer = binomial(n, l) * ipow(r, n - l)
        if not outer:
            continue
        for k in range(l + 1):
            yk = y**k / factorial(k)
            if not yk:
                continue
            for m in range(j + 1):
                acc = Fraction(0)
                for ls in compositions(l, k):
                    acc += multinomial(l, ls) * joint_moment(model, j - m, ls)
                if acc:
                    total += outer * yk * binomial(j, m) * acc * phis[m]
    return total


def spivey_numbers_rhs(model: MomentModel, n: int, l: int) -> Fraction:
    """Spivey sum for the probabilistic Bell numbers ``phi_{l+n}^Y``.

    Written out on its own and using the series route for the mixed
    moments, so agreement with :func:`spivey_general_rhs` is a real check.
    """
    phis = [prob_bell_poly(model, m, 1) for m in range(l + 1)]
    total = Fraction(0)
    for k in range(n + 1):
        for m in range(l + 1):
            s = Fraction(0)
            for parts in compositions(n, k):
                s += multinomial(n, parts) * joint_moment_series(model, l - m, parts)
            total += binomial(l, m) * s / factorial(k) * phis[m]
    return total


def spivey_poly_rhs(model: MomentModel, y: Scalar, n: int, l: int) -> Fraction:
    """Spivey sum for the probabilistic Bell polynomials ``phi_{l+n}^Y(y)``."""
    y = Fraction(y)
    phis = [prob_bell_poly(model, m, y) for m in range(l + 1)]
    total = Fraction(0)
    for k in range(n + 1):
        weight = y**k / factorial(k)
        for m in range(l + 1):
            s = Fraction(0)
            for parts in compositions(n, k):
                s += multinomial(n, parts) * joint_moment(model, l - m, parts)
            total += binomial(l, m) * weight * s * phis[m]
    return total


def clear_caches() -> None:
    _prob_stirling2.cache_clear()
    _prob_r_stirling2.cache_clear()
    _egf_base.cache_clear()
