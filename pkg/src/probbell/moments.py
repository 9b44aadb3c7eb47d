"""Random variables described by exact moment sequences.

A :class:`MomentModel` knows ``E[Y^n]`` exactly for every ``n``.  From these
we get moments of sums ``S_k = Y_1 + ... + Y_k`` of independent copies and
the mixed moments ``E[S_k^p * prod_i Y_i^{l_i}]``.  A :class:`Sampler` draws
floating-point samples for Monte Carlo cross-checks; exact and sampled values
never mix.

Distribution spec grammar::

    det:<q> | bernoulli:<q> | binomial:<int>,<q> | poisson:<q> | geometric:<q>
    | finite:<v1>:<w1>,<v2>:<w2>,...

where ``<q>`` is an integer or ``a/b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence, Union

import numpy as np

from .classical import falling_factorial, multinomial, stirling2, weak_compositions
from .series import TruncatedSeries, egf_coefficient, multiply, power

Scalar = Union[int, Fraction]

KINDS = ("deterministic", "bernoulli", "binomial", "poisson", "geometric", "finite_support")
_PREFIX = {
    "deterministic": "det",
    "bernoulli": "bernoulli",
    "binomial": "binomial",
    "poisson": "poisson",
    "geometric": "geometric",
    "finite_support": "finite",
}


class DistSpecError(ValueError):
    """A distribution spec string could not be parsed."""

    def __init__(self, token: str, reason: str):
        super().__init__(f"bad distribution token {token!r}: {reason}")
        self.token = token


def _q(x: Fraction) -> str:
    return str(x)


@dataclass(frozen=True)
class MomentModel:
    kind: str
    params: tuple
    canonical_id: str = field(init=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        _validate(self.kind, self.params)
        object.__setattr__(self, "canonical_id", _canonical_id(self.kind, self.params))

    @classmethod
    def deterministic(cls, c: Scalar) -> MomentModel:
        return cls("deterministic", (Fraction(c),))

    @classmethod
    def bernoulli(cls, p: Scalar) -> MomentModel:
        return cls("bernoulli", (Fraction(p),))

    @classmethod
    def binomial(cls, m: int, p: Scalar) -> MomentModel:
        if int(m) != m:
            raise ValueError(f"binomial trial count must be an integer, got {m}")
        return cls("binomial", (int(m), Fraction(p)))

    @classmethod
    def poisson(cls, lam: Scalar) -> MomentModel:
        return cls("poisson", (Fraction(lam),))

    @classmethod
    def geometric(cls, p: Scalar) -> MomentModel:
        return cls("geometric", (Fraction(p),))

    @classmethod
    def finite_support(cls, pairs: Sequence[tuple[Scalar, Scalar]]) -> MomentModel:
        merged: dict[Fraction, Fraction] = {}
        for v, w in pairs:
            w = Fraction(w)
            if w <= 0:
                raise ValueError(f"finite-support weights must be positive, got {w}")
            merged[Fraction(v)] = merged.get(Fraction(v), Fraction(0)) + w
        return cls("finite_support", tuple(sorted(merged.items())))

    def __str__(self) -> str:
        return self.canonical_id

    def factorial_moment(self, k: int) -> Fraction:
        """``E[(Y)_k]`` for the four parametric families."""
        if self.kind == "bernoulli":
            (p,) = self.params
            return falling_factorial(1, k) * p**k
        if self.kind == "binomial":
            m, p = self.params
            return falling_factorial(m, k) * p**k
        if self.kind == "poisson":
            (lam,) = self.params
            return lam**k
        if self.kind == "geometric":
            # support {1, 2, ...}: E[(Y)_k] = k! (1-p)^(k-1) / p^k for k >= 1
            (p,) = self.params
            if k == 0:
                return Fraction(1)
            return factorial(k) * (1 - p) ** (k - 1) / p**k
        raise ValueError(f"{self.kind} models are not defined through factorial moments")


def _validate(kind: str, params: tuple) -> None:
    if kind == "deterministic":
        (_c,) = params
    elif kind in ("bernoulli", "geometric"):
        (p,) = params
        if not 0 < p <= 1:
            raise ValueError(f"{kind} needs 0 < p <= 1, got {p}")
    elif kind == "binomial":
        m, p = params
        if m < 0:
            raise ValueError(f"binomial needs m >= 0, got {m}")
        if not 0 <= p <= 1:
            raise ValueError(f"binomial needs 0 <= p <= 1, got {p}")
    elif kind == "poisson":
        (lam,) = params
        if lam < 0:
            raise ValueError(f"poisson needs lambda >= 0, got {lam}")
    elif kind == "finite_support":
        if not params:
            raise ValueError("finite support needs at least one point")
        if any(w <= 0 for _, w in params):
            raise ValueError("finite-support weights must be positive")
        total = sum(w for _, w in params)
        if total != 1:
            raise ValueError(f"finite-support weights sum to {total}, not 1")


def _canonical_id(kind: str, params: tuple) -> str:
    prefix = _PREFIX[kind]
    if kind == "finite_support":
        body = ",".join(f"{_q(v)}:{_q(w)}" for v, w in params)
    else:
        body = ",".join(str(p) for p in params)
    return f"{prefix}:{body}"


def _parse_rational(token: str) -> Fraction:
    token = token.strip()
    num, slash, den = token.partition("/")
    try:
        if slash:
            value = Fraction(int(num), int(den))
        else:
            value = Fraction(int(num))
    except (ValueError, ZeroDivisionError):
        raise DistSpecError(token, "expected an integer or a/b rational") from None
    return value


def parse_dist(spec: str) -> MomentModel:
    """Parse a distribution spec such as ``binomial:3,1/3`` into a model."""
    prefix, colon, body = spec.strip().partition(":")
    if not colon or not body:
        raise DistSpecError(spec, "expected <kind>:<params>")
    try:
        if prefix == "det":
            return MomentModel.deterministic(_parse_rational(body))
        if prefix == "bernoulli":
            return MomentModel.bernoulli(_parse_rational(body))
        if prefix == "poisson":
            return MomentModel.poisson(_parse_rational(body))
        if prefix == "geometric":
            return MomentModel.geometric(_parse_rational(body))
        if prefix == "binomial":
            parts = body.split(",")
            if len(parts) != 2:
                raise DistSpecError(body, "binomial takes <int>,<q>")
            m = _parse_rational(parts[0])
            if m.denominator != 1:
                raise DistSpecError(parts[0], "trial count must be an integer")
            return MomentModel.binomial(int(m), _parse_rational(parts[1]))
        if prefix == "finite":
            pairs = []
            for item in body.split(","):
                v, sep, w = item.partition(":")
                if not sep:
                    raise DistSpecError(item, "finite support entries are <value>:<weight>")
                pairs.append((_parse_rational(v), _parse_rational(w)))
            return MomentModel.finite_support(pairs)
    except DistSpecError:
        raise
    except ValueError as exc:
        raise DistSpecError(spec, str(exc)) from None
    raise DistSpecError(prefix, "unknown distribution kind")


@lru_cache(maxsize=None)
def _moment(model: MomentModel, n: int) -> Fraction:
    if n == 0:
        return Fraction(1)
    if model.kind == "deterministic":
        return model.params[0] ** n
    if model.kind == "finite_support":
        return sum((w * v**n for v, w in model.params), Fraction(0))
    return sum(
        (stirling2(n, k) * model.factorial_moment(k) for k in range(n + 1)),
        Fraction(0),
    )


def moment(model: MomentModel, n: int) -> Fraction:
    """Exact ``E[Y^n]``."""
    if n < 0:
        raise ValueError("moment order must be nonnegative")
    return _moment(model, n)


def mgf_series(model: MomentModel, order: int) -> TruncatedSeries:
    """``E[e^{tY}]`` truncated at ``t^order``."""
    return TruncatedSeries.from_egf([moment(model, n) for n in range(order + 1)])


@lru_cache(maxsize=None)
def _sum_moments(model: MomentModel, k: int, order: int) -> tuple[Fraction, ...]:
    if k == 0:
        series = TruncatedSeries.constant(1, order)
    elif k == 1:
        series = mgf_series(model, order)
    else:
        prev = TruncatedSeries(
            Fraction(c, factorial(i)) for i, c in enumerate(_sum_moments(model, k - 1, order))
        )
        series = multiply(prev, mgf_series(model, order))
    return tuple(egf_coefficient(series, i) for i in range(order + 1))


def sum_moment(model: MomentModel, k: int, n: int) -> Fraction:
    """``E[S_k^n]`` read off ``E[e^{tY}]^k``; ``S_0 = 0`` with ``0^0 = 1``."""
    if k < 0 or n < 0:
        raise ValueError("sum_moment needs nonnegative k and n")
    return _sum_moments(model, k, n + 2)[n]


def sum_moment_power(model: MomentModel, k: int, n: int) -> Fraction:
    """``E[S_k^n]`` via :func:`series.power` directly, without the row cache."""
    return egf_coefficient(power(mgf_series(model, n), k), n)


@lru_cache(maxsize=None)
def _joint_moment(model: MomentModel, p: int, ls: tuple[int, ...]) -> Fraction:
    k = len(ls)
    if k == 0:
        return Fraction(1 if p == 0 else 0)
    total = Fraction(0)
    for ps in weak_compositions(p, k):
        term = multinomial(p, ps)
        for pi, li in zip(ps, ls):
            term *= moment(model, pi + li)
            if not term:
                break
        total += term
    return total


def _check_ls(ls: Sequence[int]) -> tuple[int, ...]:
    ls = tuple(int(l) for l in ls)
    if any(l < 1 for l in ls):
        raise ValueError(f"joint moment exponents must be positive integers, got {ls}")
    return ls


def joint_moment(model: MomentModel, p: int, ls: Sequence[int]) -> Fraction:
    """``E[S_k^p * prod_i Y_i^{l_i}]`` with ``k = len(ls)``.

    Expands ``S_k^p`` multinomially over weak compositions of ``p`` and uses
    independence of the copies.  The value is symmetric in ``ls`` so the
    cache key is the sorted tuple.
    """
    ls = _check_ls(ls)
    if p < 0:
        raise ValueError("joint moment power must be nonnegative")
    return _joint_moment(model, p, tuple(sorted(ls)))


def joint_moment_series(model: MomentModel, p: int, ls: Sequence[int]) -> Fraction:
    """Same quantity as :func:`joint_moment`, via the factorization
    ``E[e^{x S_k} prod Y_i^{l_i}] = prod_i E[Y^{l_i} e^{x Y}]``."""
    ls = _check_ls(ls)
    product = TruncatedSeries.constant(1, p)
    for l in ls:
        factor = TruncatedSeries.from_egf([moment(model, j + l) for j in range(p + 1)])
        product = multiply(product, factor)
    return egf_coefficient(product, p)


class Sampler:
    """Seeded iid draws from a :class:`MomentModel` as doubles."""

    def __init__(self, model: MomentModel, seed: int):
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.model = model
        self.seed = seed
        self._rng = np.random.Generator(np.random.PCG64(seed))
        if model.kind == "finite_support":
            self._values = np.array([float(v) for v, _ in model.params])
            self._weights = np.array([float(w) for _, w in model.params])
            self._weights /= self._weights.sum()

    def sample(self) -> float:
        return float(self.draw(1)[0])

    def draw(self, size) -> np.ndarray:
        """An array of iid draws with the given shape."""
        rng = self._rng
        kind, params = self.model.kind, self.model.params
        if kind == "deterministic":
            return np.full(size, float(params[0]))
        if kind == "bernoulli":
            return rng.binomial(1, float(params[0]), size=size).astype(float)
        if kind == "binomial":
            return rng.binomial(params[0], float(params[1]), size=size).astype(float)
        if kind == "poisson":
            return rng.poisson(float(params[0]), size=size).astype(float)
        if kind == "geometric":
            return rng.geometric(float(params[0]), size=size).astype(float)
        idx = rng.choice(len(self._values), size=size, p=self._weights)
        return self._values[idx]


def clear_caches() -> None:
    _moment.cache_clear()
    _sum_moments.cache_clear()
    _joint_moment.cache_clear()
