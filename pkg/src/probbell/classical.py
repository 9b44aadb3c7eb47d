"""Classical combinatorial numbers: binomials, compositions, Stirling and
Bell families, partial Bell polynomials, and Spivey's Bell-number relation.

Every value is returned as a :class:`fractions.Fraction` so callers can mix
them freely with moment data.  Integer-valued tables are memoized.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterator, Sequence, Union

Scalar = Union[int, Fraction]


def ipow(x: Scalar, n: int) -> Fraction:
    """``x**n`` as a Fraction with ``0**0 == 1``."""
    return Fraction(x) ** n


def binomial(n: int, k: int) -> Fraction:
    if k < 0 or k > n:
        return Fraction(0)
    return Fraction(comb(n, k))


@lru_cache(maxsize=None)
def _multinomial(parts: tuple[int, ...]) -> int:
    out = factorial(sum(parts))
    for p in parts:
        out //= factorial(p)
    return out


def multinomial(n: int, parts: Sequence[int]) -> Fraction:
    parts = tuple(parts)
    if any(p < 0 for p in parts):
        raise ValueError(f"multinomial parts must be nonnegative: {parts}")
    if sum(parts) != n:
        raise ValueError(f"multinomial parts {parts} do not sum to {n}")
    return Fraction(_multinomial(parts))


def compositions(l: int, k: int) -> Iterator[tuple[int, ...]]:
    """Yield every k-tuple of positive integers summing to ``l``, lexicographically."""
    if k == 0:
        if l == 0:
            yield ()
        return
    if l < k:
        return
    if k == 1:
        yield (l,)
        return
    # leave at least one unit for each remaining part
    for first in range(1, l - k + 2):
        for rest in compositions(l - first, k - 1):
            yield (first,) + rest


def weak_compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """Yield every k-tuple of nonnegative integers summing to ``n``."""
    if k == 0:
        if n == 0:
            yield ()
        return
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in weak_compositions(n - first, k - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


def stirling2(n: int, k: int) -> Fraction:
    if n < 0 or k < 0:
        return Fraction(0)
    return Fraction(_stirling2(n, k))


@lru_cache(maxsize=None)
def _r_stirling2(n: int, k: int, r: int) -> Fraction:
    return sum(
        (binomial(n, i) * stirling2(i, k) * ipow(r, n - i) for i in range(k, n + 1)),
        Fraction(0),
    )


def r_stirling2(n: int, k: int, r: int) -> Fraction:
    """The r-Stirling number ``{n+r, k+r}_r`` from its binomial-sum form.

    Computed as ``sum_{i=k}^{n} C(n,i) {i,k} r^(n-i)``; for ``r == 0`` only
    the ``i == n`` term survives and this is ``{n,k}``.
    """
    if n < 0 or k < 0 or k > n:
        return Fraction(0)
    return _r_stirling2(n, k, r)


def falling_factorial(x: Scalar, k: int) -> Fraction:
    out = Fraction(1)
    x = Fraction(x)
    for i in range(k):
        out *= x - i
    return out


def bell_poly(n: int, x: Scalar) -> Fraction:
    x = Fraction(x)
    return sum((stirling2(n, k) * x**k for k in range(n + 1)), Fraction(0))


def bell_number(n: int) -> Fraction:
    return bell_poly(n, 1)


def r_bell_poly(n: int, r: int, x: Scalar) -> Fraction:
    x = Fraction(x)
    return sum((r_stirling2(n, k, r) * x**k for k in range(n + 1)), Fraction(0))


def _block_count_vectors(n: int, k: int, size: int) -> Iterator[tuple[int, ...]]:
    """Nonnegative (c_1..c_size) with sum c_i == k and sum i*c_i == n."""

    def rec(i: int, rem_n: int, rem_k: int) -> Iterator[tuple[int, ...]]:
        if i > size:
            if rem_n == 0 and rem_k == 0:
                yield ()
            return
        for c in range(min(rem_k, rem_n // i) + 1):
            for tail in rec(i + 1, rem_n - i * c, rem_k - c):
                yield (c,) + tail

    yield from rec(1, n, k)


def partial_bell(n: int, k: int, xs: Sequence[Scalar]) -> Fraction:
    """Partial Bell polynomial ``B_{n,k}(x_1, ..., x_{n-k+1})``.

    Direct sum over block-count vectors ``(c_1, ..., c_{n-k+1})`` with
    ``sum c_i = k`` and ``sum i c_i = n`` of
    ``n! / prod c_i! * prod (x_i / i!)^c_i``.
    """
    if n < k:
        raise ValueError(f"partial Bell polynomial needs n >= k, got n={n}, k={k}")
    if n == 0:
        return Fraction(1)
    if k == 0:
        return Fraction(0)
    size = n - k + 1
    if len(xs) < size:
        raise ValueError(f"B_{{{n},{k}}} needs {size} arguments, got {len(xs)}")
    xs = [Fraction(x) for x in xs[:size]]
    total = Fraction(0)
    for counts in _block_count_vectors(n, k, size):
        term = Fraction(factorial(n))
        for i, c in enumerate(counts, start=1):
            if c:
                term *= (xs[i - 1] / factorial(i)) ** c / factorial(c)
        total += term
    return total


def partial_bell_recurrence(n: int, k: int, xs: Sequence[Scalar]) -> Fraction:
    """``B_{n,k}`` from ``B_{n,k} = sum_i C(n-1, i-1) x_i B_{n-i,k-1}``."""
    if n < k:
        raise ValueError(f"partial Bell polynomial needs n >= k, got n={n}, k={k}")
    xs = [Fraction(x) for x in xs]
    table: dict[tuple[int, int], Fraction] = {(0, 0): Fraction(1)}

    def b(m: int, j: int) -> Fraction:
        if (m, j) in table:
            return table[(m, j)]
        if j == 0 or m < j:
            return Fraction(0)
        val = sum(
            (binomial(m - 1, i - 1) * xs[i - 1] * b(m - i, j - 1) for i in range(1, m - j + 2)),
            Fraction(0),
        )
        table[(m, j)] = val
        return val

    return b(n, k)


def spivey_classical_rhs(n: int, k: int) -> Fraction:
    """``sum_{l<=k} sum_{j<=n} j^(k-l) C(k,l) {n,j} B_l``; equals ``B_{n+k}``."""
    total = Fraction(0)
    for l in range(k + 1):
        bl = bell_number(l)
        for j in range(n + 1):
            total += ipow(j, k - l) * binomial(k, l) * stirling2(n, j) * bl
    return total


def spivey_classical_poly_rhs(y: Scalar, n: int, l: int) -> Fraction:
    """Polynomial form of Spivey's relation: equals ``bell_poly(l + n, y)``."""
    y = Fraction(y)
    total = Fraction(0)
    for k in range(n + 1):
        s = stirling2(n, k)
        if not s:
            continue
        for m in range(l + 1):
            total += binomial(l, m) * y**k * s * ipow(k, l - m) * bell_poly(m, y)
    return total


def spivey_classical_r_rhs(y: Scalar, r: int, n: int, j: int) -> Fraction:
    """r-Bell form of Spivey's relation: equals ``r_bell_poly(j + n, r, y)``."""
    y = Fraction(y)
    total = Fraction(0)
    for l in range(n + 1):
        for m in range(j + 1):
            head = binomial(n, l) * binomial(j, m) * ipow(r, n - l) * r_bell_poly(m, r, y)
            if not head:
                continue
            for k in range(l + 1):
                total += head * y**k * ipow(k, j - m) * stirling2(l, k)
    return total


def clear_caches() -> None:
    _multinomial.cache_clear()
    _stirling2.cache_clear()
    _r_stirling2.cache_clear()
