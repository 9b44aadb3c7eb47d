"""Named identity suites over parameter grids, and a Monte Carlo moment check.

:func:`verify` evaluates both sides of an identity for every case in a grid
using exact rationals and collects every mismatch in a
:class:`VerificationReport`.  :func:`mc_check` is the only place floating
point is used: it estimates ``E[S_k^n]`` by sampling and reports a z-score
against the exact value.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from . import classical as cl
from . import probabilistic as pb
from .moments import MomentModel, Sampler, parse_dist, sum_moment

IDENTITIES = (
    "EQ1",
    "EQ5",
    "EQ7",
    "EQ8",
    "EQ9",
    "EQ18",
    "T2_1_VS_EGF",
    "T2_3",
    "T2_4",
    "T2_5",
    "T2_6",
    "T2_7",
    "REDUCTION_CHAIN",
    "BERNOULLI_SCALING",
    "DET_SCALING",
    "ROW_SUM",
)

DEFAULT_DISTS = (
    "det:1",
    "det:2",
    "bernoulli:1/2",
    "binomial:3,1/3",
    "poisson:2/3",
    "geometric:1/2",
    "finite:0:1/3,1:1/3,5:1/3",
)

MC_Z_THRESHOLD = 5.0


def default_models() -> tuple[MomentModel, ...]:
    return tuple(parse_dist(s) for s in DEFAULT_DISTS)


class UnknownIdentityError(KeyError):
    pass


@dataclass(frozen=True)
class Grid:
    """Parameter ranges for one identity.  ``None`` marks an unused field."""

    max_degree: int
    r_max: Optional[int] = None
    xs: Optional[tuple[Fraction, ...]] = None
    ys: Optional[tuple[Fraction, ...]] = None
    scales: Optional[tuple[Fraction, ...]] = None
    models: Optional[tuple[MomentModel, ...]] = None

    def to_dict(self) -> dict:
        out: dict = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if f.name == "models":
                out[f.name] = [m.canonical_id for m in v]
            elif isinstance(v, tuple):
                out[f.name] = [str(x) for x in v]
            else:
                out[f.name] = v
        return out


def _fr(*vals) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in vals)


_EQ1_XS = _fr(0, 1, 2, 3, -1, Fraction(1, 2))
_XS = _fr(0, 1, Fraction(1, 2), -1, 2)
_YS = _fr(1, Fraction(1, 2), -1)


def default_grid(identity_id: str) -> Grid:
    models = default_models()
    grids = {
        "EQ1": Grid(10, xs=_EQ1_XS),
        "EQ5": Grid(10, r_max=3, xs=_EQ1_XS),
        "EQ7": Grid(9, r_max=3),
        "EQ8": Grid(15),
        "EQ9": Grid(10),
        "EQ18": Grid(10, xs=_XS, models=models),
        "T2_1_VS_EGF": Grid(12, r_max=3, models=models),
        "T2_3": Grid(10, r_max=3, xs=_XS, models=models),
        "T2_4": Grid(10, r_max=3, xs=_XS, models=models),
        "T2_5": Grid(10, models=models),
        "T2_6": Grid(10, ys=_YS, models=models),
        "T2_7": Grid(10, r_max=3, ys=_YS, models=models),
        "REDUCTION_CHAIN": Grid(10, r_max=3, ys=_YS, models=models),
        "BERNOULLI_SCALING": Grid(10, scales=_fr(Fraction(1, 2), Fraction(1, 3))),
        "DET_SCALING": Grid(10, scales=_fr(2, 3)),
        "ROW_SUM": Grid(10, r_max=3, models=models),
    }
    if identity_id not in grids:
        raise UnknownIdentityError(identity_id)
    return grids[identity_id]


@dataclass(frozen=True)
class IdentityCase:
    identity_id: str
    model: Optional[MomentModel]
    params: tuple[tuple[str, object], ...]

    def to_dict(self) -> dict:
        out: dict = {}
        if self.model is not None:
            out["model"] = self.model.canonical_id
        for name, value in self.params:
            out[name] = value if isinstance(value, (int, str)) else str(value)
        return out


@dataclass(frozen=True)
class Failure:
    case: IdentityCase
    lhs: Fraction
    rhs: Fraction

    def to_dict(self) -> dict:
        return {"params": self.case.to_dict(), "lhs": str(self.lhs), "rhs": str(self.rhs)}


@dataclass
class VerificationReport:
    identity_id: str
    grid: Grid
    cases_run: int = 0
    failures: list[Failure] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self, include_timing: bool = True) -> dict:
        return {
            "identity": self.identity_id,
            "grid": self.grid.to_dict(),
            "cases": self.cases_run,
            "status": "pass" if self.passed else "fail",
            "failures": [f.to_dict() for f in self.failures],
            "elapsed_ms": round(self.elapsed * 1000, 3) if include_timing else None,
        }


# Each suite yields (case, lhs, rhs) triples.
Triple = tuple[IdentityCase, Fraction, Fraction]


def _case(ident: str, model: Optional[MomentModel], **params) -> IdentityCase:
    return IdentityCase(ident, model, tuple(params.items()))


def _eq1(g: Grid) -> Iterator[Triple]:
    for n in range(g.max_degree + 1):
        for x in g.xs:
            lhs = sum(
                (cl.stirling2(n, k) * cl.falling_factorial(x, k) for k in range(n + 1)),
                Fraction(0),
            )
            yield _case("EQ1", None, n=n, x=x), lhs, x**n


def _eq5(g: Grid) -> Iterator[Triple]:
    for r in range(g.r_max + 1):
        for n in range(g.max_degree + 1):
            for x in g.xs:
                lhs = sum(
                    (cl.r_stirling2(n, k, r) * cl.falling_factorial(x, k) for k in range(n + 1)),
                    Fraction(0),
                )
                yield _case("EQ5", None, n=n, r=r, x=x), lhs, (x + r) ** n


def set_partitions(size: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of length ``size``: entry i is the block of element i."""
    if size == 0:
        yield ()
        return
    a = [0] * size
    maxes = [0] * size

    def rec(i: int) -> Iterator[tuple[int, ...]]:
        if i == size:
            yield tuple(a)
            return
        for b in range(maxes[i - 1] + 2):
            a[i] = b
            maxes[i] = max(maxes[i - 1], b)
            yield from rec(i + 1)

    yield from rec(1)


def r_partition_counts(n: int, r: int) -> dict[int, int]:
    """Partitions of an (n+r)-set with the first r elements in distinct
    blocks, counted by (number of blocks - r)."""
    counts: dict[int, int] = {}
    for rgs in set_partitions(n + r):
        # in a restricted growth string the first r are distinct iff rgs[i] == i
        if any(rgs[i] != i for i in range(r)):
            continue
        blocks = (max(rgs) + 1 if rgs else 0) - r
        counts[blocks] = counts.get(blocks, 0) + 1
    return counts


def _eq7(g: Grid) -> Iterator[Triple]:
    for r in range(g.r_max + 1):
        for n in range(g.max_degree - r + 1):
            counts = r_partition_counts(n, r)
            for k in range(n + 1):
                yield _case("EQ7", None, n=n, k=k, r=r), cl.r_stirling2(n, k, r), Fraction(
                    counts.get(k, 0)
                )


def _eq8(g: Grid) -> Iterator[Triple]:
    for n in range(g.max_degree + 1):
        rhs = sum((cl.binomial(n, k) * cl.bell_number(k) for k in range(n + 1)), Fraction(0))
        yield _case("EQ8", None, n=n), cl.bell_number(n + 1), rhs


def _eq9(g: Grid) -> Iterator[Triple]:
    for total in range(g.max_degree + 1):
        for n in range(total + 1):
            k = total - n
            yield _case("EQ9", None, n=n, k=k), cl.bell_number(n + k), cl.spivey_classical_rhs(n, k)


def _eq18(g: Grid) -> Iterator[Triple]:
    for model in g.models:
        for n in range(g.max_degree + 1):
            for x in g.xs:
                lhs = pb.prob_bell_poly(model, n + 1, x)
                yield _case("EQ18", model, n=n, x=x), lhs, pb.recurrence_step(model, n, 0, x)


def _t2_1(g: Grid) -> Iterator[Triple]:
    for model in g.models:
        for r in range(g.r_max + 1):
            for n in range(g.max_degree + 1):
                for k in range(n + 1):
                    yield (
                        _case("T2_1_VS_EGF", model, n=n, k=k, r=r),
                        pb.prob_r_stirling2(model, n, k, r),
                        pb.prob_r_stirling2_egf(model, n, k, r),
                    )


def _t2_3(g: Grid) -> Iterator[Triple]:
    for model in g.models:
        for r in range(g.r_max + 1):
            for n in range(g.max_degree + 1):
                for x in g.xs:
                    yield (
                        _case("T2_3", model, n=n, r=r, x=x),
                        pb.prob_r_bell_poly(model, n, r, x),
                        pb.prob_r_bell_via_partial_bell(model, n, r, x),
                    )


def _t2_4(g: Grid) -> Iterator[Triple]:
    for model in g.models:
        for r in range(g.r_max + 1):
            for n in range(g.max_degree + 1):
                for x in g.xs:
                    yield (
                        _case("T2_4", model, n=n, r=r, x=x),
                        pb.prob_r_bell_poly(model, n + 1, r, x),
                        pb.recurrence_step(model, n, r, x),
                    )


def _pairs(max_sum: int) -> Iterator[tuple[int, int]]:
    for total in range(max_sum + 1):
        for n in range(total + 1):
            yield n, total - n


def _t2_5(g: Grid) -> Iterator[Triple]:
    for model in g.models:
        for n, l in _pairs(g.max_degree):
            yield (
                _case("T2_5", model, n=n, l=l),
                pb.prob_bell_poly(model, l + n, 1),
                pb.spivey_numbers_rhs(model, n, l),
            )


def _t2_6(g: Grid) -> Iterator[Triple]:
    for model in g.models:
        for y in g.ys:
            for n, l in _pairs(g.max_degree):
                yield (
                    _case("T2_6", model, n=n, l=l, y=y),
                    pb.prob_bell_poly(model, l + n, y),
                    pb.spivey_poly_rhs(model, y, n, l),
                )


def _t2_7(g: Grid) -> Iterator[Triple]:
    for model in g.models:
        for r in range(g.r_max + 1):
            for y in g.ys:
                for n, j in _pairs(g.max_degree):
                    yield (
                        _case("T2_7", model, n=n, j=j, r=r, y=y),
                        pb.prob_r_bell_poly(model, j + n, r, y),
                        pb.spivey_general_rhs(model, y, r, n, j),
                    )


def _reduction_chain(g: Grid) -> Iterator[Triple]:
    ident = "REDUCTION_CHAIN"
    one = MomentModel.deterministic(1)
    for model in g.models:
        for y in g.ys:
            for n, l in _pairs(g.max_degree):
                yield (
                    _case(ident, model, link="T2_7|r=0 vs T2_6", n=n, l=l, y=y),
                    pb.spivey_general_rhs(model, y, 0, n, l),
                    pb.spivey_poly_rhs(model, y, n, l),
                )
        for n, l in _pairs(g.max_degree):
            yield (
                _case(ident, model, link="T2_6|y=1 vs T2_5", n=n, l=l),
                pb.spivey_poly_rhs(model, 1, n, l),
                pb.spivey_numbers_rhs(model, n, l),
            )
        for r in range(g.r_max + 1):
            for y in g.ys:
                for j in range(g.max_degree):
                    yield (
                        _case(ident, model, link="T2_7|n=1 vs T2_4", j=j, r=r, y=y),
                        pb.spivey_general_rhs(model, y, r, 1, j),
                        pb.recurrence_step(model, j, r, y),
                    )
    for n, l in _pairs(g.max_degree):
        yield (
            _case(ident, one, link="T2_5|Y=1 vs EQ9", n=n, l=l),
            pb.spivey_numbers_rhs(one, n, l),
            cl.spivey_classical_rhs(n, l),
        )
    for y in g.ys:
        for n, l in _pairs(g.max_degree):
            yield (
                _case(ident, one, link="T2_6|Y=1 vs Stirling form", n=n, l=l, y=y),
                pb.spivey_poly_rhs(one, y, n, l),
                cl.spivey_classical_poly_rhs(y, n, l),
            )
        for r in range(g.r_max + 1):
            for n, j in _pairs(g.max_degree):
                yield (
                    _case(ident, one, link="T2_7|Y=1 vs Stirling form", n=n, j=j, r=r, y=y),
                    pb.spivey_general_rhs(one, y, r, n, j),
                    cl.spivey_classical_r_rhs(y, r, n, j),
                )


def _bernoulli_scaling(g: Grid) -> Iterator[Triple]:
    for p in g.scales:
        model = MomentModel.bernoulli(p)
        for n in range(g.max_degree + 1):
            for k in range(n + 1):
                yield (
                    _case("BERNOULLI_SCALING", model, n=n, k=k),
                    pb.prob_stirling2(model, n, k),
                    p**k * cl.stirling2(n, k),
                )


def _det_scaling(g: Grid) -> Iterator[Triple]:
    for c in g.scales:
        model = MomentModel.deterministic(c)
        for n in range(g.max_degree + 1):
            for k in range(n + 1):
                yield (
                    _case("DET_SCALING", model, n=n, k=k),
                    pb.prob_stirling2(model, n, k),
                    c**n * cl.stirling2(n, k),
                )


def _row_sum(g: Grid) -> Iterator[Triple]:
    for model in g.models:
        for r in range(g.r_max + 1):
            for n in range(g.max_degree + 1):
                row = sum((pb.prob_r_stirling2(model, n, k, r) for k in range(n + 1)), Fraction(0))
                yield _case("ROW_SUM", model, n=n, r=r), row, pb.prob_r_bell_poly(model, n, r, 1)


_SUITES: dict[str, Callable[[Grid], Iterator[Triple]]] = {
    "EQ1": _eq1,
    "EQ5": _eq5,
    "EQ7": _eq7,
    "EQ8": _eq8,
    "EQ9": _eq9,
    "EQ18": _eq18,
    "T2_1_VS_EGF": _t2_1,
    "T2_3": _t2_3,
    "T2_4": _t2_4,
    "T2_5": _t2_5,
    "T2_6": _t2_6,
    "T2_7": _t2_7,
    "REDUCTION_CHAIN": _reduction_chain,
    "BERNOULLI_SCALING": _bernoulli_scaling,
    "DET_SCALING": _det_scaling,
    "ROW_SUM": _row_sum,
}


def verify(
    identity_id: str,
    grid: Optional[Grid] = None,
    models: Optional[Sequence[MomentModel]] = None,
) -> VerificationReport:
    """Check one identity exactly over every case of ``grid``.

    ``grid`` defaults to :func:`default_grid`; ``models`` replaces the grid's
    model list for identities that take one.
    """
    if identity_id not in _SUITES:
        raise UnknownIdentityError(identity_id)
    if grid is None:
        grid = default_grid(identity_id)
    if grid.max_degree < 0 or (grid.r_max is not None and grid.r_max < 0):
        raise ValueError("grid bounds must be nonnegative")
    if models is not None and grid.models is not None:
        grid = replace(grid, models=tuple(models))
    report = VerificationReport(identity_id, grid)
    start = time.perf_counter()
    for case, lhs, rhs in _SUITES[identity_id](grid):
        report.cases_run += 1
        if lhs != rhs:
            report.failures.append(Failure(case, lhs, rhs))
    report.elapsed = time.perf_counter() - start
    return report


@dataclass(frozen=True)
class McEstimate:
    target: str
    samples: int
    estimate: float
    stderr: float
    exact: Fraction
    z_score: float

    def within(self, threshold: float = MC_Z_THRESHOLD) -> bool:
        return abs(self.z_score) <= threshold

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "samples": self.samples,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "exact": str(self.exact),
            "z_score": self.z_score,
        }


_MC_CHUNK = 1 << 17


def mc_check(model: MomentModel, n: int, k: int, samples: int, seed: int) -> McEstimate:
    """Estimate ``E[S_k^n]`` from ``samples`` draws of ``(Y_1, ..., Y_k)``."""
    if samples < 100:
        raise ValueError("mc_check needs at least 100 samples")
    sampler = Sampler(model, seed)
    chunks = []
    left = samples
    while left:
        m = min(left, _MC_CHUNK)
        if k:
            s = sampler.draw((m, k)).sum(axis=1)
        else:
            s = np.zeros(m)
        chunks.append(s**n)
        left -= m
    values = np.concatenate(chunks)
    estimate = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(samples))
    exact = sum_moment(model, k, n)
    diff = estimate - float(exact)
    if stderr > 0:
        z = diff / stderr
    else:
        z = 0.0 if diff == 0 else float(np.copysign(np.inf, diff))
    return McEstimate(f"E[S_{k}^{n}] for {model.canonical_id}", samples, estimate, stderr, exact, z)
