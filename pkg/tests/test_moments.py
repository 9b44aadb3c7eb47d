from fractions import Fraction as F
from math import prod

import numpy as np
import pytest

from probbell.classical import multinomial, weak_compositions
from probbell.moments import (
    DistSpecError,
    MomentModel,
    Sampler,
    joint_moment,
    joint_moment_series,
    mgf_series,
    moment,
    parse_dist,
    sum_moment,
    sum_moment_power,
)
from probbell.series import TruncatedSeries

from oracles import (
    bell_numbers,
    binomial_pmf,
    expect_iid,
    geometric_moment_float,
    touchard_moments,
)

HALF = F(1, 2)
DEFAULT_SPECS = [
    "det:1",
    "det:2",
    "bernoulli:1/2",
    "binomial:3,1/3",
    "poisson:2/3",
    "geometric:1/2",
    "finite:0:1/3,1:1/3,5:1/3",
]
MODELS = [parse_dist(s) for s in DEFAULT_SPECS]


def pmf_of(model):
    """Exact finite pmf for models with finite support."""
    if model.kind == "deterministic":
        return [(model.params[0], F(1))]
    if model.kind == "bernoulli":
        return binomial_pmf(1, model.params[0])
    if model.kind == "binomial":
        return binomial_pmf(*model.params)
    if model.kind == "finite_support":
        return list(model.params)
    return None


FINITE = [m for m in MODELS if pmf_of(m) is not None]


def test_moment_examples():
    assert moment(MomentModel.bernoulli(HALF), 5) == HALF
    assert moment(MomentModel.deterministic(2), 3) == 8
    assert moment(MomentModel.poisson(1), 3) == bell_numbers(3)[3] == 5


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_zeroth_moment_is_one(model):
    assert moment(model, 0) == 1


@pytest.mark.parametrize("model", FINITE, ids=str)
def test_finite_models_match_weighted_sum(model):
    pmf = pmf_of(model)
    for n in range(13):
        assert moment(model, n) == sum(w * v**n for v, w in pmf)


@pytest.mark.parametrize("lam", [F(0), F(1), F(2, 3), F(5, 2)])
def test_poisson_moments_match_touchard_recurrence(lam):
    assert [moment(MomentModel.poisson(lam), n) for n in range(11)] == touchard_moments(lam, 10)


@pytest.mark.parametrize("p", [F(1, 2), F(2, 3), F(1)])
def test_geometric_moments_match_direct_sum(p):
    model = MomentModel.geometric(p)
    for n in range(7):
        assert float(moment(model, n)) == pytest.approx(geometric_moment_float(p, n), rel=1e-9)


def test_geometric_first_two_moments():
    g = MomentModel.geometric(F(1, 4))
    # mean 1/p, variance (1-p)/p^2
    assert moment(g, 1) == 4
    assert moment(g, 2) - moment(g, 1) ** 2 == F(3, 4) / F(1, 16)


def test_mgf_series():
    assert mgf_series(MomentModel.deterministic(1), 5) == TruncatedSeries.exp_linear(1, 5)
    p = F(1, 3)
    expected = TruncatedSeries.constant(1 - p, 6) + TruncatedSeries.exp_linear(1, 6) * p
    assert mgf_series(MomentModel.bernoulli(p), 6) == expected
    for model in MODELS:
        assert mgf_series(model, 4)[0] == 1


def test_sum_moment_examples():
    assert sum_moment(MomentModel.deterministic(2), 3, 2) == 36
    for model in MODELS:
        assert sum_moment(model, 0, 4) == 0
        assert sum_moment(model, 0, 0) == 1
    assert sum_moment(MomentModel.bernoulli(HALF), 2, 2) == F(3, 2)


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_sum_moment_matches_multinomial_expansion(model):
    for k in range(5):
        for n in range(9):
            expected = sum(
                multinomial(n, parts) * prod(moment(model, i) for i in parts)
                for parts in weak_compositions(n, k)
            )
            assert sum_moment(model, k, n) == expected
            assert sum_moment_power(model, k, n) == expected


@pytest.mark.parametrize("model", FINITE, ids=str)
def test_sum_moment_matches_exhaustive_expectation(model):
    pmf = pmf_of(model)
    for k in range(4):
        for n in range(6):
            assert sum_moment(model, k, n) == expect_iid(pmf, k, lambda ys: sum(ys, F(0)) ** n)


def test_joint_moment_examples():
    for k in range(4):
        for p in range(5):
            assert joint_moment(MomentModel.deterministic(1), p, (1,) * k) == k**p
    assert joint_moment(MomentModel.bernoulli(HALF), 1, (1, 1)) == HALF
    for model in MODELS:
        assert joint_moment(model, 0, ()) == 1
        assert joint_moment(model, 3, ()) == 0


def test_joint_moment_rejects_zero_exponent():
    with pytest.raises(ValueError, match="positive"):
        joint_moment(MomentModel.poisson(1), 2, (1, 0))
    with pytest.raises(ValueError):
        joint_moment_series(MomentModel.poisson(1), 2, (0,))


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_joint_moment_routes_agree(model):
    from probbell.classical import compositions

    for k in range(5):
        for total in range(k, k + 4):
            for ls in compositions(total, k):
                for p in range(7):
                    assert joint_moment(model, p, ls) == joint_moment_series(model, p, ls)


@pytest.mark.parametrize("model", FINITE, ids=str)
def test_joint_moment_matches_exhaustive_expectation(model):
    pmf = pmf_of(model)
    for ls in [(1,), (2,), (1, 1), (2, 1), (1, 3), (1, 1, 2)]:
        for p in range(4):
            def f(ys, ls=ls, p=p):
                return sum(ys, F(0)) ** p * prod(y**l for y, l in zip(ys, ls))

            assert joint_moment(model, p, ls) == expect_iid(pmf, len(ls), f)


def test_joint_moment_is_symmetric():
    m = parse_dist("finite:0:1/3,1:1/3,5:1/3")
    assert joint_moment(m, 3, (1, 2, 4)) == joint_moment(m, 3, (4, 1, 2))


# --- models and the spec grammar ---------------------------------------------


def test_canonical_ids():
    assert parse_dist("det:4/2").canonical_id == "det:2"
    assert parse_dist("binomial:3,2/6").canonical_id == "binomial:3,1/3"
    a = parse_dist("finite:5:1/3,0:1/3,1:1/3")
    b = parse_dist("finite:0:1/3,1:1/3,5:1/3")
    assert a == b and a.canonical_id == b.canonical_id == "finite:0:1/3,1:1/3,5:1/3"
    assert parse_dist("finite:1:1/2,1:1/2").canonical_id == "finite:1:1"


@pytest.mark.parametrize("spec", DEFAULT_SPECS + ["poisson:0", "geometric:1", "binomial:0,1/2"])
def test_spec_round_trip(spec):
    m = parse_dist(spec)
    assert parse_dist(m.canonical_id) == m


@pytest.mark.parametrize(
    "spec, token",
    [
        ("normal:0", "normal"),
        ("bernoulli:x", "x"),
        ("binomial:3", "3"),
        ("binomial:1/2,1/2", "1/2"),
        ("finite:1", "1"),
        ("det", "det"),
        ("poisson:1/0", "1/0"),
    ],
)
def test_bad_specs_name_the_token(spec, token):
    with pytest.raises(DistSpecError) as info:
        parse_dist(spec)
    assert info.value.token == token


@pytest.mark.parametrize(
    "spec",
    ["bernoulli:0", "bernoulli:3/2", "geometric:0", "binomial:-1,1/2", "binomial:2,2", "poisson:-1",
     "finite:0:1/2,1:1/3", "finite:0:0,1:1"],
)
def test_invalid_parameters_rejected(spec):
    with pytest.raises(ValueError):
        parse_dist(spec)


# --- sampling ----------------------------------------------------------------


def test_sampler_degenerate_cases():
    s = Sampler(MomentModel.deterministic(3), seed=1)
    assert [s.sample() for _ in range(5)] == [3.0] * 5
    s = Sampler(MomentModel.bernoulli(1), seed=2)
    assert [s.sample() for _ in range(5)] == [1.0] * 5


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_sampler_is_reproducible(model):
    a = Sampler(model, seed=12345).draw(1000)
    b = Sampler(model, seed=12345).draw(1000)
    assert np.array_equal(a, b)


def test_sampler_bernoulli_mean():
    draws = Sampler(MomentModel.bernoulli(HALF), seed=99).draw(10**6)
    assert abs(draws.mean() - 0.5) < 0.005


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_sample_means_track_exact_mean(model):
    draws = Sampler(model, seed=7).draw(200_000)
    exact = float(moment(model, 1))
    sd = float(moment(model, 2) - moment(model, 1) ** 2) ** 0.5
    assert abs(draws.mean() - exact) <= 5 * sd / np.sqrt(draws.size) + 1e-12


def test_geometric_sampler_support_starts_at_one():
    draws = Sampler(MomentModel.geometric(F(1, 2)), seed=3).draw(10_000)
    assert draws.min() == 1.0


def test_sampler_rejects_bad_seed():
    with pytest.raises(ValueError):
        Sampler(MomentModel.poisson(1), seed=-1)
    with pytest.raises(ValueError):
        Sampler(MomentModel.poisson(1), seed=2**64)
