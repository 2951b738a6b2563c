from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracsob.exponents import (
    INF,
    DomainError,
    PotentialFamily,
    SpaceParams,
    WeightExponents,
    admissible_ranges,
    alpha_star,
    bound_rate,
    classify_potentials,
    delta_inf,
    delta_zero,
    example_report,
    q_star,
)

S_VALUES = [Fr(3, 5), Fr(3, 4), Fr(9, 10)]
fracs = st.fractions(min_value=Fr(-5), max_value=Fr(5), max_denominator=50)
betas = st.fractions(min_value=0, max_value=1, max_denominator=40)
orders = st.fractions(min_value=Fr(51, 100), max_value=Fr(99, 100), max_denominator=100)
dims = st.integers(2, 6)


def test_space_params_derived(params):
    assert params.two_star == 4
    assert params.theta == Fr(1, 2)
    assert 0 < params.theta < 1
    assert params.strauss_rate == Fr(3, 4)


@pytest.mark.parametrize("N,s", [(1, Fr(3, 4)), (3, Fr(1, 2)), (3, Fr(1)), (3, Fr(1, 4))])
def test_space_params_rejects(N, s):
    with pytest.raises(DomainError):
        SpaceParams(N, s)


def test_alpha_star_examples(params):
    assert alpha_star(1, params) == 0
    assert alpha_star(Fr(1, 2), params) == Fr(-3, 2)
    assert alpha_star(0, params) == Fr(-9, 4)
    with pytest.raises(DomainError):
        alpha_star(Fr(3, 2), params)


def test_q_star_examples(params):
    assert q_star(0, 0, params) == 4
    assert q_star(0, Fr(1, 2), params) == 3


@given(dims, orders)
def test_alpha_star_branches_meet(N, s):
    p = SpaceParams(N, s)
    left = -Fr(N, 2) - (1 - 2 * Fr(1, 2)) * s
    right = -(1 - Fr(1, 2)) * N
    assert left == right == alpha_star(Fr(1, 2), p)
    eps = 1e-9
    assert abs(float(alpha_star(0.5 - eps, p.as_float())) - float(alpha_star(0.5 + eps, p.as_float()))) < 1e-8


@given(dims, orders, fracs, betas, st.fractions(min_value=Fr(1, 100), max_value=2, max_denominator=100))
def test_q_star_monotone(N, s, a, b, h):
    p = SpaceParams(N, s)
    assert q_star(a + h, b, p) > q_star(a, b, p)
    assert q_star(a, b + h, p) < q_star(a, b, p)


@given(dims, orders, betas)
def test_q_star_at_alpha_star(N, s, b):
    p = SpaceParams(N, s)
    assert q_star(alpha_star(b, p), b, p) == max(1, 2 * b)


@given(dims, orders, fracs, betas)
def test_alpha_star_equivalence(N, s, a, b):
    p = SpaceParams(N, s)
    assert (a > alpha_star(b, p)) == (q_star(a, b, p) > max(1, 2 * b))


def test_delta_zero_values(params):
    # (N - 2s)/(N + 2s) * (q* - q1) = 1/3 * 2
    assert delta_zero(2, WeightExponents(0, 0, 0, 1), params) == Fr(2, 3)
    assert delta_zero(3, WeightExponents(0, 0, 0, 1), params) == Fr(1, 3)
    with pytest.raises(DomainError):
        delta_zero(3, WeightExponents(0, 1, 0, 1), params)
    # approaches 0 from above at the endpoint
    d = delta_zero(4 - Fr(1, 10**9), WeightExponents(0, 0, 0, 1), params)
    assert 0 < d < 1e-8


def test_delta_inf_values(params):
    assert delta_inf(Fr(5, 2), WeightExponents(0, 0, 0, 1), params) == Fr(-3, 8)
    assert delta_inf(5, WeightExponents(0, 0, 0, Fr(1, 2)), params) == -3
    with pytest.raises(DomainError):
        delta_inf(Fr(3, 2), WeightExponents(0, 0, 0, 1), params)
    d = delta_inf(2 + Fr(1, 10**9), WeightExponents(0, 0, 0, 1), params)
    assert -1e-8 < d < 0


@given(dims, orders, fracs, betas, st.fractions(min_value=0, max_value=1, max_denominator=1000))
def test_delta_signs(N, s, a, b, t):
    p = SpaceParams(N, s)
    lo, hi = max(1, 2 * b), q_star(a, b, p)
    we = WeightExponents(a, b, a, b)
    if hi > lo and 0 < t < 1:
        assert delta_zero(lo + t * (hi - lo), we, p) > 0
    q2 = max(1, 2 * b, hi) + t + Fr(1, 1000)
    assert delta_inf(q2, we, p) < 0


def test_bound_rate_positive(params):
    assert bound_rate(3, 0, 0, params) > 0


def test_admissible_ranges_example3(params):
    rep = admissible_ranges(WeightExponents(0, 0, 0, 1), params)
    assert rep.q1_interval == (1, 4)
    assert rep.q2_lower == 2
    assert rep.single_space
    assert rep.q_single_interval == (2, 4)


def test_admissible_ranges_empty_at_alpha_star(params):
    rep = admissible_ranges(WeightExponents(alpha_star(0, params), 0, 0, 1), params)
    assert rep.q1_interval is None or rep.q1_interval[0] >= rep.q1_interval[1]
    assert not rep.single_space


def test_classify_power_zero(params):
    rep = classify_potentials(PotentialFamily.power(0, 0), params)
    assert rep.q_single_interval == (2, 4)


def test_classify_power_bad_b(params):
    with pytest.raises(DomainError):
        classify_potentials(PotentialFamily.power(0, -3), params)


def test_classify_power_sum_space(params):
    a, b = Fr(-2), Fr(0)
    rep = classify_potentials(PotentialFamily.power(a, b), params)
    N, s = params.N, params.s
    assert not rep.single_space
    assert rep.q1_interval[1] == 2 * (1 + (b + 2 * s) / (N - 2 * s))
    assert rep.q1_interval[1] <= 2 * (1 + (b - a) / (N - 2 * s)) == rep.q2_lower


def test_classify_mixed(params):
    rep = classify_potentials(PotentialFamily.mixed(1, 1, 0), params)
    assert rep.q_single_interval == (1, INF)
    assert example_report(4, params, a=1, b=1, d=0)["closed_form"]["statement"] == "compact for every q > 1"


def test_classify_exponential_example3(params):
    rep = classify_potentials(PotentialFamily.exponential(2, 1), params)
    assert rep.q_single_interval == (2, params.two_star)


def test_classify_power_matches_hand_picked():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        N = int(rng.integers(2, 7))
        s = Fr(int(rng.integers(51, 100)), 100)
        a = Fr(int(rng.integers(-300, 300)), 100)
        b = Fr(int(rng.integers(-300, 300)), 100)
        p = SpaceParams(N, s)
        if b <= -Fr(N, 2) - s:
            with pytest.raises(DomainError):
                classify_potentials(PotentialFamily.power(a, b), p)
            continue
        got = classify_potentials(PotentialFamily.power(a, b), p)
        ref = admissible_ranges(WeightExponents(b, 0, b - a, 1), p)
        assert got.q1_interval == ref.q1_interval
        assert got.q2_lower == ref.q2_lower
        assert got.single_space == ref.single_space


@pytest.mark.parametrize("N", [2, 3])
@pytest.mark.parametrize("s", S_VALUES)
def test_example1_closed_forms(N, s):
    p = SpaceParams(N, s)
    for a, b in [(0, 0), (Fr(1), Fr(1, 2)), (Fr(-1, 4), Fr(-1, 2))]:
        res = example_report(1, p, a=a, b=b)
        rep = res["report"]
        assert rep.q1_interval[1] == 2 * (1 + (b + 2 * s) / (N - 2 * s))
        closed_form = max(1, 2 * (1 + (b - a) / (N - 2 * s)))
        # the general threshold also contains 2 beta_inf = 2, which only bites when a > b
        assert rep.q2_lower == (closed_form if b >= a else max(2, closed_form))


def test_example2_zero_v(params):
    res = example_report(2, params, alpha0=1, alpha_inf=Fr(-1, 2))
    assert res["report"].q1_interval[1] == res["closed_form"]["q1_upper"]
    assert res["report"].q2_lower == res["closed_form"]["q2_lower"]


def test_tabulated_matches_power(params):
    r = np.geomspace(1e-4, 1e4, 200)
    fam = PotentialFamily.tabulated(r, r**1.0, r**0.5)
    rep = classify_potentials(fam, params)
    ref = classify_potentials(PotentialFamily.power(1, Fr(1, 2)), params)
    assert abs(float(rep.q1_interval[1]) - float(ref.q1_interval[1])) < 1e-6
    assert abs(float(rep.q2_lower) - float(ref.q2_lower)) < 1e-6


def test_tabulated_rejects_negative_v():
    with pytest.raises(DomainError):
        PotentialFamily.tabulated([1, 2], [-1, 1], [1, 1])


def test_report_to_dict_inf(params):
    d = classify_potentials(PotentialFamily.mixed(1, 1, 0), params).to_dict()
    assert d["q_single_interval"][1] == "inf"
