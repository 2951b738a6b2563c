import json
import math

import numpy as np
import pytest
from scipy import integrate

from fracsob.exponents import DomainError, PotentialFamily
from fracsob.spaces import RadialFunction, hsv_norm, sharp_sobolev_constant, smooth_bump
from fracsob.verify import (
    BoundContext,
    PreconditionError,
    Region,
    RegionQuadrature,
    SupremumEstimate,
    _Problem,
    annulus_t,
    annulus_window,
    check_annulus_bound,
    check_lemma41,
    decay_rate_fit,
    estimate_curve,
    estimate_S0,
    estimate_Sinf,
    lemma41_campaign,
    strauss_envelope_ok,
    strauss_family,
)

ONE = PotentialFamily.power(0, 0)
EXP = PotentialFamily.exponential(2, 1)


@pytest.fixture(scope="module")
def s0_curve(params, grid):
    return estimate_curve("zero", 3.0, [0.1, 0.2, 0.4], ONE, ONE, params, grid)


@pytest.fixture(scope="module")
def sinf_curve(params, grid):
    return estimate_curve("infinity", 2.5, [2.0, 4.0, 8.0], EXP, EXP, params, grid)


@pytest.mark.parametrize("region", [Region.ball(2.0), Region.annulus(0.5, 3.0), Region.complement(1.5)])
@pytest.mark.parametrize("gamma", [-2.5, -1.0, 0.5, -4.0])
def test_power_integral(region, gamma):
    lo, hi = region.inner, region.outer
    got = region.power_integral(gamma, 3)
    if (lo == 0 and gamma <= -3) or (math.isinf(hi) and gamma >= -3):
        assert math.isinf(got)
        return
    ref, _ = integrate.quad(lambda r: 4 * math.pi * r ** (gamma + 2), lo, hi)
    assert got == pytest.approx(ref, rel=1e-10)


def test_region_quadrature_volume(grid):
    q = RegionQuadrature(grid, Region.annulus(0.5, 3.0))
    assert q.integral(np.ones_like(q.r)) == pytest.approx(4 / 3 * math.pi * (27 - 0.125), rel=1e-12)


def test_estimate_invariants(s0_curve, params):
    for e in s0_curve:
        assert isinstance(e, SupremumEstimate)
        assert abs(hsv_norm(e.maximizer, ONE, params) - 1) < 1e-8
        prob = _Problem(e.maximizer.grid, params, ONE, ONE, e.q, Region.ball(e.R))
        assert prob.J(e.maximizer.values) == pytest.approx(e.value, rel=1e-12)
        assert e.converged


def test_s0_monotone_and_slope(s0_curve):
    v = [e.value for e in s0_curve]
    assert all(b >= a * (1 - 1e-3) for a, b in zip(v, v[1:]))
    # delta_0 = 1/3 for these potentials at q = 3
    assert decay_rate_fit(s0_curve, "zero") >= 1 / 3 - 0.1


def test_sinf_monotone_and_negative(sinf_curve):
    v = [e.value for e in sinf_curve]
    assert all(b <= a * (1 + 1e-3) for a, b in zip(v, v[1:]))
    assert decay_rate_fit(sinf_curve, "infinity") < 0


def test_linear_in_k(params, grid):
    a = estimate_S0(3.0, 0.5, ONE, ONE, params, grid, starts=2)
    b = estimate_S0(3.0, 0.5, ONE, lambda r: 1e-12 + 0 * r, params, grid, starts=2)
    assert b.value == pytest.approx(1e-12 * a.value, rel=1e-6)


def test_l2_bound_when_v_is_one(params, grid):
    e = estimate_S0(2.0, 40.0, ONE, ONE, params, grid, starts=2)
    assert e.value <= 1 + 1e-12


def test_sinf_ignores_inner_mass(params, grid):
    prob = _Problem(grid, params, EXP, EXP, 2.5, Region.complement(3.0))
    # only spline ringing reaches past the support
    assert prob.J(smooth_bump(grid, 1.0, 1.0).values) < 1e-30


def test_sinf_maximizer_outside(sinf_curve):
    e = sinf_curve[1]
    u = e.maximizer
    assert u.grid.nodes[np.argmax(np.abs(u.values))] > 0.5 * e.R


def test_maximizers_strauss_bound(s0_curve, sinf_curve, params, grid):
    # uniform constant from the translated-bump family, turned into an H^s_V bound
    c = max(r.c_emp for _, r in strauss_family(params, grid))
    S = sharp_sobolev_constant(params)
    th = float(params.theta)
    const = 1.1 * c * S ** (1 - th)
    for e in s0_curve:
        assert strauss_envelope_ok(e, ONE, params, const)
    for e in sinf_curve:
        assert strauss_envelope_ok(e, EXP, params, const)


def _fake(R, v, conv=True):
    return SupremumEstimate(3.0, R, v, None, 1, conv)


def test_decay_rate_fit_synthetic():
    R = [0.1, 0.2, 0.4, 0.8]
    assert decay_rate_fit([_fake(r, r**1.0) for r in R]) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(DomainError):
        decay_rate_fit([_fake(r, r) for r in R[:2]])
    with pytest.raises(DomainError):
        decay_rate_fit([_fake(r, r, conv=(r != 0.2)) for r in R])
    with pytest.raises(DomainError):
        decay_rate_fit([_fake(0.1, 1), _fake(0.1, 2), _fake(0.2, 3)])


def test_estimate_rejects_bad_input(params, grid):
    with pytest.raises(DomainError):
        estimate_S0(1.0, 0.5, ONE, ONE, params, grid)
    with pytest.raises(DomainError):
        estimate_Sinf(2.5, -1.0, ONE, ONE, params, grid)


def test_annulus_window(params):
    lo, hi = annulus_window(3.0, params)
    assert lo == pytest.approx(4 / 3)
    assert math.isinf(hi)
    t = annulus_t(3.0, params)
    qt = 2 * (1 + 0.75 / 3 - 1 / t)
    assert lo < t and 1 < qt < 3
    lo, hi = annulus_window(2.2, params)
    assert hi == pytest.approx(6 / (6 + 1.5 - 6.6))


def test_annulus_resolution(params, grid):
    fine = grid.refined(2)
    a = check_annulus_bound(smooth_bump(grid, 1.0, 0.9), 0.5, 2.0, 3.0, ONE, ONE, params)
    b = check_annulus_bound(smooth_bump(fine, 1.0, 0.9), 0.5, 2.0, 3.0, ONE, ONE, params)
    ca, cb = a.extra["empirical_constant"], b.extra["empirical_constant"]
    assert abs(ca / cb - 1) < 0.05
    with pytest.raises(DomainError):
        check_annulus_bound(RadialFunction(grid, np.zeros(grid.M)), 0.5, 2.0, 3.0, ONE, ONE, params)


def test_lemma41_beta_zero(params, grid):
    u = smooth_bump(grid, 1.0, 0.8)
    ctx = BoundContext.build(Region.ball(3.0), 0.0, 0.0, ONE, ONE, grid, nu=0.0, u=u)
    rep = check_lemma41(u, ctx, 3.0, params, ONE, ONE)
    assert rep.holds and rep.value < rep.bound
    assert rep.extra["case"] == "beta=0"


def test_lemma41_beta_one(params, grid):
    u = smooth_bump(grid, 1.0, 0.8)
    ctx = BoundContext.build(Region.annulus(0.2, 3.0), 0.0, 1.0, ONE, ONE, grid, nu=0.0, u=u)
    rep = check_lemma41(u, ctx, 3.0, params, ONE, ONE)
    assert rep.holds and rep.extra["case"] == "beta=1"


def test_lemma41_errors(params, grid):
    u = smooth_bump(grid, 1.0, 0.8)
    ctx = BoundContext.build(Region.ball(3.0), 0.0, 1.0, ONE, ONE, grid, nu=0.0, u=u)
    with pytest.raises(DomainError):
        check_lemma41(u, ctx, 2.0, params, ONE, ONE)
    tight = BoundContext(Region.ball(3.0), 0.0, 0.0, 0.0, 0.5, 1.0)
    with pytest.raises(PreconditionError, match="node"):
        check_lemma41(u, tight, 3.0, params, ONE, ONE)


def test_lemma41_small_campaign(params, grid):
    reps = lemma41_campaign(params, grid, n_functions=2, seed=5)
    assert len(reps) == 30
    assert {r.extra["case"] for r in reps} == {"beta=0", "0<beta<1/2", "beta=1/2", "1/2<beta<1", "beta=1"}
    assert all(r.holds for r in reps)
    d = json.loads(reps[0].to_json())
    assert {"operation", "inputs", "value", "bound", "margin", "converged"} <= set(d)
