import math
from fractions import Fraction as Fr

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special

from fracsob.exponents import DomainError, PotentialFamily, SpaceParams
from fracsob.spaces import (
    AngularKernel,
    Extrapolation,
    RadialFunction,
    RadialGrid,
    cos_moment_integral,
    critical_norm,
    gagliardo_seminorm,
    gaussian,
    gregory_end_weights,
    hat_bump,
    hsv_norm,
    lqk_norm,
    norm_constant_C,
    norm_constant_C_printed,
    random_bumps,
    sharp_sobolev_constant,
    smooth_bump,
    sobolev_constant_S,
    strauss_check,
    sum_space_norm,
    weighted_l2_squared,
)

ONE = PotentialFamily.power(0, 0)


def gaussian_fourier_seminorm2(N, s, w=1.0):
    """int |xi|^{2s} |hat u|^2 for u = exp(-r^2/w^2), unitary transform."""
    area = 2 * math.pi ** (N / 2) / math.gamma(N / 2)
    return area * (w**2 / 2) ** N * 0.5 * (2 / w**2) ** (s + N / 2) * math.gamma(s + N / 2)


def standard_C(N, s):
    return s * 4**s * math.gamma(N / 2 + s) / (math.pi ** (N / 2) * math.gamma(1 - s))


def cos_integral_3d(s):
    """Direct route for N = 3: integrate the direction first, then the radius."""
    g = lambda r: (2 - 2 * math.sin(r) / r) * r ** (-1 - 2 * s) if r > 1e-3 else (r**2 / 3 - r**4 / 60) * r ** (-1 - 2 * s)
    head, _ = integrate.quad(g, 0, 1, epsabs=1e-14, limit=200)
    tail_const = 2 / (2 * s)  # int_1^inf 2 r^{-1-2s}
    mid, _ = integrate.quad(lambda r: math.sin(r) * r ** (-2 - 2 * s), 1, 40 * math.pi, epsabs=1e-14, limit=500)
    osc, _ = integrate.quad(lambda r: r ** (-2 - 2 * s), 40 * math.pi, np.inf, weight="sin", wvar=1.0, epsabs=1e-15)
    return 2 * math.pi * (head + tail_const - 2 * (mid + osc))


# --------------------------------------------------------------- grid


def test_grid_basic(grid):
    assert np.all(np.diff(grid.nodes) > 0)
    assert grid.nodes[0] > 0
    assert np.all(grid.weights > 0)
    assert np.all(grid.full_weights > 0)


def test_grid_integrates_one(grid):
    exact = (grid.r_max**grid.N - grid.r_min**grid.N) / grid.N
    assert abs(grid.weights.sum() / exact - 1) < 1e-10


@pytest.mark.parametrize("order", [4, 6, 8])
def test_gregory_weights_positive(order):
    w = np.array(gregory_end_weights(order))
    assert np.all(w > 0)
    # exact for polynomials of degree < order in the index
    n = 3 * order
    c = np.ones(n)
    c[:order] = w
    c[-order:] = w[::-1]
    k = np.arange(n, dtype=float)
    for p in range(order):
        assert abs(c @ k**p - (n - 1) ** (p + 1) / (p + 1)) < 1e-8 * (n - 1) ** (p + 1)


def test_grid_validation():
    with pytest.raises(DomainError):
        RadialGrid(r_min=1.0, r_max=0.5)


# --------------------------------------------------------------- constants


@pytest.mark.parametrize("s", [0.6, 0.75, 0.9])
def test_norm_constant_3d_oracle(s):
    p = SpaceParams(3, Fr(str(s)))
    assert abs(cos_moment_integral(p) / cos_integral_3d(s) - 1) < 1e-6


@pytest.mark.parametrize("N", [2, 3, 4, 5])
@pytest.mark.parametrize("s", [Fr(3, 5), Fr(3, 4), Fr(9, 10)])
def test_norm_constant_standard_formula(N, s):
    C = norm_constant_C(SpaceParams(N, s))
    assert abs(C / standard_C(N, float(s)) - 1) < 1e-10


def test_norm_constant_reciprocal_and_refinement(params):
    C = norm_constant_C(params)
    assert abs(C * cos_moment_integral(params) - 1) < 1e-6
    coarse = norm_constant_C(params, epsabs=1e-10, limit=100)
    assert abs(coarse / C - 1) < 1e-5


def test_norm_constant_printed_differs(params):
    assert abs(norm_constant_C_printed(params) / norm_constant_C(params) - 1) > 0.1


def _S_mp(N, s, outer):
    N, s = mpmath.mpf(N), mpmath.mpf(float(s))
    base = mpmath.gamma((N - 2 * s) / 2) / mpmath.gamma((N + 2 * s) / 2)
    base *= (mpmath.gamma(N) / mpmath.gamma(N / 2)) ** (2 * s / N)
    base /= mpmath.power(2, 2 * s) * mpmath.power(mpmath.pi, s)
    return float(mpmath.power(base, outer))


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("s", [Fr(3, 5), Fr(3, 4), Fr(9, 10)])
def test_sobolev_constant_oracle(N, s):
    p = SpaceParams(N, s)
    S = sobolev_constant_S(p)
    assert S > 0
    assert abs(S / _S_mp(N, s, mpmath.mpf(N) / (N - 2 * mpmath.mpf(float(s)))) - 1) < 1e-10
    assert abs(sharp_sobolev_constant(p) / _S_mp(N, s, 0.5) - 1) < 1e-10
    # the outer power is 2*/2 = N/(N-2s)
    ratio = math.log(S) / math.log(sharp_sobolev_constant(p) ** 2)
    assert abs(ratio - N / (N - 2 * float(s))) < 1e-10


def test_sobolev_inequality_sharp(params, grid):
    S = sharp_sobolev_constant(params)
    rng = np.random.default_rng(11)
    for u in random_bumps(grid, 200, rng, 0.0, 5.0):
        assert critical_norm(u, params) <= S * gagliardo_seminorm(u, params) * (1 + 1e-2)


@pytest.mark.xfail(strict=True, reason="the printed constant carries the outer power 2*/2 and is too small")
def test_sobolev_inequality_printed_constant(params, grid):
    S = sobolev_constant_S(params)
    rng = np.random.default_rng(11)
    for u in random_bumps(grid, 200, rng, 0.0, 5.0):
        assert critical_norm(u, params) <= S * gagliardo_seminorm(u, params) * (1 + 1e-2)


# --------------------------------------------------------------- norms


def test_seminorm_zero(params, grid):
    assert gagliardo_seminorm(RadialFunction(grid, np.zeros(grid.M)), params) == 0


@pytest.mark.parametrize("s", [Fr(3, 5), Fr(3, 4), Fr(9, 10)])
@pytest.mark.parametrize("w", [0.5, 1.0, 2.0])
def test_seminorm_gaussian_fourier(s, w, grid):
    p = SpaceParams(3, s)
    got = gagliardo_seminorm(gaussian(grid, w), p) ** 2
    assert abs(got / gaussian_fourier_seminorm2(3, float(s), w) - 1) < 1e-3


def test_seminorm_gaussian_2d():
    g = RadialGrid(N=2)
    p = SpaceParams(2, Fr(3, 4))
    got = gagliardo_seminorm(gaussian(g), p) ** 2
    assert abs(got / gaussian_fourier_seminorm2(2, 0.75) - 1) < 1e-3


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_seminorm_scaling(lam, params, grid):
    u = smooth_bump(grid, 2.0, 1.5)
    a = gagliardo_seminorm(u.dilate(lam), params) ** 2
    b = gagliardo_seminorm(u, params) ** 2
    assert abs(a / (lam ** (2 * 0.75 - 3) * b) - 1) < 1e-3


def test_hsv_reduces_to_seminorm(params, grid):
    u = smooth_bump(grid, 1.0, 1.0)
    assert hsv_norm(u, None, params) == pytest.approx(gagliardo_seminorm(u, params), rel=1e-14)
    assert hsv_norm(u * 0.0, ONE, params) == 0


def test_hsv_gaussian_l2(params, grid):
    u = gaussian(grid)
    l2 = (math.pi / 2) ** 1.5
    assert abs(weighted_l2_squared(u, ONE) / l2 - 1) < 1e-8
    assert hsv_norm(u, ONE, params) ** 2 == pytest.approx(gagliardo_seminorm(u, params) ** 2 + weighted_l2_squared(u, ONE), rel=1e-12)


def test_hsv_rejects_negative_v(params, grid):
    with pytest.raises(DomainError):
        hsv_norm(gaussian(grid), lambda r: -np.ones_like(r), params)


def test_lqk_gaussian(grid):
    u = gaussian(grid)
    assert abs(lqk_norm(u, ONE, 2) ** 2 / (math.pi / 2) ** 1.5 - 1) < 1e-8
    assert lqk_norm(u * 0.0, ONE, 3) == 0
    assert lqk_norm(u * -3.0, ONE, 3) == pytest.approx(3 * lqk_norm(u, ONE, 3), rel=1e-12)
    with pytest.raises(DomainError):
        lqk_norm(u, lambda r: 0 * r, 3)
    with pytest.raises(DomainError):
        lqk_norm(u, ONE, 1.0)


def test_sum_space_norm(grid):
    u = smooth_bump(grid, 1.0, 0.8)
    assert sum_space_norm(u * 0.0, ONE, 3, 4).value == 0
    q = 3.0
    n = lqk_norm(u, ONE, q)
    v = sum_space_norm(u, ONE, q, q)
    assert v.is_upper_bound
    assert 2 ** (-1 / q) * n * (1 - 1e-12) <= v.value <= n * (1 + 1e-12)
    # compact support in B_1.8: split beyond it leaves only the first piece
    assert sum_space_norm(u, ONE, 3, 40).value <= lqk_norm(u, ONE, 3) * (1 + 1e-12)


@given(st.floats(0.1, 1.0), st.floats(0.0, 4.0), st.floats(0.3, 2.0))
def test_sum_space_monotone(scale, c, rad):
    g = RadialGrid(N=3, M=256)
    v = smooth_bump(g, c, rad)
    u = v * scale
    assert sum_space_norm(u, ONE, 2.5, 3.5).value <= sum_space_norm(v, ONE, 2.5, 3.5).value * (1 + 1e-12)


def test_strauss_zero(params, grid):
    with pytest.raises(DomainError):
        strauss_check(RadialFunction(grid, np.zeros(grid.M)), ONE, params)


def test_strauss_scale_invariance(params, grid):
    u = smooth_bump(grid, 2.0, 1.0)
    a = strauss_check(u, None, params).c_emp
    b = strauss_check(u.dilate(2.0), None, params).c_emp
    assert abs(a / b - 1) < 1e-2


def test_strauss_uniform_over_translates(params, grid):
    c = [strauss_check(hat_bump(grid, k), None, params).c_emp for k in range(1, 11)]
    assert max(c) / min(c) < 1.2
    assert max(c) < 1.0


def test_angular_kernel_symmetric(grid):
    k = AngularKernel(grid, 0.75)
    T = k.table
    assert np.max(np.abs(T - T.T)) <= 1e-12 * np.max(np.abs(T))
    assert np.all(T[~np.eye(T.shape[0], dtype=bool)] > 0)


def test_radial_function_validation(grid):
    with pytest.raises(DomainError):
        RadialFunction(grid, np.full(grid.M, np.nan))
    with pytest.raises(DomainError):
        RadialFunction(grid, np.zeros(3))


def test_save_load_roundtrip(tmp_path, params, grid):
    u = RadialFunction(grid, gaussian(grid).values, Extrapolation.power(-0.75))
    u.save(tmp_path / "u.csv", params)
    v = RadialFunction.load(tmp_path / "u.csv")
    assert v.grid == grid
    assert np.array_equal(u.values, v.values)
    assert v.extrapolation == u.extrapolation
    assert (tmp_path / "u.csv").read_text().splitlines()[0] == "r,value"


def test_power_tail_extrapolation(grid):
    u = RadialFunction(grid, np.ones(grid.M), Extrapolation.power(-0.75))
    assert u(2 * grid.r_max) == pytest.approx(2**-0.75)
