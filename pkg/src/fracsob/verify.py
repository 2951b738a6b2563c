"""Numerical checks of the supremum conditions and the weighted integral bounds.

Suprema are only ever approximated from below: the ascent returns a unit
vector of the discrete H^s_V space together with the value it attains.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg
from scipy.interpolate import CubicSpline

from .exponents import DomainError, SpaceParams
from .spaces import (
    ZERO,
    RadialFunction,
    RadialGrid,
    _pot_callable,
    _pot_values,
    gagliardo_matrix,
    hsv_norm,
    sharp_sobolev_constant,
    sphere_area,
)


class PreconditionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# regions and region quadrature


@dataclass(frozen=True)
class Region:
    kind: str  # ball, complement, annulus
    inner: float = 0.0
    outer: float = math.inf

    @classmethod
    def ball(cls, R):
        return cls("ball", 0.0, float(R))

    @classmethod
    def complement(cls, R):
        return cls("complement", float(R), math.inf)

    @classmethod
    def annulus(cls, r, R):
        if not 0 < r < R:
            raise DomainError("annulus needs 0 < r < R")
        return cls("annulus", float(r), float(R))

    def contains(self, r):
        r = np.asarray(r)
        return (r >= self.inner) & (r <= self.outer) if self.kind != "complement" else r >= self.inner

    def power_integral(self, gamma: float, N: int) -> float:
        """int over the region of |x|^gamma dx (possibly infinite)."""
        S = sphere_area(N)
        e = gamma + N
        a, b = self.inner, self.outer
        if e == 0:
            return S * math.log(b / a) if 0 < a and b < math.inf else math.inf
        if (a == 0 and e < 0) or (b == math.inf and e > 0):
            return math.inf
        hi = 0.0 if b == math.inf else b**e
        lo = 0.0 if a == 0 else a**e
        return S * (hi - lo) / e

    def to_dict(self):
        return {"kind": self.kind, "inner": self.inner, "outer": None if math.isinf(self.outer) else self.outer}


_GL = np.polynomial.legendre.leggauss(6)


class RegionQuadrature:
    """Gauss-Legendre panels in log r, with the spline interpolation matrix.

    ``P @ U`` gives the cubic-spline interpolant of grid values at the
    quadrature radii (constant below r_min, zero above r_max) and
    ``weights`` already include the sphere factor and the Jacobian r^N.
    """

    def __init__(self, grid: RadialGrid, region: Region):
        lo = math.log(grid.r_min) - 30.0 / grid.N if region.inner <= 0 else math.log(region.inner)
        hi = math.log(min(region.outer, grid.r_max))
        if hi <= lo:
            raise DomainError(f"region {region} misses the grid")
        n_pan = max(4, int(math.ceil((hi - lo) / grid.h)))
        edges = np.linspace(lo, hi, n_pan + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        t, w = _GL
        x = (mid[:, None] + half[:, None] * t[None, :]).ravel()
        wx = (half[:, None] * w[None, :]).ravel()
        self.r = np.exp(x)
        self.weights = sphere_area(grid.N) * wx * self.r**grid.N
        xs = np.clip(x, grid.x[0], grid.x[-1])
        self.P = CubicSpline(grid.x, np.eye(grid.M), axis=0)(xs)
        self.region = region
        self.grid = grid

    def integral(self, g_at_r: np.ndarray) -> float:
        return float(np.dot(self.weights, g_at_r))


# ---------------------------------------------------------------------------
# supremum estimates


@dataclass
class SupremumEstimate:
    q: float
    R: float
    value: float
    maximizer: RadialFunction = field(repr=False)
    iterations: int
    converged: bool
    end: str = "zero"

    def to_dict(self):
        return {"q": self.q, "R": self.R, "value": self.value, "iterations": self.iterations,
                "converged": self.converged, "end": self.end}


class _Problem:
    """max int_region K |u|^q subject to ||u||_{H^s_V} = 1 on a fixed grid."""

    def __init__(self, grid, params, V, K, q, region):
        if q <= 1:
            raise DomainError("q must exceed 1")
        self.grid, self.q = grid, float(q)
        Vv = _pot_values(V, grid, "V")
        if np.any(Vv < 0):
            raise DomainError("V must be nonnegative")
        self.B = gagliardo_matrix(grid, params, ZERO) + np.diag(grid.full_weights * Vv)
        self.cho = linalg.cho_factor(self.B)
        self.quad = RegionQuadrature(grid, region)
        Kf = _pot_callable(K, "K")
        Kq = np.asarray(Kf(self.quad.r), float) * np.ones_like(self.quad.r) if Kf else np.interp(
            self.quad.r, grid.nodes, _pot_values(K, grid, "K"))
        if np.any(Kq <= 0):
            raise DomainError("K must be positive on the region")
        self.wK = self.quad.weights * Kq

    def norm(self, U):
        return math.sqrt(max(float(U @ self.B @ U), 0.0))

    def normalize(self, U):
        n = self.norm(U)
        if n == 0:
            raise DomainError("zero start")
        return U / n

    def J(self, U):
        return float(np.dot(self.wK, np.abs(self.quad.P @ U) ** self.q))

    def riesz_grad(self, U):
        pu = self.quad.P @ U
        g = self.quad.P.T @ (self.wK * self.q * np.abs(pu) ** (self.q - 1) * np.sign(pu))
        return linalg.cho_solve(self.cho, g)

    def ascend(self, U0, budget, tol):
        U = self.normalize(U0)
        val = self.J(U)
        for it in range(1, budget + 1):
            d = self.riesz_grad(U)
            # first trial is the fixed-point step U <- d/|d|, monotone for convex J
            tau = 1.0 / max(self.norm(d), 1e-300) * 1e6
            improved = False
            for _ in range(40):
                cand = self.normalize(U + tau * d)
                cv = self.J(cand)
                if cv >= val:
                    improved = True
                    break
                tau *= 0.25
            if not improved:
                return U, val, it, True
            step = self.norm(cand - U)
            U, old, val = cand, val, cv
            if val - old <= tol * max(abs(val), 1e-300) and step < math.sqrt(tol):
                return U, val, it, True
        return U, val, budget, False


def _random_starts(grid: RadialGrid, region: Region, n: int, rng: np.random.Generator):
    lo = max(region.inner, grid.r_min * 10)
    hi = min(region.outer, grid.r_max / 2)
    out = []
    for _ in range(n):
        c = math.exp(rng.uniform(math.log(lo), math.log(max(hi, lo * 1.01)))) if region.kind != "ball" else rng.uniform(0, hi)
        w = math.exp(rng.uniform(math.log(hi / 50 + 1e-12), math.log(hi + 1e-12)))
        if region.kind != "ball":
            w = max(w, 0.2 * c)
        out.append(np.exp(-(((grid.nodes - c) / w) ** 2)) + 1e-8 * rng.standard_normal(grid.M))
    return out


def estimate_sup(q, region: Region, V, K, params: SpaceParams, grid: RadialGrid = None, budget: int = 500,
                 starts: int = 4, seed: int = 0, warm=None, tol: float = 1e-10, end: str = "region",
                 R: float = math.nan) -> SupremumEstimate:
    """Lower bound on sup { int_region K|u|^q : ||u|| = 1 } by multistart projected ascent."""
    grid = grid or RadialGrid(N=params.N)
    prob = _Problem(grid, params, V, K, q, region)
    rng = np.random.default_rng(seed)
    inits = [w.values if isinstance(w, RadialFunction) else np.asarray(w) for w in (warm or [])]
    inits += _random_starts(grid, region, starts, rng)
    best = None
    for U0 in inits:
        U, val, it, conv = prob.ascend(U0, budget, tol)
        if best is None or val > best[1]:
            best = (U, val, it, conv)
    U, val, it, conv = best
    if U[np.argmax(np.abs(U))] < 0:
        U = -U
    return SupremumEstimate(float(q), float(R), val, RadialFunction(grid, U), it, conv, end)


def _estimate(end, q, R, V, K, params, grid, budget, starts, seed, warm, tol):
    region = Region.ball(R) if end == "zero" else Region.complement(R)
    return estimate_sup(q, region, V, K, params, grid, budget, starts, seed, warm, tol, end=end, R=R)


def estimate_S0(q, R, V, K, params: SpaceParams, grid: RadialGrid = None, budget: int = 500,
                starts: int = 4, seed: int = 0, warm=None, tol: float = 1e-10) -> SupremumEstimate:
    """Lower bound on sup { int_{B_R} K|u|^q : ||u|| = 1 }."""
    if R <= 0:
        raise DomainError("R must be positive")
    return _estimate("zero", q, R, V, K, params, grid, budget, starts, seed, warm, tol)


def estimate_Sinf(q, R, V, K, params: SpaceParams, grid: RadialGrid = None, budget: int = 500,
                  starts: int = 4, seed: int = 0, warm=None, tol: float = 1e-10) -> SupremumEstimate:
    """Lower bound on sup { int_{|x|>R} K|u|^q : ||u|| = 1 }."""
    if R <= 0:
        raise DomainError("R must be positive")
    return _estimate("infinity", q, R, V, K, params, grid, budget, starts, seed, warm, tol)


def estimate_curve(end: str, q, radii: Sequence[float], V, K, params, grid=None, **kw):
    """Estimates along a list of radii, warm-started so the expected monotonicity holds.

    For the ball the radii are processed increasing, for the complement
    decreasing; each maximizer seeds the next run, whose region contains the
    previous one.
    """
    f = estimate_S0 if end == "zero" else estimate_Sinf
    order = sorted(radii, reverse=(end != "zero"))
    res, prev = {}, []
    for R in order:
        est = f(q, R, V, K, params, grid, warm=prev, **kw)
        res[R] = est
        prev = [est.maximizer]
    return [res[R] for R in radii]


def decay_rate_fit(estimates: Sequence[SupremumEstimate], end: str = "zero") -> float:
    """Least-squares slope of log value against log R."""
    if len(estimates) < 3:
        raise DomainError("need at least three estimates")
    if not all(e.converged for e in estimates):
        raise DomainError("refusing to fit unconverged estimates")
    R = np.array([e.R for e in estimates], float)
    if len(set(R)) != len(R):
        raise DomainError("radii must be distinct")
    v = np.array([e.value for e in estimates], float)
    if np.any(v <= 0):
        raise DomainError("values must be positive")
    slope, _ = np.polyfit(np.log(R), np.log(v), 1)
    return float(slope)


# ---------------------------------------------------------------------------
# reports


@dataclass
class Report:
    operation: str
    inputs: dict
    value: float
    bound: float
    margin: float
    converged: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.margin >= 0

    def to_dict(self):
        def clean(x):
            if isinstance(x, float) and not math.isfinite(x):
                return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
            if isinstance(x, dict):
                return {k: clean(v) for k, v in x.items()}
            if isinstance(x, (list, tuple)):
                return [clean(v) for v in x]
            if isinstance(x, np.generic):
                return clean(x.item())
            return x

        d = {"operation": self.operation, "inputs": self.inputs, "value": self.value, "bound": self.bound,
             "margin": self.margin, "converged": self.converged}
        d.update(self.extra)
        return clean(d)

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def _u_norm(u, V, params):
    return hsv_norm(u, V, params)


# ---------------------------------------------------------------------------
# annulus estimate


def annulus_window(q: float, params: SpaceParams):
    """Admissible open interval for t: q_tilde = 2(1 + s/N - 1/t) in (1, q)."""
    N, s = params.N, float(params.s)
    lo = 2 * N / (N + 2 * s)
    d = 2 * N + 2 * s - N * q
    hi = 2 * N / d if d > 0 else math.inf
    if not lo < hi:
        raise DomainError(f"no admissible t for q={q}")
    return lo, hi


def annulus_t(q: float, params: SpaceParams) -> float:
    lo, hi = annulus_window(q, params)
    if math.isinf(hi):
        hi = 4 * lo
    return math.sqrt(lo * hi)


def check_annulus_bound(u: RadialFunction, r: float, R: float, q: float, K, V, params: SpaceParams) -> Report:
    """Empirical constant in the annulus interpolation estimate."""
    if q <= 1:
        raise DomainError("q must exceed 1")
    region = Region.annulus(r, R)
    if not np.any(u.values):
        raise DomainError("u must be nonzero")
    t = annulus_t(q, params)
    N, s = params.N, float(params.s)
    qt = 2 * (1 + s / N - 1 / t)
    if not 1 < qt < q:
        raise DomainError(f"q_tilde={qt} outside (1, {q}); this indicates a bug")
    quad = RegionQuadrature(u.grid, region)
    pu = quad.P @ u.values
    Kf = _pot_callable(K, "K")
    Kq = np.asarray(Kf(quad.r), float) * np.ones_like(quad.r)
    lhs = quad.integral(Kq * np.abs(pu) ** q)
    k_t = quad.integral(Kq**t) ** (1 / t)
    l2 = quad.integral(pu**2)
    nrm = _u_norm(u, V, params)
    rhs = l2 ** ((qt - 1) / 2) * nrm ** (1 + q - qt)
    const = lhs / (k_t * rhs)
    return Report(
        "check_annulus_bound",
        {"r": r, "R": R, "q": q, "N": N, "s": s},
        lhs / k_t,
        rhs,
        float("nan"),
        True,
        {"t": t, "q_tilde": qt, "t_window": list(annulus_window(q, params)), "empirical_constant": const},
    )


# ---------------------------------------------------------------------------
# weighted integral bounds


@dataclass
class BoundContext:
    region: Region
    alpha: float
    beta: float
    nu: float
    m: float
    Lambda: float

    def __post_init__(self):
        if not 0 <= self.beta <= 1:
            raise DomainError("beta must lie in [0, 1]")
        if not (self.m > 0 and math.isfinite(self.Lambda)):
            raise DomainError("need m > 0 and finite Lambda")

    @classmethod
    def build(cls, region: Region, alpha, beta, V, K, grid: RadialGrid, nu=0.0, m=None, u: RadialFunction = None):
        """Compute Lambda on the grid nodes in the region; m defaults to the tightest envelope of u."""
        r = grid.nodes[region.contains(grid.nodes)]
        if region.kind == "ball":
            r = np.concatenate([np.geomspace(grid.r_min * 1e-3, grid.r_min, 20), r])
        Vv = np.asarray(_pot_callable(V, "V")(r), float) * np.ones_like(r)
        Kv = np.asarray(_pot_callable(K, "K")(r), float) * np.ones_like(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = Kv / (r**alpha * Vv**beta)
        lam = float(np.max(ratio))
        if m is None:
            if u is None:
                raise DomainError("give m or u")
            mask = region.contains(grid.nodes)
            m = float(np.max(np.abs(u.values[mask]) * grid.nodes[mask] ** nu)) * (1 + 1e-12)
        return cls(region, float(alpha), float(beta), float(nu), float(m), lam)


def lemma41_rhs(ctx: BoundContext, q: float, norm_u: float, N: int, s: float, S: float, beta1_integral=None):
    a, b, nu, m, lam = ctx.alpha, ctx.beta, ctx.nu, ctx.m, ctx.Lambda
    if b <= 0.5:
        p = 2 * N / (N + 2 * s * (1 - 2 * b))
        I = ctx.region.power_integral(p * (a - nu * (q - 1)), N)
        return lam * m ** (q - 1) * I ** (1 / p) * S ** (1 - 2 * b) * norm_u
    if b < 1:
        I = ctx.region.power_integral((a - nu * (q - 2 * b)) / (1 - b), N)
        return lam * m ** (q - 2 * b) * I ** (1 - b) * norm_u ** (2 * b)
    return lam * m ** (q - 2) * math.sqrt(beta1_integral) * norm_u


def lemma41_case(beta: float) -> str:
    if beta == 0:
        return "beta=0"
    if beta < 0.5:
        return "0<beta<1/2"
    if beta == 0.5:
        return "beta=1/2"
    if beta < 1:
        return "1/2<beta<1"
    return "beta=1"


def check_lemma41(u: RadialFunction, ctx: BoundContext, q: float, params: SpaceParams, V, K,
                  tol: float = 5e-2, S: Optional[float] = None) -> Report:
    """Compare int_region K|u|^q with the case-wise Hoelder bound."""
    if q <= max(1.0, 2 * ctx.beta):
        raise DomainError(f"q={q} must exceed max(1, 2 beta)={max(1.0, 2 * ctx.beta)}")
    g = u.grid
    mask = ctx.region.contains(g.nodes)
    env = ctx.m * g.nodes ** (-ctx.nu)
    bad = np.nonzero(mask & (np.abs(u.values) > env * (1 + 1e-12)))[0]
    if bad.size:
        i = int(bad[0])
        raise PreconditionError(f"envelope |u| <= m r^-nu fails at node {i} (r={g.nodes[i]:.6g})")
    N, s = params.N, float(params.s)
    S = sharp_sobolev_constant(params) if S is None else S
    quad = RegionQuadrature(g, ctx.region)
    pu = quad.P @ u.values
    Kq = np.asarray(_pot_callable(K, "K")(quad.r), float) * np.ones_like(quad.r)
    lhs = quad.integral(Kq * np.abs(pu) ** q)
    nrm = _u_norm(u, V, params)
    extra = None
    if ctx.beta == 1:
        Vq = np.asarray(_pot_callable(V, "V")(quad.r), float) * np.ones_like(quad.r)
        extra = quad.integral(quad.r ** (2 * (ctx.alpha - ctx.nu * (q - 2))) * Vq * pu**2)
    rhs = lemma41_rhs(ctx, q, nrm, N, s, S, extra)
    margin = rhs * (1 + tol) - lhs
    return Report(
        "check_lemma41",
        {"region": ctx.region.to_dict(), "alpha": ctx.alpha, "beta": ctx.beta, "nu": ctx.nu, "m": ctx.m,
         "Lambda": ctx.Lambda, "q": q, "N": N, "s": s},
        lhs,
        rhs,
        margin,
        True,
        {"case": lemma41_case(ctx.beta), "ratio": lhs / rhs if rhs > 0 else math.inf},
    )


def strauss_envelope_ok(est: SupremumEstimate, V, params: SpaceParams, constant: float) -> bool:
    """Does the maximizer satisfy |u| r^{(N-2s)/2} <= constant * ||u||?"""
    u = est.maximizer
    lhs = np.max(np.abs(u.values) * u.grid.nodes ** float(params.strauss_rate))
    return bool(lhs <= constant * hsv_norm(u, V, params) * (1 + 1e-8))


# ---------------------------------------------------------------------------
# campaigns shared by the command line and the tests

LEMMA41_BETAS = (0.0, 0.25, 0.5, 0.75, 1.0)


def lemma41_scenarios():
    """(name, V=K family, region, alpha) triples with finite bounds for every beta."""
    from .exponents import PotentialFamily

    return [
        ("constant", PotentialFamily.power(0, 0), Region.ball(2.0), 0.0),
        ("power", PotentialFamily.power(1, 1), Region.annulus(0.25, 3.0), 0.0),
        ("exponential", PotentialFamily.exponential(2, 1), Region.annulus(0.25, 3.0), 0.0),
    ]


def lemma41_campaign(params: SpaceParams, grid: RadialGrid = None, n_functions: int = 10, q: float = 2.5,
                     nu: float = 0.5, seed: int = 0, tol: float = 5e-2) -> list:
    """All beta cases x scenarios x random bumps; one Report each."""
    from .spaces import random_bumps

    grid = grid or RadialGrid(N=params.N)
    rng = np.random.default_rng(seed)
    bumps = random_bumps(grid, n_functions, rng, 0.5, 2.0)
    out = []
    for name, fam, region, alpha in lemma41_scenarios():
        for beta in LEMMA41_BETAS:
            for j, u in enumerate(bumps):
                ctx = BoundContext.build(region, alpha, beta, fam, fam, grid, nu=nu, u=u)
                rep = check_lemma41(u, ctx, q, params, fam, fam, tol=tol)
                rep.extra.update({"scenario": name, "function": j})
                out.append(rep)
    return out


def strauss_family(params: SpaceParams, grid: RadialGrid = None, centers=range(1, 11), V=None):
    """Strauss constants of the hat bumps max(0, 1 - |r - k|)."""
    from .spaces import hat_bump, strauss_check

    grid = grid or RadialGrid(N=params.N)
    return [(k, strauss_check(hat_bump(grid, k), V, params)) for k in centers]
