"""Radial grids, radial functions and the norms of the weighted spaces.

Radial integrals run on a geometric grid, i.e. a uniform lattice in
x = log r. The Gagliardo double integral is reduced to (r, rho) by averaging
the kernel over directions; its diagonal singularity |x - y|^(-1-2s) is
handled by a trapezoid sum that skips the diagonal plus zeta-function end
corrections built from the two nearest neighbours on each side.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate, special
from scipy.interpolate import CubicSpline

from .exponents import DomainError, PotentialFamily, SpaceParams


class NumericError(RuntimeError):
    """Raised when a quadrature cannot meet its accuracy target."""


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere S^{N-1} in R^N."""
    return 2 * math.pi ** (N / 2) / math.gamma(N / 2)


# ---------------------------------------------------------------------------
# constants


def _angular_moment(N: int, s: float, epsabs: float) -> float:
    # integral of |omega_1|^{2s} over S^{N-1}; with y = cos^2 the integrand is
    # a pure algebraic weight on [0, 1]
    if N == 2:
        val, err = integrate.quad(lambda y: 1.0, 0, 1, weight="alg", wvar=(-0.5, s - 0.5), epsabs=epsabs)
        return 2 * val
    val, err = integrate.quad(lambda y: 1.0, 0, 1, weight="alg", wvar=(s - 0.5, (N - 3) / 2), epsabs=epsabs)
    return sphere_area(N - 1) * val


def _radial_moment(s: float, epsabs: float, limit: int) -> float:
    # int_0^inf (1 - cos t) t^{-1-2s} dt, split at t = 1
    g = lambda t: (1 - np.cos(t)) / t**2 if t > 1e-4 else 0.5 - t**2 / 24
    head, e1 = integrate.quad(g, 0, 1, weight="alg", wvar=(1 - 2 * s, 0), epsabs=epsabs, limit=limit)
    osc, e2 = integrate.quad(lambda t: t ** (-1 - 2 * s), 1, np.inf, weight="cos", wvar=1.0, epsabs=epsabs, limlst=limit)
    if max(e1, e2) > 1e3 * epsabs:
        raise NumericError(f"radial moment did not converge (errors {e1:.2e}, {e2:.2e})")
    return head + 1 / (2 * s) - osc


def cos_moment_integral(params: SpaceParams, epsabs: float = 1e-13, limit: int = 200) -> float:
    """int_{R^N} (1 - cos zeta_1)/|zeta|^{N+2s} d zeta, by polar splitting."""
    N, s = int(params.N), float(params.s)
    return _angular_moment(N, s, epsabs) * _radial_moment(s, epsabs, limit)


def norm_constant_C(params: SpaceParams, epsabs: float = 1e-13, limit: int = 200) -> float:
    if params.N < 2:
        raise DomainError("N must be at least 2")
    return 1.0 / cos_moment_integral(params, epsabs, limit)


def norm_constant_C_printed(params: SpaceParams) -> float:
    """Closed form as printed alongside the integral definition (kept for comparison)."""
    N, s = params.N, float(params.s)
    return 2 ** (-(N + 2 * s) / 2 + 1) * math.pi ** (-N / 2) * 2 ** (2 * s) * s * (1 - s) / math.gamma(2 - s)


def sobolev_constant_S(params: SpaceParams) -> float:
    """Gamma-function formula with outer power 2*_s/2."""
    N, s = params.N, float(params.s)
    base = (
        1 / (2 ** (2 * s) * math.pi**s)
        * math.gamma((N - 2 * s) / 2) / math.gamma((N + 2 * s) / 2)
        * (math.gamma(N) / math.gamma(N / 2)) ** (2 * s / N)
    )
    return base ** (float(params.two_star) / 2)


def sharp_sobolev_constant(params: SpaceParams) -> float:
    """Best constant in ||u||_{2*} <= S [u], i.e. the same bracket to the power 1/2."""
    N, s = params.N, float(params.s)
    base = (
        1 / (2 ** (2 * s) * math.pi**s)
        * math.gamma((N - 2 * s) / 2) / math.gamma((N + 2 * s) / 2)
        * (math.gamma(N) / math.gamma(N / 2)) ** (2 * s / N)
    )
    return math.sqrt(base)


# ---------------------------------------------------------------------------
# grids and functions


@lru_cache(maxsize=None)
def gregory_end_weights(order: int) -> tuple:
    """Left-end weights of the Gregory rule exact for polynomials of degree < order.

    The corrections d_m to the trapezoid weights cancel the Euler-Maclaurin
    end terms: sum_m d_m m^j = B_{j+1}/(j+1).
    """
    m = np.arange(order, dtype=float)
    A = np.vander(m, order, increasing=True).T
    rhs = np.array([special.bernoulli(j + 1)[-1] / (j + 1) if j % 2 else 0.0 for j in range(order)])
    d = np.linalg.solve(A, rhs)
    base = np.ones(order)
    base[0] = 0.5
    w = base + d
    if np.any(w <= 0):
        raise NumericError(f"Gregory weights of order {order} are not positive")
    return tuple(w)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Geometric grid r_i = r_min * exp(i h) for a radial problem in R^N."""

    r_min: float = 1e-3
    r_max: float = 50.0
    M: int = 512
    N: int = 3
    order: int = 8

    def __post_init__(self):
        if not (0 < self.r_min < self.r_max) or self.M < 4 * self.order:
            raise DomainError("grid needs 0 < r_min < r_max and enough nodes")
        x = np.linspace(math.log(self.r_min), math.log(self.r_max), self.M)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "nodes", np.exp(x))
        object.__setattr__(self, "h", float(x[1] - x[0]))
        c = np.ones(self.M)
        ends = np.array(gregory_end_weights(self.order))
        c[: self.order] = ends
        c[-self.order :] = ends[::-1]
        object.__setattr__(self, "weights", self.h * c * self.nodes**self.N)
        object.__setattr__(self, "ball_weight", self.r_min**self.N / self.N)

    @property
    def key(self):
        return (self.r_min, self.r_max, self.M, self.N, self.order)

    def __eq__(self, other):
        return isinstance(other, RadialGrid) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def full_weights(self) -> np.ndarray:
        """Mass weights for integrals over R^N of functions vanishing past r_max.

        Plain trapezoid in log r, with the inner ball lumped into the first
        node. This is the rule the Gagliardo form uses on its lattice, so
        operator, energy and norms share one discrete L^2 product; for
        functions decaying at both ends it is spectrally accurate.
        """
        w = self.h * self.nodes**self.N
        w[0] = 0.5 * w[0] + self.ball_weight
        w[-1] *= 0.5
        return sphere_area(self.N) * w

    def integrate(self, g: np.ndarray) -> float:
        """int_{R^N} g(|x|) dx for g sampled at the nodes (zero beyond r_max)."""
        return float(np.dot(self.full_weights, g))

    def integrate_gregory(self, g: np.ndarray) -> float:
        """Same integral with the end-corrected rule, for data not decaying at r_max."""
        return sphere_area(self.N) * float(np.dot(self.weights, g) + self.ball_weight * g[0])

    def refined(self, factor: int = 2) -> "RadialGrid":
        return RadialGrid(self.r_min, self.r_max, factor * (self.M - 1) + 1, self.N, self.order)


@dataclass(frozen=True)
class Extrapolation:
    """Behaviour beyond r_max: ``zero`` or ``power`` with the given exponent."""

    kind: str = "zero"
    exponent: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "power"):
            raise DomainError(f"unknown extrapolation {self.kind!r}")

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def power(cls, exponent: float):
        return cls("power", float(exponent))


ZERO = Extrapolation.zero()


@dataclass(eq=False)
class RadialFunction:
    grid: RadialGrid
    values: np.ndarray
    extrapolation: Extrapolation = ZERO

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.M,):
            raise DomainError(f"expected {self.grid.M} values, got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("radial function has non-finite values")

    @classmethod
    def from_callable(cls, grid: RadialGrid, f: Callable, extrapolation: Extrapolation = ZERO):
        return cls(grid, f(grid.nodes), extrapolation)

    def with_values(self, values) -> "RadialFunction":
        return RadialFunction(self.grid, values, self.extrapolation)

    def __call__(self, r):
        r = np.asarray(r, float)
        inside = CubicSpline(self.grid.x, self.values)(np.log(np.clip(r, self.grid.r_min, self.grid.r_max)))
        out = r > self.grid.r_max
        if np.any(out):
            if self.extrapolation.kind == "zero":
                tail = 0.0
            else:
                tail = self.values[-1] * (r / self.grid.r_max) ** self.extrapolation.exponent
            inside = np.where(out, tail, inside)
        return inside

    def __neg__(self):
        return self.with_values(-self.values)

    def __mul__(self, c: float):
        return self.with_values(c * self.values)

    __rmul__ = __mul__

    def __add__(self, other: "RadialFunction"):
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "RadialFunction"):
        return self.with_values(self.values - other.values)

    def dilate(self, lam: float) -> "RadialFunction":
        """The function r -> u(lam r), resampled on the same grid."""
        return self.with_values(self(lam * self.grid.nodes))

    # serialization -------------------------------------------------------

    def save(self, path: Union[str, Path], params: Optional[SpaceParams] = None) -> None:
        path = Path(path)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "value"])
            for r, v in zip(self.grid.nodes, self.values):
                w.writerow([repr(float(r)), repr(float(v))])
        meta = {
            "N": self.grid.N,
            "s": None if params is None else float(params.s),
            "extrapolation": self.extrapolation.kind,
            "tail_exponent": self.extrapolation.exponent if self.extrapolation.kind == "power" else None,
            "grid": {"r_min": self.grid.r_min, "r_max": self.grid.r_max, "M": self.grid.M, "order": self.grid.order},
        }
        path.with_suffix(".json").write_text(json.dumps(meta, indent=2))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "RadialFunction":
        path = Path(path)
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        meta = json.loads(path.with_suffix(".json").read_text())
        g = meta.get("grid") or {}
        grid = RadialGrid(
            g.get("r_min", float(data[0, 0])), g.get("r_max", float(data[-1, 0])), g.get("M", len(data)), meta["N"], g.get("order", 8)
        )
        if not np.allclose(grid.nodes, data[:, 0], rtol=1e-12):
            raise DomainError("CSV radii are not a geometric grid")
        ext = Extrapolation.zero() if meta["extrapolation"] == "zero" else Extrapolation.power(meta["tail_exponent"])
        return cls(grid, data[:, 1], ext)


def gaussian(grid: RadialGrid, width: float = 1.0, amplitude: float = 1.0) -> RadialFunction:
    return RadialFunction.from_callable(grid, lambda r: amplitude * np.exp(-((r / width) ** 2)))


def smooth_bump(grid: RadialGrid, center: float = 0.0, radius: float = 1.0, amplitude: float = 1.0) -> RadialFunction:
    """C-infinity bump exp(1 - 1/(1 - t^2)) with t = (r - center)/radius."""

    def f(r):
        t = (r - center) / radius
        out = np.zeros_like(r)
        m = np.abs(t) < 1
        out[m] = amplitude * np.exp(1 - 1 / (1 - t[m] ** 2))
        return out

    return RadialFunction.from_callable(grid, f)


# ---------------------------------------------------------------------------
# the angular kernel and the Gagliardo quadratic form


def angular_integral(r, rho, N: int, s: float):
    """int_0^pi (r^2 + rho^2 - 2 r rho cos t)^(-(N+2s)/2) sin^(N-2) t dt."""
    r, rho = np.broadcast_arrays(np.asarray(r, float), np.asarray(rho, float))
    nu = (N + 2 * s) / 2
    a, b, c = nu / 2, (nu + 1) / 2, N / 2
    big = r**2 + rho**2
    z = (2 * r * rho / big) ** 2
    omz = ((r**2 - rho**2) / big) ** 2
    pref = special.beta(0.5, (N - 1) / 2) * big ** (-nu)
    out = np.empty_like(z)
    lo = z <= 0.5
    out[lo] = special.hyp2f1(a, b, c, z[lo])
    hi = ~lo
    if np.any(hi):
        w = omz[hi]
        g = special.gamma
        A = g(c) * g(c - a - b) / (g(c - a) * g(c - b))
        B = g(c) * g(a + b - c) / (g(a) * g(b))
        out[hi] = A * special.hyp2f1(a, b, a + b - c + 1, w) + B * w ** (c - a - b) * special.hyp2f1(c - a, c - b, c - a - b + 1, w)
    return pref * out


class AngularKernel:
    """Direction-averaged kernel on the log-lattice extended past both grid ends.

    ``table[i, j]`` is G(x_i, x_j) = |S^{N-1}| |S^{N-2}| r^N rho^N I(r, rho)
    where I is :func:`angular_integral`; the double integral over R^N x R^N
    of a radial integrand F(|x|, |y|) |x-y|^{-N-2s} equals the double integral
    of F G over (x, y) in R^2.
    """

    def __init__(self, grid: RadialGrid, s: float, ext_lo: float = 4.0, ext_hi: float = 6.0):
        self.grid = grid
        self.N = grid.N
        self.s = float(s)
        h = grid.h
        self.n_lo = int(math.ceil(ext_lo / h))
        self.n_hi = int(math.ceil(ext_hi / h))
        j = np.arange(-self.n_lo, grid.M + self.n_hi)
        self.x = grid.x[0] + j * h
        self.r = np.exp(self.x)
        N = self.N
        cst = sphere_area(N) * (sphere_area(N - 1) if N > 2 else 2.0)
        R, P = np.meshgrid(self.r, self.r, indexing="ij")
        with np.errstate(divide="ignore", invalid="ignore"):
            T = cst * (R * P) ** N * angular_integral(R, P, N, self.s)
        np.fill_diagonal(T, 0.0)
        self.table = T
        # far-field masses beyond the extended lattice (leading-order asymptotics)
        S2 = sphere_area(N) ** 2
        rho_lo, rho_hi = self.r[0] * math.exp(-h / 2), self.r[-1] * math.exp(h / 2)
        self.far_lo = S2 * rho_lo**N * self.r ** (-2 * self.s) / N
        self.far_hi = S2 * self.r**N * rho_hi ** (-2 * self.s) / (2 * self.s)

    @property
    def L(self) -> int:
        return len(self.x)

    def symmetric_error(self) -> float:
        T = self.table
        return float(np.max(np.abs(T - T.T)) / np.max(np.abs(T)))

    def pair_weights(self) -> np.ndarray:
        """Weights w_ij with [u]^2 = (C/2) sum_{i != j} w_ij (U_i - U_j)^2."""
        h, s = self.grid.h, self.s
        gam = 1 - 2 * s
        z1, z3 = special.zeta(-gam), special.zeta(-gam - 2)
        c1 = h / 6 * (-8 * z1 + 2 * z3)
        c2 = h / 6 * (2 * z1 - 2 * z3) / 2**gam
        W = h * h * self.table
        idx = np.arange(self.L)
        for k, c in ((1, c1), (2, c2)):
            i = idx[:-k]
            W[i, i + k] += h * c * self.table[i, i + k]
            W[i + k, i] += h * c * self.table[i + k, i]
        return W

    def extension(self, extrapolation: Extrapolation) -> np.ndarray:
        """Linear map from grid values to lattice values."""
        M = self.grid.M
        E = np.zeros((self.L, M))
        E[: self.n_lo, 0] = 1.0
        E[self.n_lo : self.n_lo + M] = np.eye(M)
        if extrapolation.kind == "power":
            rr = self.r[self.n_lo + M :] / self.grid.r_max
            E[self.n_lo + M :, M - 1] = rr**extrapolation.exponent
        return E

    def matrix(self, params: SpaceParams, extrapolation: Extrapolation = ZERO) -> np.ndarray:
        return _form_matrix(self, float(params.norm_C), extrapolation)


def _anchored(d: np.ndarray, k: int) -> np.ndarray:
    """Matrix of the form sum_i d_i (U_i - U_k)^2."""
    F = np.diag(d)
    F[k, :] -= d
    F[:, k] -= d
    F[k, k] += d.sum()
    return F


def _form_matrix(kern: AngularKernel, C: float, extrapolation: Extrapolation) -> np.ndarray:
    W = kern.pair_weights()
    lap = np.diag(W.sum(axis=1)) - W
    h = kern.grid.h
    L = kern.L
    M = kern.grid.M
    # far lower region carries the value U_1; far upper region is either the
    # constant U_M (exponent 0) or truncated to zero
    hi_const = extrapolation.kind == "power" and extrapolation.exponent == 0
    far = _anchored(h * kern.far_lo, 0)
    d = h * kern.far_hi
    far += _anchored(d, L - 1) if hi_const else np.diag(d)
    A_ext = C * (lap + far)
    E = kern.extension(extrapolation)
    A = E.T @ A_ext @ E
    return 0.5 * (A + A.T)


_KERNELS: dict = {}
_MATRICES: dict = {}


def angular_kernel(grid: RadialGrid, s: float) -> AngularKernel:
    key = (grid.key, float(s))
    if key not in _KERNELS:
        _KERNELS[key] = AngularKernel(grid, s)
    return _KERNELS[key]


def gagliardo_matrix(grid: RadialGrid, params: SpaceParams, extrapolation: Extrapolation = ZERO) -> np.ndarray:
    """Symmetric A with [u]^2 = U^T A U for grid values U."""
    if grid.N != params.N:
        raise DomainError(f"grid is for N={grid.N}, params for N={params.N}")
    key = (grid.key, float(params.s), extrapolation)
    if key not in _MATRICES:
        _MATRICES[key] = angular_kernel(grid, params.s).matrix(params, extrapolation)
    return _MATRICES[key]


# ---------------------------------------------------------------------------
# norms


def _pot_values(pot, grid: RadialGrid, which: str) -> np.ndarray:
    if pot is None:
        return np.ones(grid.M) if which == "K" else np.zeros(grid.M)
    if isinstance(pot, PotentialFamily):
        return np.asarray(pot.V(grid.nodes) if which == "V" else pot.K(grid.nodes), float)
    if callable(pot):
        return np.asarray(pot(grid.nodes), float) * np.ones(grid.M)
    arr = np.asarray(pot, float)
    return arr * np.ones(grid.M)


def _pot_callable(pot, which: str) -> Callable:
    if isinstance(pot, PotentialFamily):
        return pot.V if which == "V" else pot.K
    if callable(pot):
        return pot
    if pot is None:
        return (lambda r: 1.0) if which == "K" else (lambda r: 0.0)
    if np.ndim(pot) == 0:
        return lambda r: float(pot)
    return None


def _tail_integral(u: RadialFunction, weight: Callable, power: float) -> float:
    """int_{|x| > r_max} weight(|x|) |u|^power dx for a power tail."""
    if u.extrapolation.kind == "zero" or u.values[-1] == 0:
        return 0.0
    if weight is None:
        raise DomainError("tabulated weights cannot be integrated past r_max")
    g = u.grid
    p = u.extrapolation.exponent
    f = lambda r: weight(r) * abs(u.values[-1] * (r / g.r_max) ** p) ** power * r ** (g.N - 1)
    val, err = integrate.quad(f, g.r_max, np.inf, limit=200)
    return sphere_area(g.N) * val


def gagliardo_seminorm(u: RadialFunction, params: SpaceParams) -> float:
    A = gagliardo_matrix(u.grid, params, u.extrapolation)
    q = float(u.values @ A @ u.values)
    if q < -1e-12 * max(1.0, float(u.values @ u.values)):
        raise NumericError(f"negative quadratic form {q:.3e}: grid too coarse for this function")
    return math.sqrt(max(q, 0.0))


def weighted_l2_squared(u: RadialFunction, V) -> float:
    Vv = _pot_values(V, u.grid, "V")
    if np.any(Vv < 0):
        bad = int(np.argmax(Vv < 0))
        raise DomainError(f"V is negative at node {bad} (r={u.grid.nodes[bad]:.4g})")
    tail = _tail_integral(u, _pot_callable(V, "V"), 2) if np.any(Vv) else 0.0
    return u.grid.integrate(Vv * u.values**2) + tail


def hsv_norm(u: RadialFunction, V, params: SpaceParams) -> float:
    return math.sqrt(gagliardo_seminorm(u, params) ** 2 + weighted_l2_squared(u, V))


def lqk_integral(u: RadialFunction, K, q: float) -> float:
    Kv = _pot_values(K, u.grid, "K")
    if np.any(Kv <= 0):
        bad = int(np.argmax(Kv <= 0))
        raise DomainError(f"K is not positive at node {bad} (r={u.grid.nodes[bad]:.4g})")
    return u.grid.integrate(Kv * np.abs(u.values) ** q) + _tail_integral(u, _pot_callable(K, "K"), q)


def lqk_norm(u: RadialFunction, K, q: float) -> float:
    if q <= 1:
        raise DomainError(f"q must exceed 1, got {q}")
    return lqk_integral(u, K, q) ** (1 / q)


def critical_norm(u: RadialFunction, params: SpaceParams) -> float:
    """||u||_{L^{2*_s}}."""
    return lqk_norm(u, None, float(params.two_star))


@dataclass
class SumNorm:
    value: float
    radius: float
    is_upper_bound: bool = True

    def __float__(self):
        return self.value


def sum_space_norm(u: RadialFunction, K, q1: float, q2: float) -> SumNorm:
    """Upper bound on the L^q1_K + L^q2_K norm over splittings at grid radii.

    Splitting index k puts nodes i < k (and the inner ball) in the first
    piece and the remaining nodes (and any tail) in the second.
    """
    if q1 <= 1 or q2 <= 1:
        raise DomainError("q1 and q2 must exceed 1")
    g = u.grid
    Kv = _pot_values(K, g, "K")
    if np.any(Kv <= 0):
        raise DomainError("K must be positive on the grid")
    w = g.full_weights * Kv
    a = np.concatenate([[0.0], np.cumsum(w * np.abs(u.values) ** q1)])
    b2 = w * np.abs(u.values) ** q2
    tail = _tail_integral(u, _pot_callable(K, "K"), q2)
    b = np.concatenate([np.cumsum(b2[::-1])[::-1], [0.0]]) + tail
    vals = np.maximum(np.maximum(a, 0) ** (1 / q1), np.maximum(b, 0) ** (1 / q2))
    k = int(np.argmin(vals))
    radius = 0.0 if k == 0 else (g.r_max if k == g.M else math.sqrt(g.nodes[k - 1] * g.nodes[k]))
    return SumNorm(float(vals[k]), radius)


@dataclass
class StraussReport:
    c_emp: float
    c_hsv: float
    argmax_r: float
    seminorm: float
    critical_norm: float
    theta: float
    profile: np.ndarray = field(repr=False)

    def to_dict(self):
        return {
            "c_emp": self.c_emp,
            "c_hsv": self.c_hsv,
            "argmax_r": self.argmax_r,
            "seminorm": self.seminorm,
            "critical_norm": self.critical_norm,
            "theta": self.theta,
        }


def strauss_check(u: RadialFunction, V, params: SpaceParams) -> StraussReport:
    """Empirical constants in the radial decay bound |u| r^{(N-2s)/2} <= c * norm."""
    semi = gagliardo_seminorm(u, params)
    crit = critical_norm(u, params)
    if semi == 0 or crit == 0:
        raise DomainError("zero function has no Strauss quotient")
    theta = float(params.theta)
    weighted = np.abs(u.values) * u.grid.nodes ** float(params.strauss_rate)
    denom = semi**theta * crit ** (1 - theta)
    i = int(np.argmax(weighted))
    norm = math.sqrt(semi**2 + weighted_l2_squared(u, V))
    return StraussReport(
        float(weighted[i] / denom), float(weighted[i] / norm), float(u.grid.nodes[i]), semi, crit, theta, weighted / denom
    )


def hat_bump(grid: RadialGrid, center: float, half_width: float = 1.0) -> RadialFunction:
    """max(0, 1 - |r - center|/half_width)."""
    return RadialFunction.from_callable(grid, lambda r: np.maximum(0.0, 1 - np.abs(r - center) / half_width))


def random_bumps(grid: RadialGrid, n: int, rng: np.random.Generator, r_lo=0.0, r_hi=3.0):
    """Smooth bumps with random centre, radius and amplitude."""
    out = []
    for _ in range(n):
        c = rng.uniform(r_lo, r_hi)
        rad = rng.uniform(0.4, 1.5)
        out.append(smooth_bump(grid, c, rad, rng.uniform(0.5, 2.0)))
    return out
