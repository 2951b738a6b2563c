"""Energy functional, mountain-pass solver and deflation for

    (-Delta)^s u + V(|x|) u = K(|x|) f(u)   in R^N,  u radial.

Everything acts on grid values U through the discrete form
E(U) = U^T B U / 2 - sum_i m_i K_i F(U_i), with B the Gram matrix of the
H^s_V inner product and m_i the radial quadrature weights.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, asdict
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import linalg, optimize, special

from .exponents import DomainError, PotentialFamily, SpaceParams, classify_potentials
from .spaces import ZERO, RadialFunction, RadialGrid, _pot_values, gagliardo_matrix, gaussian

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    def __init__(self, msg, history=None, best=None):
        super().__init__(msg)
        self.history = history or []
        self.best = best


# ---------------------------------------------------------------------------
# nonlinearities


class Nonlinearity:
    """Odd (or truncated) superlinear f with antiderivative F.

    kind: ``pure`` (|t|^{q-2} t), ``min`` (sign t * min(|t|^{q1-1}, |t|^{q2-1}))
    or ``rational`` (|t|^{q2-2} t / (1 + |t|^{q2-q1})).
    """

    KINDS = ("pure", "min", "rational")

    def __init__(self, kind: str, q1: float, q2: Optional[float] = None, mu: Optional[float] = None,
                 truncated: bool = False):
        if kind not in self.KINDS:
            raise DomainError(f"unknown nonlinearity {kind!r}")
        q2 = q1 if q2 is None else q2
        if kind == "pure" and q2 != q1:
            raise DomainError("pure power takes a single exponent")
        if min(q1, q2) <= 2:
            raise DomainError(f"exponents must exceed 2, got q1={q1}, q2={q2}")
        if kind == "rational" and q2 < q1:
            raise DomainError("rational form needs q1 <= q2")
        self.kind, self.q1, self.q2 = kind, float(q1), float(q2)
        self.truncated = bool(truncated)
        if mu is None:
            # f(t)/t^(mu-1) is nondecreasing on t > 0 for these choices
            mu = min(q1, q2)
        self.mu = float(mu)
        if self.mu <= 2:
            raise DomainError(f"mu must exceed 2, got {self.mu}")
        self.t0 = 1.0

    @classmethod
    def pure(cls, q, **kw):
        return cls("pure", q, q, **kw)

    @classmethod
    def min_power(cls, q1, q2, **kw):
        return cls("min", q1, q2, **kw)

    @classmethod
    def rational(cls, q1, q2, **kw):
        return cls("rational", q1, q2, **kw)

    def truncate(self) -> "Nonlinearity":
        return Nonlinearity(self.kind, self.q1, self.q2, self.mu, truncated=True)

    def _cut(self, t, val):
        return np.where(t < 0, 0.0, val) if self.truncated else val

    def f(self, t):
        t = np.asarray(t, float)
        a = np.abs(t)
        if self.kind == "pure":
            v = a ** (self.q1 - 1)
        elif self.kind == "min":
            v = np.minimum(a ** (self.q1 - 1), a ** (self.q2 - 1))
        else:
            v = a ** (self.q2 - 1) / (1 + a ** (self.q2 - self.q1))
        return self._cut(t, np.sign(t) * v)

    def fprime(self, t):
        t = np.asarray(t, float)
        a = np.abs(t)
        if self.kind == "pure":
            v = (self.q1 - 1) * a ** (self.q1 - 2)
        elif self.kind == "min":
            lo, hi = sorted((self.q1, self.q2))
            v = np.where(a < 1, (hi - 1) * a ** (hi - 2), (lo - 1) * a ** (lo - 2))
        else:
            d = self.q2 - self.q1
            p = a**d
            v = a ** (self.q2 - 2) * ((self.q2 - 1) * (1 + p) - d * p) / (1 + p) ** 2
        return self._cut(t, v)

    def F(self, t):
        t = np.asarray(t, float)
        a = np.abs(t)
        if self.kind == "pure":
            v = a**self.q1 / self.q1
        elif self.kind == "min":
            lo, hi = sorted((self.q1, self.q2))
            v = np.where(a <= 1, a**hi / hi, 1 / hi + (a**lo - 1) / lo)
        elif self.q1 == self.q2:
            v = a**self.q1 / (2 * self.q1)
        else:
            d = self.q2 - self.q1
            c = self.q2 / d
            v = a**self.q2 / self.q2 * special.hyp2f1(1, c, 1 + c, -(a**d))
        return self._cut(t, v)

    def is_odd(self, samples=None) -> bool:
        t = np.linspace(0.01, 5, 200) if samples is None else np.asarray(samples, float)
        return bool(np.allclose(self.f(-t), -self.f(t), rtol=0, atol=1e-14))

    def growth_constant(self, samples=None) -> float:
        """Smallest C with |f(t)| <= C min(|t|^{q1-1}, |t|^{q2-1}) on the samples."""
        t = np.geomspace(1e-4, 1e4, 400) if samples is None else np.abs(np.asarray(samples, float))
        t = t[t > 0]
        return float(np.max(np.abs(self.f(t)) / np.minimum(t ** (self.q1 - 1), t ** (self.q2 - 1))))

    def to_dict(self):
        return {"kind": self.kind, "q1": self.q1, "q2": self.q2, "mu": self.mu, "truncated": self.truncated}


@dataclass
class ARReport:
    violation: float
    worst_t: float
    lower_violation: float
    upper_violation: float
    mu: float

    @property
    def passed(self):
        return self.violation <= 1e-12


def ar_check(f, t_samples: Sequence[float], mu: Optional[float] = None) -> ARReport:
    """Check 0 <= mu F(t) <= f(t) t at each sample; violation > 0 means failure."""
    t = np.asarray(list(t_samples), float)
    if t.size == 0:
        raise DomainError("need at least one sample")
    mu = f.mu if mu is None else mu
    F = np.asarray(f.F(t), float)
    ft = np.asarray(f.f(t), float) * t
    lower = -mu * F
    upper = mu * F - ft
    scale = np.maximum(1.0, np.abs(ft))
    v = np.maximum(lower, upper) / scale
    i = int(np.argmax(v))
    return ARReport(float(max(v[i], 0.0) if v[i] <= 0 else v[i]), float(t[i]), float(np.max(lower / scale)),
                    float(np.max(upper / scale)), float(mu))


# ---------------------------------------------------------------------------
# discrete problem


class Discretization:
    """Assembled B, weights and potentials for one (grid, params, V, K, f)."""

    def __init__(self, grid: RadialGrid, params: SpaceParams, V, K, f: Nonlinearity):
        self.grid, self.params, self.f = grid, params, f
        self.V, self.K = V, K
        self.mass = grid.full_weights
        self.Vv = _pot_values(V, grid, "V")
        self.Kv = _pot_values(K, grid, "K")
        if np.any(self.Vv < 0) or np.any(self.Kv <= 0):
            raise DomainError("need V >= 0 and K > 0 on the grid")
        self.A = gagliardo_matrix(grid, params, ZERO)
        self.B = self.A + np.diag(self.mass * self.Vv)
        self.cho = linalg.cho_factor(self.B)
        self.mK = self.mass * self.Kv

    def norm2(self, U):
        return float(U @ self.B @ U)

    def norm(self, U):
        return math.sqrt(max(self.norm2(U), 0.0))

    def energy(self, U):
        return 0.5 * self.norm2(U) - float(np.dot(self.mK, self.f.F(U)))

    def residual(self, U):
        """Euclidean gradient of the discrete energy."""
        return self.B @ U - self.mK * self.f.f(U)

    def riesz(self, U):
        return linalg.cho_solve(self.cho, self.residual(U))

    def grad_norm(self, U):
        r = self.residual(U)
        return math.sqrt(max(float(r @ linalg.cho_solve(self.cho, r)), 0.0))

    def hessian(self, U):
        return self.B - np.diag(self.mK * self.f.fprime(U))

    def nehari(self, U):
        n2 = self.norm2(U)
        return abs(n2 - float(np.dot(self.mK, self.f.f(U) * U))) / n2

    def func(self, U):
        return RadialFunction(self.grid, U)


_DISC = {}


def discretization(grid, params, V, K, f) -> Discretization:
    key = (grid.key, float(params.s), params.N, _pkey(V), _pkey(K), repr(f.to_dict()))
    d = _DISC.get(key)
    if d is None:
        if len(_DISC) > 8:
            _DISC.clear()
        d = _DISC[key] = Discretization(grid, params, V, K, f)
    return d


def _pkey(p):
    if isinstance(p, PotentialFamily):
        return (p.kind, repr(sorted((k, str(v)) for k, v in p.params.items())))
    if p is None or np.ndim(p) == 0:
        return p
    return id(p)


def energy(u: RadialFunction, V, K, f: Nonlinearity, params: SpaceParams) -> float:
    return discretization(u.grid, params, V, K, f).energy(u.values)


def energy_gradient(u: RadialFunction, V, K, f: Nonlinearity, params: SpaceParams) -> RadialFunction:
    """Riesz representative of E'(u) in the discrete H^s_V product."""
    d = discretization(u.grid, params, V, K, f)
    g = d.riesz(u.values)
    if not np.all(np.isfinite(g)):
        raise SolverError("linear solve produced non-finite gradient")
    return u.with_values(g)


def h_inner(u: RadialFunction, v: RadialFunction, V, params: SpaceParams) -> float:
    d = discretization(u.grid, params, V, None, Nonlinearity.pure(3))
    return float(u.values @ d.B @ v.values)


@dataclass
class EnergyBound:
    """E(u) >= ||u||^2/2 - C1 ||u||^q1 - C2 ||u||^q2 with estimated constants."""

    C1: float
    C2: float
    q1: float
    q2: float
    R0: float
    R_inf: float
    pieces: dict = field(default_factory=dict)

    def __call__(self, norm):
        n = np.asarray(norm, float)
        return 0.5 * n**2 - self.C1 * n**self.q1 - self.C2 * n**self.q2

    def to_dict(self):
        return {"C1": self.C1, "C2": self.C2, "q1": self.q1, "q2": self.q2, "R0": self.R0, "R_inf": self.R_inf,
                **self.pieces}


def energy_lower_bound(V, K, f: "Nonlinearity", params: SpaceParams, grid: RadialGrid = None,
                       R0: float = 1.0, R_inf: float = 4.0, seed: int = 0, starts: int = 4) -> EnergyBound:
    """Constants of the small-norm energy bound from supremum estimates.

    F(t) <= G min(|t|^q1, |t|^q2) with G = growth constant / min(q1, q2); the
    q1 power is integrated over the ball and the annulus R0 < r < R_inf, the
    q2 power over the exterior. Each integral is bounded by the estimated
    supremum on the unit sphere, so C1 and C2 inherit their lower-bound
    character.
    """
    from .verify import Region, estimate_sup

    if not 0 < R0 < R_inf:
        raise DomainError("need 0 < R0 < R_inf")
    G = f.growth_constant() / min(f.q1, f.q2)
    kw = dict(grid=grid, seed=seed, starts=starts)
    s0 = estimate_sup(f.q1, Region.ball(R0), V, K, params, **kw).value
    ann = estimate_sup(f.q1, Region.annulus(R0, R_inf), V, K, params, **kw).value
    sinf = estimate_sup(f.q2, Region.complement(R_inf), V, K, params, **kw).value
    return EnergyBound(G * (s0 + ann), G * sinf, f.q1, f.q2, float(R0), float(R_inf),
                       {"G": G, "S0": s0, "annulus": ann, "Sinf": sinf})


# ---------------------------------------------------------------------------
# solver configuration and results


@dataclass
class SolverConfig:
    M: int = 512
    r_min: float = 1e-3
    r_max: float = 50.0
    tol: float = 1e-8
    max_outer: int = 3000
    path_nodes: int = 32
    newton_switch: float = 1e-2
    newton_iters: int = 60
    patience: int = 300
    separation: float = 0.1
    starts: int = 40
    nonneg: bool = True
    seed: int = 0

    def grid(self, N: int) -> RadialGrid:
        return RadialGrid(self.r_min, self.r_max, self.M, N)


@dataclass
class Solution:
    u: RadialFunction
    energy: float
    grad_norm: float
    pde_residual: float
    nehari_residual: float
    path_history: Optional[List[tuple]] = None
    nonneg: bool = False
    norm: float = 0.0
    iterations: int = 0

    def to_dict(self):
        return {
            "energy": self.energy,
            "grad_norm": self.grad_norm,
            "pde_residual": self.pde_residual,
            "nehari_residual": self.nehari_residual,
            "nonneg": self.nonneg,
            "norm": self.norm,
            "iterations": self.iterations,
            "path_history": [list(h) for h in self.path_history] if self.path_history else None,
        }


def default_start(grid: RadialGrid, f: Nonlinearity, width: float = 1.0) -> RadialFunction:
    """Gaussian bump with maximum 2 t0."""
    return gaussian(grid, width, 2 * f.t0)


def find_endpoint(u0: RadialFunction, V, K, f: Nonlinearity, params: SpaceParams, max_power: int = 60):
    """Smallest lambda = 2^k with E(lambda u0) < -1; returns (lambda, lambda u0, energies)."""
    if not np.any(u0.values > 0):
        raise DomainError("u0 must be positive somewhere")
    if not np.any(u0.values >= f.t0):
        raise DomainError(f"u0 must reach t0={f.t0} on a set of positive measure")
    d = discretization(u0.grid, params, V, K, f)
    lam = 1.0
    seq = []
    for _ in range(max_power + 1):
        E = d.energy(lam * u0.values)
        seq.append((lam, E))
        if E < -1:
            return lam, u0 * lam, seq
        lam *= 2
    raise SolverError("no negative energy along the ray; check growth assumptions", seq)


def _newton(d: Discretization, U, tol, iters, deflate: Sequence[np.ndarray] = (), shift: float = 1.0):
    """Damped (optionally deflated) Newton iteration on the discrete gradient."""
    gn = d.grad_norm(U)
    for it in range(iters):
        if gn < tol:
            return U, gn, it, True
        r = d.residual(U)
        try:
            H = d.hessian(U)
            # Jacobi scaling: with growing V the raw diagonal spans many decades
            sc = 1.0 / np.sqrt(np.maximum(np.abs(np.diag(H)), 1e-300))
            step = -sc * linalg.solve(sc[:, None] * H * sc[None, :], sc * r, assume_a="sym")
        except (linalg.LinAlgError, ValueError):
            return U, gn, it, False
        if deflate:
            dot = 0.0
            for uk in deflate:
                e = U - uk
                n2 = d.norm2(e)
                dot += (-2 * float(e @ d.B @ step) / n2**2) / (1 / n2 + shift)
            step = step / (1 - dot) if abs(1 - dot) > 1e-12 else step
        t = 1.0
        while t > 1e-6:
            Un = U + t * step
            gnn = d.grad_norm(Un)
            if np.isfinite(gnn) and gnn < (1 - 1e-4 * t) * gn:
                break
            t *= 0.5
        else:
            if deflate:
                Un = U + step
                gnn = d.grad_norm(Un)
            else:
                return U, gn, it, False
        U, gn = Un, gnn
    return U, gn, iters, gn < tol


class _Path:
    """Polyline from 0 to e with cached B-products for cheap segment energies."""

    def __init__(self, d: Discretization, nodes: List[np.ndarray]):
        self.d = d
        self.nodes = [np.array(n) for n in nodes]
        self.Bn = [d.B @ n for n in self.nodes]
        self.seg = [self._seg_max(i) for i in range(len(self.nodes) - 1)]

    def _seg_energy(self, i, t):
        a, b = self.nodes[i], self.nodes[i + 1]
        qa, qab, qb = a @ self.Bn[i], a @ self.Bn[i + 1], b @ self.Bn[i + 1]
        quad = 0.5 * ((1 - t) ** 2 * qa + 2 * t * (1 - t) * qab + t * t * qb)
        return quad - float(np.dot(self.d.mK, self.d.f.F((1 - t) * a + t * b)))

    def _seg_max(self, i):
        ts = np.linspace(0, 1, 9)
        es = [self._seg_energy(i, t) for t in ts]
        j = int(np.argmax(es))
        best = (es[j], ts[j])
        if 0 < j < 8:
            res = optimize.minimize_scalar(lambda t: -self._seg_energy(i, t), bounds=(ts[j - 1], ts[j + 1]),
                                           method="bounded", options={"xatol": 1e-10})
            if -res.fun > best[0]:
                best = (-res.fun, float(res.x))
        return best

    @property
    def max(self):
        return max(v for v, _ in self.seg)

    def argmax(self):
        i = int(np.argmax([v for v, _ in self.seg]))
        return i, self.seg[i][1]

    def node_energy(self, k):
        return self.d.energy(self.nodes[k])

    def insert(self, i, t):
        U = (1 - t) * self.nodes[i] + t * self.nodes[i + 1]
        self.nodes.insert(i + 1, U)
        self.Bn.insert(i + 1, self.d.B @ U)
        self.seg[i : i + 1] = [self._seg_max(i), self._seg_max(i + 1)]
        return i + 1

    def trial(self, k, U):
        """Maxima of the two segments around node k if it moved to U."""
        old = self.nodes[k], self.Bn[k]
        self.nodes[k], self.Bn[k] = U, self.d.B @ U
        vals = (self._seg_max(k - 1), self._seg_max(k))
        new = self.nodes[k], self.Bn[k]
        self.nodes[k], self.Bn[k] = old
        return vals, new

    def commit(self, k, new, vals):
        self.nodes[k], self.Bn[k] = new
        self.seg[k - 1], self.seg[k] = vals

    def resampled(self, P):
        d = self.d
        seg = np.array([d.norm(b - a) for a, b in zip(self.nodes[:-1], self.nodes[1:])])
        s = np.concatenate([[0.0], np.cumsum(seg)])
        out = []
        for t in np.linspace(0, s[-1], P):
            j = min(int(np.searchsorted(s, t, side="right")) - 1, len(seg) - 1)
            w = 0.0 if seg[j] == 0 else (t - s[j]) / seg[j]
            out.append((1 - w) * self.nodes[j] + w * self.nodes[j + 1])
        out[0], out[-1] = self.nodes[0], self.nodes[-1]
        return _Path(d, out)


def _finish(d: Discretization, U, params, history, iterations, nonneg) -> Solution:
    from .fraclap import SPECTRAL, FracLapOperator, pde_residual

    u = d.func(U)
    op = FracLapOperator(d.grid, params, SPECTRAL)
    res = pde_residual(u, d.V, d.K, d.f, params, op)
    return Solution(u, d.energy(U), d.grad_norm(U), res, d.nehari(U), history, bool(nonneg), d.norm(U), iterations)


def _admissibility_warning(V, K, f: Nonlinearity, params: SpaceParams):
    if not isinstance(V, PotentialFamily) or V is not K:
        return None
    try:
        rep = classify_potentials(V, params)
    except DomainError as exc:
        return f"cannot classify potentials: {exc}"
    iv = rep.q_single_interval
    if iv is None:
        return None
    lo, hi = float(iv[0]), float(iv[1])
    for q in {f.q1, f.q2}:
        if not lo < q < hi:
            return f"q={q:g} outside admissible range ({lo:g}, {hi:g})"
    return None


def mountain_pass(V, K, f: Nonlinearity, params: SpaceParams, config: SolverConfig = None,
                  grid: RadialGrid = None, u0: RadialFunction = None) -> Solution:
    """Mountain-pass critical point by descent of the path maximum, polished by Newton.

    The tracked quantity is the maximum of E over the piecewise-linear path
    (not just over its nodes), and a step is accepted only if it does not
    raise it, so the recorded history is nonincreasing.
    """
    cfg = config or SolverConfig()
    grid = grid or cfg.grid(params.N)
    msg = _admissibility_warning(V, K, f, params)
    if msg:
        warnings.warn(msg)
    fw = f.truncate() if cfg.nonneg else f
    d = discretization(grid, params, V, K, fw)
    u0 = u0 or default_start(grid, fw)
    lam, e, _ = find_endpoint(u0, V, K, fw, params)
    P = cfg.path_nodes
    path = _Path(d, [j / (P - 1) * e.values for j in range(P)])
    history = []
    tau = 1.0
    last_gain, best = 0, path.max
    it = 0
    for it in range(1, cfg.max_outer + 1):
        m = path.max
        history.append((it, float(m)))
        if m < best - 1e-14 * max(1.0, abs(best)):
            best, last_gain = m, it
        elif it - last_gain > cfg.patience:
            raise SolverError("path maximum stagnated", history, d.func(path.nodes[path.argmax()[0]]))
        i, t = path.argmax()
        if t < 1e-8:
            k = i
        elif t > 1 - 1e-8:
            k = i + 1
        else:
            k = path.insert(i, t)
        if k == 0 or k == len(path.nodes) - 1:
            raise SolverError("path maximum reached an endpoint; mountain-pass geometry lost", history)
        U = path.nodes[k]
        g = d.riesz(U)
        gn2 = float(g @ d.B @ g)
        if math.sqrt(gn2) < cfg.newton_switch:
            break
        E0 = d.energy(U)
        step = min(2 * tau, 1.0)
        while step > 1e-12:
            cand = U - step * g
            if d.energy(cand) <= E0 - 1e-4 * step * gn2:
                vals, new = path.trial(k, cand)
                if max(v for v, _ in vals) <= m:
                    path.commit(k, new, vals)
                    break
            step *= 0.5
        else:
            raise SolverError("no admissible descent step at the path maximum", history, d.func(U))
        tau = step
        if len(path.nodes) > 2 * P or it % 25 == 0:
            other = path.resampled(P)
            if other.max <= path.max:
                path = other
    k = path.argmax()[0]
    k = k if d.energy(path.nodes[k]) >= d.energy(path.nodes[k + 1]) else k + 1
    U, gn, nit, ok = _newton(d, path.nodes[k], cfg.tol, cfg.newton_iters)
    if not ok:
        raise SolverError(f"Newton finish stalled at gradient norm {gn:.3e}", history, d.func(U))
    if d.norm(U) < 1e-8:
        raise SolverError("collapsed to the trivial solution", history, d.func(U))
    if cfg.nonneg and U.min() < -1e-10:
        raise SolverError(f"negative part {U.min():.3e} in a nonnegative solve", history, d.func(U))
    sol = _finish(d, U, params, history, it + nit, cfg.nonneg)
    log.info("mountain pass: energy %.6g, |grad| %.2e after %d iterations", sol.energy, sol.grad_norm, it)
    return sol


# ---------------------------------------------------------------------------
# deflation


def nehari_project(d: Discretization, U) -> np.ndarray:
    """Scale U onto the Nehari manifold t^2 |U|^2 = int K f(tU) tU."""
    n2 = d.norm2(U)

    def g(logt):
        t = math.exp(logt)
        return float(np.dot(d.mK, d.f.f(t * U) * U)) / t - n2

    lo, hi = -20.0, 20.0
    if g(lo) > 0 or g(hi) < 0:
        return U
    return math.exp(optimize.brentq(g, lo, hi, xtol=1e-12)) * U


def _candidates(grid: RadialGrid, n: int, rng: np.random.Generator):
    r = grid.nodes
    out = []
    for i in range(n):
        nodes = 1 + i % 3
        w = math.exp(rng.uniform(math.log(0.5), math.log(3.0)))
        shape = np.exp(-((r / w) ** 2))
        roots = np.sort(rng.uniform(0.3, 1.5, nodes)) * w
        for z in roots:
            shape = shape * (z - r) / w
        out.append(shape)
    return out


def deflate_and_continue(found: Sequence[Solution], V, K, f: Nonlinearity, params: SpaceParams,
                         config: SolverConfig = None) -> Solution:
    """A critical point distinct from +-u_k for all prior u_k, via deflated Newton."""
    cfg = config or SolverConfig()
    if not found:
        raise DomainError("need at least one prior solution")
    if not f.is_odd():
        raise DomainError("deflation requires an odd nonlinearity")
    grid = found[0].u.grid
    d = discretization(grid, params, V, K, f)
    known = [np.zeros(grid.M)]
    for s in found:
        known += [s.u.values, -s.u.values]
    rng = np.random.default_rng(cfg.seed + len(found))
    best = None
    for c in _candidates(grid, cfg.starts, rng):
        U0 = nehari_project(d, c)
        U, gn, nit, ok = _newton(d, U0, cfg.tol, cfg.newton_iters, deflate=known)
        if not np.all(np.isfinite(U)):
            continue
        sep = min(d.norm(U - k) for k in known)
        if ok and sep > cfg.separation:
            sol = _finish(d, U, params, None, nit, False)
            log.info("deflation: energy %.6g, separation %.3g", sol.energy, sep)
            return sol
        if best is None or gn < best[1]:
            best = (U, gn)
    raise SolverError("deflation budget exhausted", best=None if best is None else d.func(best[0]))


def solve_many(count: int, V, K, f: Nonlinearity, params: SpaceParams, config: SolverConfig = None) -> List[Solution]:
    """Mountain-pass solution followed by deflated searches, sorted by energy."""
    cfg = config or SolverConfig()
    if count > 1 and not f.is_odd():
        raise DomainError("multiple solutions need an odd nonlinearity")
    first_cfg = SolverConfig(**{**asdict(cfg), "nonneg": False}) if count > 1 else cfg
    sols = [mountain_pass(V, K, f, params, first_cfg)]
    while len(sols) < count:
        sols.append(deflate_and_continue(sols, V, K, f, params, cfg))
    return sorted(sols, key=lambda s: s.energy)


# ---------------------------------------------------------------------------
# config files


def load_config(path):
    """Read a TOML solver configuration into (SolverConfig, nonlinearity, potentials, extra)."""
    try:
        import tomllib
    except ModuleNotFoundError:  # pragma: no cover
        import tomli as tomllib
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    return parse_config(raw)


def parse_config(raw: dict):
    grid = raw.get("grid", {})
    solver = raw.get("solver", {})
    path = raw.get("path", {})
    defl = raw.get("deflation", {})
    known = {"grid", "solver", "path", "deflation", "nonlinearity", "potentials", "params"}
    unknown = set(raw) - known
    if unknown:
        raise DomainError(f"unknown config sections: {sorted(unknown)}")
    cfg = SolverConfig(
        M=int(grid.get("M", 512)),
        r_min=float(grid.get("r_min", 1e-3)),
        r_max=float(grid.get("r_max", 50.0)),
        tol=float(solver.get("tol", 1e-8)),
        max_outer=int(solver.get("max_outer", 3000)),
        newton_iters=int(solver.get("newton_iters", 60)),
        patience=int(solver.get("patience", 300)),
        nonneg=bool(solver.get("nonneg", True)),
        seed=int(solver.get("seed", 0)),
        path_nodes=int(path.get("nodes", 32)),
        separation=float(defl.get("separation", 0.1)),
        starts=int(defl.get("starts", 40)),
    )
    nl = raw.get("nonlinearity", {})
    f = None
    if nl:
        f = Nonlinearity(nl.get("kind", "pure"), nl["q1"], nl.get("q2"), nl.get("mu"))
    pot = raw.get("potentials", {})
    fam = None
    if pot:
        fam = PotentialFamily(pot["kind"], dict(pot.get("params", {})))
    return cfg, f, fam, raw.get("params", {})
