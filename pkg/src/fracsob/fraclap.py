"""Discrete fractional Laplacian for radial functions."""
from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline

from .exponents import DomainError, SpaceParams
from .spaces import (
    ZERO,
    Extrapolation,
    RadialFunction,
    RadialGrid,
    _pot_values,
    gagliardo_matrix,
    sphere_area,
)

SPECTRAL = "spectral"
DIRECT = "direct"
MODES = (SPECTRAL, DIRECT)


class GridMismatch(ValueError):
    pass


def radial_kernel(z, N: int):
    """z^(1-N/2) J_{N/2-1}(z); the radial Fourier transform of R^N has this kernel."""
    z = np.asarray(z, float)
    if N == 3:
        return math.sqrt(2 / math.pi) * np.sinc(z / math.pi)
    if N == 2:
        return special.j0(z)
    nu = N / 2 - 1
    out = np.empty_like(z)
    small = z < 1e-6
    out[small] = 1 / (2**nu * math.gamma(nu + 1))
    zz = z[~small]
    out[~small] = zz ** (-nu) * special.jv(nu, zz)
    return out


def _fine_samples(grid: RadialGrid, k_max: float, refine: int):
    """Radii and weights for the forward transform.

    Log spacing h/refine near the origin, then uniform spacing pi/(4 k_max)
    once that is finer, so Phi(k r) is resolved for every k <= k_max.
    """
    N = grid.N
    dr = math.pi / (4 * k_max)
    hf = grid.h / refine
    rc = min(dr / hf, grid.r_max)
    xl = np.arange(grid.x[0], math.log(rc) + 0.5 * hf, hf)
    rl = np.exp(xl)
    wl = hf * rl**N
    wl[0] = 0.5 * wl[0] + grid.r_min**N / N
    if rc >= grid.r_max:
        wl[-1] *= 0.5
        return rl, wl
    ru = np.arange(rl[-1] + dr, grid.r_max + 0.5 * dr, dr)
    wl[-1] = 0.5 * wl[-1] + 0.5 * dr * rl[-1] ** (N - 1)
    wu = dr * ru ** (N - 1)
    wu[-1] *= 0.5
    return np.concatenate([rl, ru]), np.concatenate([wl, wu])


_TRANSFORMS = {}


def hankel_pair(grid: RadialGrid, k_max: float = 100.0, refine: int = 8, chunk: int = 500):
    """(k, forward, backward) with hat U = forward @ U and U = backward @ hat U.

    Forward integrates the cubic-spline interpolant (in log r) of the grid
    values against Phi(k r) r^{N-1}; backward is the trapezoid rule on the
    uniform k grid with spacing 1/r_max.
    """
    key = (grid.key, float(k_max), refine)
    if key in _TRANSFORMS:
        return _TRANSFORMS[key]
    N = grid.N
    rf, wf = _fine_samples(grid, k_max, refine)
    P = CubicSpline(grid.x, np.eye(grid.M), axis=0)(np.log(rf)) * wf[:, None]
    dk = 1.0 / grid.r_max
    k = np.arange(1, int(round(k_max / dk)) + 1) * dk
    wk = np.full(k.size, dk)
    wk[-1] *= 0.5
    fwd = np.empty((k.size, grid.M))
    for c in range(0, k.size, chunk):
        fwd[c : c + chunk] = radial_kernel(np.outer(k[c : c + chunk], rf), N) @ P
    bwd = radial_kernel(np.outer(grid.nodes, k), N) * (wk * k ** (N - 1))
    if len(_TRANSFORMS) > 4:
        _TRANSFORMS.clear()
    _TRANSFORMS[key] = (k, fwd, bwd)
    return k, fwd, bwd


def spectral_matrix(grid: RadialGrid, s: float, k_max: float = 100.0) -> tuple:
    """(k, multiplier, matrix) of |k|^{2s} acting on grid values."""
    k, fwd, bwd = hankel_pair(grid, k_max)
    mult = k ** (2 * s)
    return k, mult, bwd @ (mult[:, None] * fwd)


_SPECTRAL = {}


class FracLapOperator:
    """(-Delta)^s on radial functions, in spectral or direct-integral form.

    The direct form is D^{-1} A where A is the Gagliardo quadratic form and
    D the diagonal of quadrature weights, so <op u, v> = U^T A V exactly in
    the discrete L^2 product.
    """

    def __init__(self, grid: RadialGrid, params: SpaceParams, mode: str = DIRECT,
                 extrapolation: Extrapolation = ZERO, k_max: float = 100.0):
        if mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}")
        if grid.N != params.N:
            raise GridMismatch(f"grid dimension {grid.N} does not match N={params.N}")
        self.grid = grid
        self.params = params
        self.s = float(params.s)
        self.mode = mode
        self.extrapolation = extrapolation
        self.mass = grid.full_weights
        if mode == DIRECT:
            self.matrix = gagliardo_matrix(grid, params, extrapolation)
            self.action = self.matrix / self.mass[:, None]
        else:
            key = (grid.key, self.s, k_max)
            if key not in _SPECTRAL:
                _SPECTRAL[key] = spectral_matrix(grid, self.s, k_max)
            self.k, self.multiplier, self.action = _SPECTRAL[key]
            # not symmetric: forward and backward transforms use different samples
            self.matrix = self.mass[:, None] * self.action

    def _check(self, u: RadialFunction):
        if u.grid != self.grid:
            raise GridMismatch("function lives on a different grid")

    def apply(self, u: RadialFunction) -> RadialFunction:
        self._check(u)
        return u.with_values(self.action @ u.values)

    __call__ = apply

    def inner(self, u: RadialFunction, v: RadialFunction) -> float:
        """Discrete L^2(R^N) product."""
        return float(np.dot(self.mass, u.values * v.values))

    def symmetry_error(self) -> float:
        A = self.matrix
        return float(np.max(np.abs(A - A.T)) / np.max(np.abs(A)))

    def export(self, path) -> None:
        """Dense binary dump: uint32 M, float32 s, then M*M row-major float64 entries."""
        M = self.grid.M
        with open(Path(path), "wb") as fh:
            fh.write(struct.pack("<If", M, self.s))
            fh.write(np.ascontiguousarray(self.action, dtype="<f8").tobytes())

    @staticmethod
    def load_matrix(path):
        raw = Path(path).read_bytes()
        M, s = struct.unpack("<If", raw[:8])
        mat = np.frombuffer(raw[8:], dtype="<f8")
        if mat.size != M * M:
            raise ValueError(f"expected {M * M} entries, found {mat.size}")
        return mat.reshape(M, M), s


def apply(op: FracLapOperator, u: RadialFunction) -> RadialFunction:
    return op.apply(u)


def pde_residual(u: RadialFunction, V, K, f, params: SpaceParams, op: FracLapOperator = None) -> float:
    """Weighted L^2 norm of (-Delta)^s u + V u - K f(u)."""
    if op is None:
        op = FracLapOperator(u.grid, params, DIRECT, u.extrapolation)
    lu = op.apply(u).values
    Vv = _pot_values(V, u.grid, "V")
    Kv = _pot_values(K, u.grid, "K")
    r = lu + Vv * u.values - Kv * f.f(u.values)
    return math.sqrt(float(np.dot(op.mass, r * r)))
