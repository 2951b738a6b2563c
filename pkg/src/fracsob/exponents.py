"""Closed-form exponent calculus for weighted radial embeddings.

Every function here is pure arithmetic and works equally with ``float`` and
``fractions.Fraction`` inputs, so exact rational answers are available when
N, s and the weight exponents are rational.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence, Tuple, Union

import numpy as np

Number = Union[float, Fraction]
Interval = Optional[Tuple[Number, Number]]

INF = math.inf


class DomainError(ValueError):
    """Raised when an argument lies outside the admissible region."""


@dataclass(frozen=True)
class SpaceParams:
    N: int
    s: Number

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise DomainError(f"dimension N must be an integer >= 2, got {self.N}")
        if not (0.5 < self.s < 1):
            raise DomainError(f"fractional order s must lie in (1/2, 1), got {self.s}")

    @property
    def two_star(self) -> Number:
        return 2 * self.N / (self.N - 2 * self.s)

    @property
    def theta(self) -> Number:
        return (self.N - 2 * self.s) / (2 * self.s * self.N - 2 * self.s)

    @property
    def strauss_rate(self) -> Number:
        """Decay exponent (N - 2s)/2 of radial functions."""
        return (self.N - 2 * self.s) / 2

    @cached_property
    def norm_C(self) -> float:
        from .spaces import norm_constant_C

        return norm_constant_C(self)

    @cached_property
    def sobolev_S(self) -> float:
        from .spaces import sobolev_constant_S

        return sobolev_constant_S(self)

    def as_float(self) -> "SpaceParams":
        return SpaceParams(int(self.N), float(self.s))


@dataclass(frozen=True)
class WeightExponents:
    alpha0: Number
    beta0: Number
    alpha_inf: Number
    beta_inf: Number
    R1: float = 1.0
    R2: float = 1.0

    def __post_init__(self):
        for name in ("beta0", "beta_inf"):
            b = getattr(self, name)
            if not (0 <= b <= 1):
                raise DomainError(f"{name} must lie in [0, 1], got {b}")
        if self.R1 <= 0 or self.R2 <= 0:
            raise DomainError("R1 and R2 must be positive")


@dataclass
class EmbeddingReport:
    q1_interval: Interval
    q2_lower: Number
    single_space: bool
    q_single_interval: Interval
    weights: WeightExponents
    q1_choice: Optional[Number] = None
    q2_choice: Optional[Number] = None
    delta0: Optional[float] = None
    delta_inf: Optional[float] = None
    family: Optional[str] = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        def num(x):
            if x is None:
                return None
            x = float(x)
            return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")

        def iv(i):
            return None if i is None else [num(i[0]), num(i[1])]

        w = self.weights
        return {
            "family": self.family,
            "weights": {
                "alpha0": num(w.alpha0),
                "beta0": num(w.beta0),
                "alpha_inf": num(w.alpha_inf),
                "beta_inf": num(w.beta_inf),
            },
            "q1_interval": iv(self.q1_interval),
            "q2_lower": num(self.q2_lower),
            "single_space": self.single_space,
            "q_single_interval": iv(self.q_single_interval),
            "q1_choice": num(self.q1_choice),
            "q2_choice": num(self.q2_choice),
            "delta0": num(self.delta0),
            "delta_inf": num(self.delta_inf),
            "notes": list(self.notes),
        }


def _check_beta(beta):
    if not (0 <= beta <= 1):
        raise DomainError(f"beta must lie in [0, 1], got {beta}")


def alpha_star(beta: Number, params: SpaceParams) -> Number:
    """Threshold weight exponent below which no q1 is admissible near 0."""
    _check_beta(beta)
    N, s = params.N, params.s
    if 2 * beta <= 1:
        return -Fraction(N, 2) - (1 - 2 * beta) * s
    return -(1 - beta) * N


def q_star(alpha: Number, beta: Number, params: SpaceParams) -> Number:
    N, s = params.N, params.s
    return 2 * (alpha - 2 * s * beta + N) / (N - 2 * s)


def _delta_factor(beta: Number, params: SpaceParams) -> Number:
    N, s = params.N, params.s
    if 2 * beta <= 1:
        return (N - 2 * s) / (N + 2 * s * (1 - 2 * beta))
    if beta < 1:
        return (N - 2 * s) / (2 * (1 - beta))
    return (N - 2 * s) / 2


def delta_zero(q1: Number, we: WeightExponents, params: SpaceParams) -> Number:
    """Positive rate exponent attached to the small-ball supremum."""
    lo = max(1, 2 * we.beta0)
    qs = q_star(we.alpha0, we.beta0, params)
    if not (lo < q1 < qs):
        raise DomainError(f"q1={q1} outside the admissible interval ({lo}, {qs})")
    return _delta_factor(we.beta0, params) * (qs - q1)


def delta_inf(q2: Number, we: WeightExponents, params: SpaceParams) -> Number:
    """Negative rate exponent attached to the exterior supremum.

    For ``beta_inf <= 1/2`` the prefactor carries an extra factor N relative
    to :func:`delta_zero`.
    """
    qs = q_star(we.alpha_inf, we.beta_inf, params)
    lo = max(1, 2 * we.beta_inf, qs)
    if not q2 > lo:
        raise DomainError(f"q2={q2} must exceed {lo}")
    factor = _delta_factor(we.beta_inf, params)
    if 2 * we.beta_inf <= 1:
        factor = params.N * factor
    return factor * (qs - q2)


def bound_rate(q: Number, alpha: Number, beta: Number, params: SpaceParams) -> Number:
    """Exponent e with sup-bound C R^e after the outer Hölder power is applied.

    Equal to (N - 2s)(q* - q)/2 in every beta-case.
    """
    return (params.N - 2 * params.s) * (q_star(alpha, beta, params) - q) / 2


def _intersect(a: Interval, lo: Number) -> Interval:
    if a is None:
        return None
    left = max(a[0], lo)
    if left < a[1]:
        return (left, a[1])
    return None


def admissible_ranges(we: WeightExponents, params: SpaceParams) -> EmbeddingReport:
    q1_lo = max(1, 2 * we.beta0)
    q1_hi = q_star(we.alpha0, we.beta0, params)
    q1_interval = (q1_lo, q1_hi) if q1_lo < q1_hi else None
    q2_lower = max(1, 2 * we.beta_inf, q_star(we.alpha_inf, we.beta_inf, params))
    single = _intersect(q1_interval, q2_lower)
    return _finish(EmbeddingReport(q1_interval, q2_lower, single is not None, single, we), params)


def _finish(rep: EmbeddingReport, params: SpaceParams) -> EmbeddingReport:
    """Attach representative exponents and their rate constants."""
    we = rep.weights
    if rep.q1_interval is not None and math.isfinite(float(rep.q1_interval[1])):
        lo, hi = rep.q1_interval
        rep.q1_choice = (lo + hi) / 2
        rep.delta0 = float(delta_zero(rep.q1_choice, we, params))
    if math.isfinite(float(rep.q2_lower)):
        rep.q2_choice = rep.q2_lower + 1
        if math.isfinite(float(q_star(we.alpha_inf, we.beta_inf, params))):
            rep.delta_inf = float(delta_inf(rep.q2_choice, we, params))
    return rep


# ---------------------------------------------------------------------------
# potential families


@dataclass(frozen=True)
class PotentialFamily:
    """Radial potentials V and K.

    kind is one of ``power``, ``exponential``, ``mixed``, ``zero_v``, ``tabulated``.
    ``params`` holds the named reals of the family:

    - power: a, b            V = r^a, K = r^b
    - exponential: cV, cK    V = exp(cV r), K = exp(cK r)
    - mixed: a, b, d         V = exp(-a r), K = r^d exp(-b r)
    - zero_v: alpha0, alpha_inf and optionally b (K = r^b, default 0)
    - tabulated: r, V, K arrays (log-log interpolation)
    """

    kind: str
    params: dict

    KINDS = ("power", "exponential", "mixed", "zero_v", "tabulated")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise DomainError(f"unknown potential family {self.kind!r}")
        p = self.params
        if self.kind == "mixed" and not (p["a"] > 0 and p["b"] > 0):
            raise DomainError("mixed family needs a > 0 and b > 0")
        if self.kind == "tabulated":
            V = np.asarray(p["V"], float)
            K = np.asarray(p["K"], float)
            if np.any(V < 0):
                raise DomainError("tabulated V must be nonnegative")
            if np.any(K <= 0):
                raise DomainError("tabulated K must be positive")

    @classmethod
    def power(cls, a, b):
        return cls("power", {"a": a, "b": b})

    @classmethod
    def exponential(cls, cV=2.0, cK=1.0):
        return cls("exponential", {"cV": cV, "cK": cK})

    @classmethod
    def mixed(cls, a, b, d):
        return cls("mixed", {"a": a, "b": b, "d": d})

    @classmethod
    def zero_v(cls, alpha0, alpha_inf, b=0.0):
        return cls("zero_v", {"alpha0": alpha0, "alpha_inf": alpha_inf, "b": b})

    @classmethod
    def tabulated(cls, r: Sequence[float], V: Sequence[float], K: Sequence[float]):
        return cls("tabulated", {"r": list(map(float, r)), "V": list(map(float, V)), "K": list(map(float, K))})

    def V(self, r):
        r = np.asarray(r, float)
        p = self.params
        if self.kind == "power":
            return r ** float(p["a"])
        if self.kind == "exponential":
            return np.exp(float(p["cV"]) * r)
        if self.kind == "mixed":
            return np.exp(-float(p["a"]) * r)
        if self.kind == "zero_v":
            return np.zeros_like(r)
        return self._interp(r, p["V"])

    def K(self, r):
        r = np.asarray(r, float)
        p = self.params
        if self.kind == "power":
            return r ** float(p["b"])
        if self.kind == "exponential":
            return np.exp(float(p["cK"]) * r)
        if self.kind == "mixed":
            return r ** float(p["d"]) * np.exp(-float(p["b"]) * r)
        if self.kind == "zero_v":
            return r ** float(p.get("b", 0.0))
        return self._interp(r, p["K"])

    def _interp(self, r, values):
        rt = np.asarray(self.params["r"], float)
        v = np.asarray(values, float)
        if np.all(v > 0):
            return np.exp(np.interp(np.log(r), np.log(rt), np.log(v)))
        return np.interp(np.log(r), np.log(rt), v)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": {k: (float(v) if np.isscalar(v) else list(v)) for k, v in self.params.items()}}


def _exponential_weights(cV, cK, params: SpaceParams):
    """Envelope exponents for V = e^{cV r}, K = e^{cK r}.

    Near 0 the ratio is bounded iff alpha0 <= 0; beta0 = 0 maximizes q*.
    At infinity the candidates beta in {0, 1/2, 1, cK/cV} are scored by the
    resulting threshold max{1, 2 beta, q*}.
    """
    best = None
    cands = {Fraction(0), Fraction(1, 2), Fraction(1)}
    if cV != 0:
        bc = Fraction(cK) / Fraction(cV) if isinstance(cK, (int, Fraction)) and isinstance(cV, (int, Fraction)) else cK / cV
        if 0 <= bc <= 1:
            cands.add(bc)
    for beta in sorted(cands):
        e = cK - beta * cV
        if e > 0:
            continue
        if e < 0:
            alpha = min(0, alpha_star(beta, params))
        else:
            alpha = 0
        thr = max(1, 2 * beta, q_star(alpha, beta, params))
        key = (thr, -beta)
        if best is None or key < best[0]:
            best = (key, alpha, beta)
    if best is None:
        return None
    return best[1], best[2]


def classify_potentials(family: PotentialFamily, params: SpaceParams) -> EmbeddingReport:
    """Pick the weight exponents that give the widest ranges for a family."""
    N, s = params.N, params.s
    p = family.params
    notes = []
    if family.kind == "power":
        a, b = p["a"], p["b"]
        if not b > -Fraction(N, 2) - s:
            raise DomainError(f"power family needs b > -N/2 - s, got b={b}")
        we = WeightExponents(b, 0, b - a, 1)
    elif family.kind == "zero_v":
        we = WeightExponents(p["alpha0"], 0, p["alpha_inf"], 0)
    elif family.kind == "exponential":
        cV, cK = p["cV"], p["cK"]
        inf_choice = _exponential_weights(cV, cK, params)
        if inf_choice is None:
            notes.append("K grows faster than any admissible power of V at infinity")
            we = WeightExponents(0, 0, 0, 0)
            rep = admissible_ranges(we, params)
            rep.q2_lower = INF
            rep.single_space, rep.q_single_interval = False, None
            rep.delta_inf, rep.q2_choice = None, None
            rep.family, rep.notes = family.kind, notes
            return rep
        we = WeightExponents(0, 0, inf_choice[0], inf_choice[1])
    elif family.kind == "mixed":
        # alpha0 may be taken arbitrarily large: q1 ranges over (1, inf)
        we = WeightExponents(INF, 0, -N, 0)
        q2_lower = max(1, 0, q_star(-N, 0, params))
        rep = EmbeddingReport((1, INF), q2_lower, True, _intersect((1, INF), q2_lower), we)
        notes.append("alpha0 unbounded: q1 interval open to infinity")
        rep = _finish(rep, params)
        rep.family, rep.notes = family.kind, notes
        return rep
    else:
        we = _tabulated_weights(family, params)
        notes.append("envelope exponents fitted from end slopes of the table")
    rep = admissible_ranges(we, params)
    rep.family = family.kind
    rep.notes = notes
    return rep


def _tabulated_weights(family: PotentialFamily, params: SpaceParams, n_end: int = 4) -> WeightExponents:
    r = np.asarray(family.params["r"], float)
    V = np.asarray(family.params["V"], float)
    K = np.asarray(family.params["K"], float)
    lr = np.log(r)

    def slope(y, sl):
        return float(np.polyfit(lr[sl], np.log(y[sl]), 1)[0])

    head, tail = slice(0, n_end), slice(-n_end, None)
    b0, binf = slope(K, head), slope(K, tail)
    if np.all(V[tail] > 0):
        a_inf = slope(V, tail)
        we_inf = (binf - a_inf, 1)
    else:
        we_inf = (binf, 0)
    return WeightExponents(b0, 0, we_inf[0], we_inf[1])


# ---------------------------------------------------------------------------
# worked examples


def example_report(k: int, params: SpaceParams, a=0, b=0, d=0, alpha0=0, alpha_inf=0) -> dict:
    """Ranges of the four worked examples, next to their closed-form endpoints."""
    N, s = params.N, params.s
    if k == 1:
        rep = classify_potentials(PotentialFamily.power(a, b), params)
        closed_form = {
            "q1_upper": 2 * (1 + (b + 2 * s) / (N - 2 * s)),
            "q2_lower": max(1, 2 * (1 + (b - a) / (N - 2 * s))),
            "single_space": a > -2 * s,
        }
    elif k == 2:
        rep = classify_potentials(PotentialFamily.zero_v(alpha0, alpha_inf), params)
        closed_form = {
            "q1_upper": 2 * (N + alpha0) / (N - 2 * s),
            "q2_lower": max(1, 2 * (N + alpha_inf) / (N - 2 * s)),
            "single_space": alpha_inf < alpha0,
        }
    elif k == 3:
        rep = classify_potentials(PotentialFamily.exponential(2, 1), params)
        closed_form = {"single_interval": (2, params.two_star)}
    elif k == 4:
        rep = classify_potentials(PotentialFamily.mixed(a if a else 1, b if b else 1, d), params)
        closed_form = {"single_interval": (1, INF), "statement": "compact for every q > 1"}
    else:
        raise DomainError(f"no worked example {k}")
    return {"example": k, "report": rep, "closed_form": closed_form}
