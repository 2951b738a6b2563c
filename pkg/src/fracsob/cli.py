"""Command line: exponent queries, verification campaigns, solver runs and sweeps.

Exit codes: 0 success, 1 computation failure, 2 usage or configuration error.
Every run writes a manifest plus JSON reports and CSV series into ``--out``.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import sys
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .exponents import (
    DomainError,
    PotentialFamily,
    SpaceParams,
    classify_potentials,
    delta_inf,
    delta_zero,
    example_report,
)
from .spaces import NumericError, RadialGrid, random_bumps

log = logging.getLogger("fracsob")

SCHEMA_VERSION = "1"
CAMPAIGNS = ("strauss", "s0-decay", "sinf-decay", "lemma41", "annulus")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# serialization


def jsonable(x):
    """Plain JSON types; non-finite floats become strings."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating, Fraction)):
        x = float(x)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, Path):
        return str(x)
    return x


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def exact(x) -> str:
    """Exact rational rendering where possible ("10/3", "inf")."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    x = float(x)
    return ("inf" if x > 0 else "-inf") if math.isinf(x) else repr(x)


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


@dataclass
class RunManifest:
    command: str
    config: Optional[str]
    out: str
    seed: int
    options: dict = field(default_factory=dict)
    version: str = __version__

    def to_dict(self):
        return jsonable(asdict(self))

    def digest(self) -> str:
        return hashlib.sha256(dumps(self.to_dict()).encode()).hexdigest()


class Output:
    """Writes files under the run directory and remembers what was written."""

    def __init__(self, manifest: RunManifest):
        self.manifest = manifest
        self.dir = Path(manifest.out)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files = []
        self.write_json("manifest.json", dict(manifest.to_dict(), schema=f"fracsob/manifest/v{SCHEMA_VERSION}"))

    def path(self, name) -> Path:
        self.files.append(name)
        return self.dir / name

    def write_json(self, name, obj):
        self.path(name).write_text(dumps(obj))

    def header(self, kind: str) -> dict:
        return {"schema": f"fracsob/{kind}/v{SCHEMA_VERSION}", "manifest": self.manifest.to_dict(),
                "manifest_sha256": self.manifest.digest()}


# ---------------------------------------------------------------------------
# argument handling


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _float_list(text: str):
    try:
        vals = [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated list of numbers: {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _common(p: argparse.ArgumentParser):
    p.add_argument("--N", type=int, default=None, help="dimension (default 3)")
    p.add_argument("--s", type=_fraction, default=None, help="fractional order in (0, 1) (default 0.75)")
    p.add_argument("--family", choices=("power", "exponential", "mixed", "zero_v"), default=None)
    p.add_argument("--a", type=_fraction, default=None, help="first family parameter")
    p.add_argument("--b", type=_fraction, default=None, help="second family parameter")
    p.add_argument("--d", type=_fraction, default=None, help="third family parameter (mixed)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="cap on worker threads")
    p.add_argument("--strict", action="store_true", help="treat warnings as failures")
    p.add_argument("--out", default="fracsob-run", help="output directory")
    p.add_argument("--config", default=None, help="TOML configuration file")
    p.add_argument("--plot", action="store_true", help="also render PNG figures (needs matplotlib)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracsob", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponents", help="embedding ranges for a potential family")
    _common(p)
    p.add_argument("--example", type=int, choices=(1, 2, 3, 4), default=None)
    p.add_argument("--alpha0", type=_fraction, default=Fraction(0))
    p.add_argument("--alpha-inf", type=_fraction, default=Fraction(0))

    p = sub.add_parser("verify", help="numerical checks of the supremum conditions and integral bounds")
    _common(p)
    p.add_argument("campaign", choices=CAMPAIGNS)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--R-grid", dest="R_grid", type=_float_list, default=None)
    p.add_argument("--M", type=int, default=512, help="grid size")
    p.add_argument("--count", type=int, default=10, help="number of test functions")

    p = sub.add_parser("solve", help="mountain-pass solutions, optionally several by deflation")
    _common(p)
    p.add_argument("--example", type=int, choices=(3,), default=None, help="worked scenario shorthand")
    p.add_argument("--nonlinearity", choices=("pure", "min", "rational"), default=None)
    p.add_argument("--q", type=float, default=None, help="exponent of the pure power")
    p.add_argument("--q1", type=float, default=None)
    p.add_argument("--q2", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--M", type=int, default=None, help="grid size")

    p = sub.add_parser("sweep", help="embedding ranges over a grid of (N, s)")
    _common(p)
    p.add_argument("--N-grid", dest="N_grid", default="2,3")
    p.add_argument("--s-grid", dest="s_grid", default="0.6,0.75,0.9")
    return parser


def _params(args, cfg_params=None) -> SpaceParams:
    cfg_params = cfg_params or {}
    N = args.N if args.N is not None else int(cfg_params.get("N", 3))
    s = args.s if args.s is not None else Fraction(str(cfg_params.get("s", "0.75")))
    return SpaceParams(N, s)


def _family(args, default: str) -> PotentialFamily:
    kind = args.family or default
    a, b, d = args.a, args.b, args.d
    if kind == "power":
        return PotentialFamily.power(a or 0, b or 0)
    if kind == "exponential":
        return PotentialFamily.exponential(float(a if a is not None else 2), float(b if b is not None else 1))
    if kind == "mixed":
        return PotentialFamily.mixed(a if a is not None else 1, b if b is not None else 1, d or 0)
    return PotentialFamily.zero_v(getattr(args, "alpha0", 0), getattr(args, "alpha_inf", 0), b or 0)


def _manifest(args) -> RunManifest:
    opts = {k: v for k, v in vars(args).items() if k not in ("out", "config", "seed", "command", "verbose", "func")}
    opts = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in opts.items()}
    return RunManifest(args.command, args.config, str(args.out), int(args.seed), opts)


def _plot(out: Output, name: str, draw):
    """Render one figure through ``draw(ax)``; matplotlib is imported only here."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        warnings.warn("--plot needs matplotlib; figure skipped")
        return
    fig, ax = plt.subplots(figsize=(5, 3.6))
    draw(ax)
    fig.tight_layout()
    fig.savefig(out.path(name), dpi=120)
    plt.close(fig)


def _finish(out: Output, kind: str, body: dict, caught, strict: bool) -> int:
    msgs = sorted({str(w.message) for w in caught} | set(body.pop("warnings", [])))
    for m in msgs:
        print(f"warning: {m}", file=sys.stderr)
    doc = dict(out.header(kind), warnings=msgs, **body)
    out.write_json("report.json", doc)
    print(dumps(doc), end="")
    return EXIT_FAIL if (strict and msgs) else EXIT_OK


# ---------------------------------------------------------------------------
# exponents


def cmd_exponents(args) -> int:
    params = _params(args)
    out = Output(_manifest(args))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if args.example is not None:
            res = example_report(args.example, params, a=args.a or 0, b=args.b or 0, d=args.d or 0,
                                 alpha0=args.alpha0, alpha_inf=args.alpha_inf)
            rep = res["report"]
            closed_form = res["closed_form"]
            body = {
                "example": args.example,
                "report": rep.to_dict(),
                "closed_form": closed_form,
                "closed_form_exact": {k: ([exact(t) for t in v] if isinstance(v, tuple) else
                                        exact(v) if isinstance(v, (Fraction, int, float)) and not isinstance(v, bool) else v)
                                    for k, v in closed_form.items()},
            }
        else:
            fam = _family(args, "power")
            rep = classify_potentials(fam, params)
            body = {"example": None, "report": rep.to_dict(), "family": fam.to_dict()}
        body["params"] = {"N": params.N, "s": str(params.s), "two_star": exact(params.two_star)}
        body["exact"] = {
            "q1_interval": [exact(t) for t in rep.q1_interval] if rep.q1_interval else None,
            "q2_lower": exact(rep.q2_lower),
            "q_single_interval": [exact(t) for t in rep.q_single_interval] if rep.q_single_interval else None,
        }
    return _finish(out, "exponents", body, caught, args.strict)


# ---------------------------------------------------------------------------
# verify


def _campaign_strauss(args, params, grid, out):
    from .verify import strauss_family

    fam = strauss_family(params, grid, V=_family(args, "power"))
    rows = [(k, r.c_emp, r.c_hsv, r.argmax_r) for k, r in fam]
    write_csv(out.path("series.csv"), ["center", "c_emp", "c_hsv", "argmax_r"], rows)
    c = np.array([r[1] for r in rows])
    body = {
        "records": [dict(center=k, c_emp=r.c_emp, c_hsv=r.c_hsv, argmax_r=r.argmax_r) for k, r in fam],
        "summary": {"max": float(c.max()), "min": float(c.min()), "spread": float(c.max() / c.min())},
    }
    if args.plot:
        _plot(out, "strauss.png", lambda ax: (ax.plot([r[0] for r in rows], c, "o-"),
                                             ax.set_xlabel("bump centre"), ax.set_ylabel("empirical constant")))
    return body


def _campaign_decay(args, params, grid, out, end):
    from .verify import decay_rate_fit, estimate_curve

    if end == "zero":
        fam = _family(args, "power")
        q = args.q or 3.0
        radii = args.R_grid or [0.1, 0.2, 0.4]
    else:
        fam = _family(args, "exponential")
        q = args.q or 2.5
        radii = args.R_grid or [2.0, 4.0, 8.0]
    rep = classify_potentials(fam, params)
    qf = Fraction(str(q))
    target = delta_zero(qf, rep.weights, params) if end == "zero" else delta_inf(qf, rep.weights, params)
    ests = estimate_curve(end, q, radii, fam, fam, params, grid, seed=args.seed)
    write_csv(out.path("series.csv"), ["R", "estimate"], [(e.R, e.value) for e in ests])
    msgs = [f"estimate at R={e.R:g} did not converge" for e in ests if not e.converged]
    slope = None
    try:
        slope = decay_rate_fit(ests, end)
    except DomainError as exc:
        msgs.append(f"no slope fit: {exc}")
    vals = [e.value for e in ests]
    order = np.argsort(radii)
    v = np.asarray(vals)[order]
    monotone = bool(np.all(np.diff(v) >= -1e-3 * np.abs(v[:-1]))) if end == "zero" else \
        bool(np.all(np.diff(v) <= 1e-3 * np.abs(v[:-1])))
    body = {"q": q, "family": fam.to_dict(), "estimates": [e.to_dict() for e in ests], "slope": slope,
            "monotone": monotone, "warnings": msgs}
    if end == "zero":
        body["delta0"] = target
        body["slope_ok"] = None if (slope is None or target is None) else bool(slope >= float(target) - 0.1)
    else:
        body["delta_inf"] = target
        body["slope_ok"] = None if slope is None else bool(slope < 0)
    if args.plot:
        _plot(out, f"{args.campaign}.png", lambda ax: (ax.loglog([e.R for e in ests], vals, "o-"),
                                                       ax.set_xlabel("R"), ax.set_ylabel("estimate")))
    return body


def _campaign_lemma41(args, params, grid, out):
    from .verify import lemma41_campaign

    q = args.q or 2.5
    reps = lemma41_campaign(params, grid, n_functions=args.count, q=q, seed=args.seed)
    recs = [r.to_dict() for r in reps]
    write_csv(out.path("series.csv"), ["scenario", "case", "function", "lhs", "rhs", "holds"],
              [(r.extra["scenario"], r.extra["case"], r.extra["function"], r.value, r.bound, int(r.holds)) for r in reps])
    failed = sum(not r.holds for r in reps)
    body = {"records": recs, "summary": {"total": len(reps), "passed": len(reps) - failed, "failed": failed}}
    if failed:
        body["warnings"] = [f"{failed} of {len(reps)} bounds failed"]
    return body


def _campaign_annulus(args, params, grid, out):
    from .verify import check_annulus_bound

    fam = _family(args, "power")
    q = args.q or 3.0
    r, R = (args.R_grid or [0.5, 4.0])[:2]
    rng = np.random.default_rng(args.seed)
    reps = [check_annulus_bound(u, r, R, q, fam, fam, params) for u in random_bumps(grid, args.count, rng, r, R)]
    write_csv(out.path("series.csv"), ["function", "empirical_constant"],
              [(j, rep.extra["empirical_constant"]) for j, rep in enumerate(reps)])
    c = [rep.extra["empirical_constant"] for rep in reps]
    return {"records": [rep.to_dict() for rep in reps], "summary": {"max_constant": max(c), "min_constant": min(c)}}


def cmd_verify(args) -> int:
    params = _params(args)
    grid = RadialGrid(N=params.N, M=args.M)
    out = Output(_manifest(args))
    run = {
        "strauss": _campaign_strauss,
        "s0-decay": lambda *a: _campaign_decay(*a, end="zero"),
        "sinf-decay": lambda *a: _campaign_decay(*a, end="infinity"),
        "lemma41": _campaign_lemma41,
        "annulus": _campaign_annulus,
    }[args.campaign]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        body = run(args, params, grid, out)
    body["campaign"] = args.campaign
    body["params"] = {"N": params.N, "s": str(params.s)}
    return _finish(out, "verify", body, caught, args.strict)


# ---------------------------------------------------------------------------
# solve


def _solve_setup(args):
    from .solve import Nonlinearity, SolverConfig, load_config

    cfg, f, fam, cfg_params = SolverConfig(), None, None, {}
    if args.config:
        try:
            cfg, f, fam, cfg_params = load_config(args.config)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot use config {args.config}: {exc}")
    if args.example == 3:
        fam = fam or PotentialFamily.exponential(2, 1)
        f = f or Nonlinearity.pure(3.0)
    params = _params(args, cfg_params)
    if args.family or fam is None:
        fam = _family(args, "exponential")
    if args.nonlinearity or args.q is not None or args.q1 is not None or f is None:
        kind = args.nonlinearity or ("pure" if args.q1 is None else "min")
        if kind == "pure":
            f = Nonlinearity.pure(args.q if args.q is not None else (args.q1 or 3.0), mu=args.mu)
        else:
            if args.q1 is None or args.q2 is None:
                raise UsageError(f"--nonlinearity {kind} needs --q1 and --q2")
            f = Nonlinearity(kind, args.q1, args.q2, args.mu)
    updates = {"seed": args.seed}
    if args.M:
        updates["M"] = args.M
    cfg = SolverConfig(**{**asdict(cfg), **updates})
    return params, fam, f, cfg


def cmd_solve(args) -> int:
    from .solve import SolverError, _admissibility_warning, mountain_pass, solve_many

    if args.count < 1:
        raise UsageError("--count must be positive")
    params, fam, f, cfg = _solve_setup(args)
    out = Output(_manifest(args))
    # surfaced before any work starts
    msg = _admissibility_warning(fam, fam, f, params)
    if msg:
        print(f"warning: {msg}", file=sys.stderr)
        sys.stderr.flush()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            if args.count == 1:
                sols = [mountain_pass(fam, fam, f, params, cfg)]
            else:
                sols = solve_many(args.count, fam, fam, f, params, cfg)
        except SolverError as exc:
            hist = [list(h) if isinstance(h, (list, tuple)) else h for h in (exc.history or [])]
            out.write_json("failure.json", dict(out.header("failure"), error=str(exc), history=hist))
            print(f"error: {exc}", file=sys.stderr)
            for h in hist[-20:]:
                print(f"  history: {h}", file=sys.stderr)
            return EXIT_FAIL
    for i, sol in enumerate(sols):
        sol.u.save(out.path(f"solution_{i}.csv"), params)
        out.files.append(f"solution_{i}.json")
    body = {
        "params": {"N": params.N, "s": str(params.s)},
        "family": fam.to_dict(),
        "nonlinearity": f.to_dict(),
        "config": asdict(cfg),
        "solutions": [dict(sol.to_dict(), index=i, file=f"solution_{i}.csv") for i, sol in enumerate(sols)],
    }
    if msg:
        body["warnings"] = [msg]
    if args.plot:
        def draw(ax):
            for i, sol in enumerate(sols):
                ax.semilogx(sol.u.grid.nodes, sol.u.values, label=f"E={sol.energy:.4g}")
            ax.set_xlabel("r")
            ax.set_ylabel("u")
            ax.legend()
        _plot(out, "solutions.png", draw)
    return _finish(out, "solve", body, caught, args.strict)


# ---------------------------------------------------------------------------
# sweep


def cmd_sweep(args) -> int:
    try:
        Ns = [int(t) for t in args.N_grid.split(",")]
        ss = [Fraction(t.strip()) for t in args.s_grid.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad grid: {exc}")
    out = Output(_manifest(args))
    rows, recs = [], []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        for N in Ns:
            for s in ss:
                params = SpaceParams(N, s)
                fam = _family(args, "power")
                try:
                    rep = classify_potentials(fam, params)
                except DomainError as exc:
                    recs.append({"N": N, "s": str(s), "error": str(exc)})
                    continue
                d = rep.to_dict()
                recs.append({"N": N, "s": str(s), "report": d})
                lo, hi = rep.q_single_interval if rep.q_single_interval else (math.nan, math.nan)
                rows.append((N, float(s), float(rep.q1_interval[0]), float(rep.q1_interval[1]),
                             float(rep.q2_lower), float(lo), float(hi)))
    write_csv(out.path("series.csv"), ["N", "s", "q1_lo", "q1_hi", "q2_lower", "single_lo", "single_hi"], rows)
    if args.plot and rows:
        def draw(ax):
            for N in Ns:
                sel = [r for r in rows if r[0] == N]
                ax.plot([r[1] for r in sel], [min(r[3], 50) for r in sel], "o-", label=f"q1 upper, N={N}")
                ax.plot([r[1] for r in sel], [r[4] for r in sel], "s--", label=f"q2 lower, N={N}")
            ax.set_xlabel("s")
            ax.legend()
        _plot(out, "sweep.png", draw)
    return _finish(out, "sweep", {"records": recs}, caught, args.strict)


COMMANDS = {"exponents": cmd_exponents, "verify": cmd_verify, "solve": cmd_solve, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.jobs < 1:
        parser.error("--jobs must be positive")
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        threadpool_limits = None
    try:
        if threadpool_limits is not None:
            with threadpool_limits(limits=args.jobs):
                return COMMANDS[args.command](args)
        return COMMANDS[args.command](args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, ArithmeticError, np.linalg.LinAlgError, RuntimeError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
