"""Command-line entry point: ``axilift <subcommand> [flags]``.

Every run writes ``manifest.jsonl`` (the full effective configuration) next
to its CSV outputs in ``--out``. Exit status is 0 on success, 1 when a
numerical module raises, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from ._accel import backend
from .corridor import CSV_COLUMNS, derive_corridor, exponent_table, identity_checks
from .dynamics import (DeGiorgiConfig, MorreyConfig, degiorgi_phase, degiorgi_run,
                       degiorgi_threshold, morrey_run, morrey_threshold, verdict_transitions)
from .elliptic import assemble, friedrichs_mu1, hardy_potential, solve_dirichlet
from .errors import AxiliftError, ConfigurationError
from .functionals import (capacity_bound, cutoff_energies, dyadic, multiplier_ratio,
                          parabolic_bump, quartic_profile, random_smooth_field, scaling_series,
                          sobolev_ratio)
from .grid import build_grid
from .io import write_csv, write_field_csv, write_jsonl, write_series_csv, read_field_csv
from .parabolic import EvolutionConfig, estimate_contraction, sample_family

RNG_ALGORITHM = "numpy.random.PCG64"
SUBCOMMANDS = ("exponents", "solve", "friedrichs", "hardy", "capacity", "quartic",
               "sobolev", "multiplier", "morrey", "degiorgi")


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def _jobs(args):
    env = os.environ.get("AXILIFT_JOBS")
    n = args.jobs if args.jobs is not None else (int(env) if env else 1)
    return max(1, int(n))


def _pmap(func, items, jobs):
    """Order-preserving map; threads only help with the numba backend (nogil)."""
    if jobs <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


# ------------------------------------------------------------ subcommands


def run_exponents(args, out):
    rows = exponent_table(args.alpha)
    write_csv(out / "exponents.csv", CSV_COLUMNS, (p.as_row() for p in rows))
    checks = [{"alpha": p.alpha, **identity_checks(p)} for p in rows]
    write_jsonl(out / "identities.jsonl", checks)
    return {"rows": len(rows)}


def run_solve(args, out):
    grid = build_grid(args.nr, args.nz)
    potential = hardy_potential(grid, args.alpha) if args.alpha is not None else None
    op = assemble(grid, args.a, potential)
    if args.rhs == "zero":
        f = grid.sample(lambda R, Z: 0.0 * R)
    elif args.rhs == "manufactured":
        # -Delta_5 of (1 - r^2)(1 - z^2)
        f = grid.sample(lambda R, Z: 8.0 * (1 - Z**2) + 2.0 * (1 - R**2))
    else:
        if not args.rhs_file:
            raise ConfigurationError("--rhs file needs --rhs-file")
        f = read_field_csv(args.rhs_file, grid)
    u, report = solve_dirichlet(op, f, args.tol)
    write_field_csv(out / "solution.csv", u)
    rec = {"iterations": report.iterations, "final_residual": report.final_residual,
           "energy_identity_gap": report.energy_identity_gap}
    write_jsonl(out / "report.jsonl", [rec])
    return rec


def run_friedrichs(args, out):
    grid = build_grid(args.nr, args.nz)
    mu1, mode = friedrichs_mu1(grid, args.a, args.tol)
    write_field_csv(out / "mode.csv", mode)
    write_csv(out / "summary.csv", ("nr", "nz", "a", "mu1", "poincare_constant"),
              [(args.nr, args.nz, args.a, mu1, 1.0 / mu1)])
    return {"mu1": mu1}


def run_hardy(args, out):
    grid = build_grid(args.nr, args.nz)
    samples = sample_family(grid, args.samples, args.seed)
    cfg = EvolutionConfig(grid, args.alpha, args.dt, samples[0], scheme=args.scheme)

    def one(i):
        return estimate_contraction(args.theta, [samples[i]], cfg)

    reports = _pmap(one, range(len(samples)), _jobs(args))
    rows, ratios = [], []
    for i, rep in enumerate(reports):
        if rep.ratios:
            rows.append((i, rep.e_full[0], rep.e_theta[0], rep.ratios[0]))
            ratios.append(rep.ratios[0])
        else:
            rows.append((i, 0.0, 0.0, float("nan")))
    kappa = max(ratios) if ratios else float("nan")
    footer = [("summary", len(ratios), "kappa_estimate", kappa)]
    write_csv(out / "hardy.csv", ("sample_id", "E_full", "E_theta", "ratio"), rows, footer=footer)
    return {"kappa_estimate": kappa, "samples_used": len(ratios), "contracts": bool(ratios) and kappa < 1}


def run_capacity(args, out):
    eps = dyadic(args.eps_min_exp, args.eps_max_exp)
    mass = scaling_series(lambda e: cutoff_energies(e)[0], eps)
    grad = scaling_series(lambda e: cutoff_energies(e)[1], eps)
    bound = scaling_series(capacity_bound, eps)
    write_series_csv(out / "capacity_mass.csv", mass)
    write_series_csv(out / "capacity_grad.csv", grad)
    write_series_csv(out / "capacity_bound.csv", bound)
    return {"mass_slope": mass.slope, "grad_slope": grad.slope,
            "bound_last_over_first": bound.values[-1] / bound.values[0]}


def run_quartic(args, out):
    derive_corridor(args.alpha)
    rhos = dyadic(args.rho_min_exp, args.rho_max_exp)
    summary = {}
    for name in ("quotient_sq", "quartic", "dirichlet", "quotient_ckn"):
        s = scaling_series(lambda r: getattr(quartic_profile(args.alpha, r), name), rhos)
        write_series_csv(out / f"quartic_{name}.csv", s)
        summary[f"{name}_slope"] = s.slope
    summary["predicted_quotient_sq_slope"] = 2 * args.alpha - 2
    return summary


def run_sobolev(args, out):
    params = derive_corridor(args.alpha)
    grid = build_grid(args.nr, args.nz)
    rows = []
    for s in args.scales:
        psi = parabolic_bump(grid, args.dt, s)
        rows.append((s, sobolev_ratio(psi, params, R=s)))
    write_csv(out / "sobolev.csv", ("scale", "ratio"), rows)
    vals = [r for _, r in rows]
    return {"median_ratio": float(np.median(vals)), "max_over_median": max(vals) / float(np.median(vals))}


def run_multiplier(args, out):
    grid = build_grid(args.nr, args.nz)
    rng = _rng(args.seed)
    fields = [random_smooth_field(grid, rng) for _ in range(args.samples)]
    ratios = _pmap(multiplier_ratio, fields, _jobs(args))
    write_csv(out / "multiplier.csv", ("sample_id", "ratio"), list(enumerate(ratios)),
              footer=[("max", max(ratios))])
    return {"max_ratio": max(ratios)}


def _morrey_cfg(args):
    delta = args.gain_delta if args.gain_delta is not None else derive_corridor(args.alpha).gain_delta
    return MorreyConfig(kappa=args.kappa, c_src=args.c_src, gain_delta=delta, theta=args.theta,
                        r0=args.r0, e0=args.e0, max_steps=args.max_steps)


def run_morrey(args, out):
    cfg = _morrey_cfg(args)
    tr = morrey_run(cfg)
    write_csv(out / "trace.csv", ("step", "value"), tr.rows())
    result = {"verdict": tr.verdict, "steps": len(tr.values) - 1, "guaranteed_e0": cfg.guaranteed_e0()}
    if args.threshold:
        from dataclasses import replace

        r0s = dyadic(0, args.r0_ladder - 1)
        rows = [(r0, morrey_threshold(replace(cfg, r0=r0), args.tol)) for r0 in r0s]
        write_csv(out / "threshold.csv", ("r0", "threshold_e0"), rows)
        result["threshold_e0"] = rows[0][1]
    return result


def run_degiorgi(args, out):
    beta = args.beta if args.beta is not None else derive_corridor(args.alpha).beta_dg
    cfg = DeGiorgiConfig(beta_dg=beta, lambda1=args.lambda1, lambda2=args.lambda2, c_big=args.c_big,
                         K=args.K, R=args.R, phi_r=args.phi_r, y0=args.y0, max_steps=args.max_steps)
    tr = degiorgi_run(cfg)
    write_csv(out / "trace.csv", ("step", "value"), tr.rows())
    result = {"verdict": tr.verdict, "classical_bound": cfg.classical_bound()}
    if cfg.phi_r == 0.0:
        result["threshold_y0"] = degiorgi_threshold(cfg, args.tol)
    if args.phase:
        y0s = np.logspace(args.y0_log_min, args.y0_log_max, args.y0_points)
        rows = degiorgi_phase(cfg, y0s, args.K_list, args.phi_list, args.R_list)
        cols = ("y0", "K", "phi_r", "R", "verdict", "steps")
        write_csv(out / "phase.csv", cols, ([r[c] for c in cols] for r in rows))
        n = len(y0s)
        result["max_transitions_along_y0"] = max(
            verdict_transitions([r["verdict"] for r in rows[i:i + n]]) for i in range(0, len(rows), n))
    return result


RUNNERS = {name: globals()[f"run_{name}"] for name in SUBCOMMANDS}


# ------------------------------------------------------------ parser


def _floats(text):
    return [float(t) for t in str(text).replace(",", " ").split()]


def build_parser():
    parser = argparse.ArgumentParser(prog="axilift", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--out", type=Path, default=None, help="output directory (default runs/<subcommand>)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--config", type=Path, default=None, help="flat key = value file; flags win")
        return p

    p = add("exponents", "exponent table for one or more alpha")
    p.add_argument("--alpha", type=float, nargs="+", default=[0.8])

    p = add("solve", "weighted Dirichlet solve")
    p.add_argument("--nr", type=int, default=64)
    p.add_argument("--nz", type=int, default=64)
    p.add_argument("--a", type=float, default=3.0)
    p.add_argument("--alpha", type=float, default=None, help="add the Hardy potential (1-alpha^2)/r^2")
    p.add_argument("--rhs", choices=("manufactured", "zero", "file"), default="manufactured")
    p.add_argument("--rhs-file", type=Path, default=None)
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("friedrichs", "smallest weighted Rayleigh quotient")
    p.add_argument("--nr", type=int, default=64)
    p.add_argument("--nz", type=int, default=64)
    p.add_argument("--a", type=float, default=3.0)
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("hardy", "Hardy heat flow and contraction ratios")
    p.add_argument("--alpha", type=float, default=0.8)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--nr", type=int, default=48)
    p.add_argument("--nz", type=int, default=48)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--scheme", choices=("implicit-euler", "crank-nicolson"), default="implicit-euler")

    p = add("capacity", "axis cutoff energies and capacity bound")
    p.add_argument("--eps-min-exp", type=int, default=4, help="largest epsilon is 2^-this")
    p.add_argument("--eps-max-exp", type=int, default=10)

    p = add("quartic", "quartic counterexample family")
    p.add_argument("--alpha", type=float, default=0.8)
    p.add_argument("--rho-min-exp", type=int, default=3)
    p.add_argument("--rho-max-exp", type=int, default=9)

    p = add("sobolev", "parabolic Sobolev ratio under rescaling")
    p.add_argument("--alpha", type=float, default=0.8)
    p.add_argument("--nr", type=int, default=128)
    p.add_argument("--nz", type=int, default=128)
    p.add_argument("--dt", type=float, default=1.0 / 1024)
    p.add_argument("--scales", type=_floats, default=[1.0, 0.5, 0.25])

    p = add("multiplier", "L10/L2 ratio of the stream potential")
    p.add_argument("--nr", type=int, default=64)
    p.add_argument("--nz", type=int, default=64)
    p.add_argument("--samples", type=int, default=20)

    p = add("morrey", "Morrey scale recursion")
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--c-src", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=0.8)
    p.add_argument("--gain-delta", type=float, default=None, help="overrides 4 alpha - 3")
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--r0", type=float, default=1.0)
    p.add_argument("--e0", type=float, default=0.2)
    p.add_argument("--max-steps", type=int, default=20000)
    p.add_argument("--threshold", action="store_true", help="also bisect the critical e0 along an r0 ladder")
    p.add_argument("--r0-ladder", type=int, default=6)
    p.add_argument("--tol", type=float, default=1e-6)

    p = add("degiorgi", "De Giorgi level recursion")
    p.add_argument("--alpha", type=float, default=0.8)
    p.add_argument("--beta", type=float, default=None, help="overrides 2/(N*+2)")
    p.add_argument("--lambda1", type=float, default=None)
    p.add_argument("--lambda2", type=float, default=None)
    p.add_argument("--c-big", type=float, default=16.0)
    p.add_argument("--K", type=float, default=1.0)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--phi-r", type=float, default=0.0)
    p.add_argument("--y0", type=float, default=1e-12)
    p.add_argument("--max-steps", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--phase", action="store_true", help="sweep (y0, K, phi_r, R) and write phase.csv")
    p.add_argument("--y0-log-min", type=float, default=-40.0)
    p.add_argument("--y0-log-max", type=float, default=0.0)
    p.add_argument("--y0-points", type=int, default=41)
    p.add_argument("--K-list", type=_floats, default=[0.5, 1.0, 2.0])
    p.add_argument("--phi-list", type=_floats, default=[0.0, 1e-8, 1e-4])
    p.add_argument("--R-list", type=_floats, default=[1.0, 0.5])
    return parser


def _read_config(path):
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = val
    return values


def _apply_config(parser, argv):
    """Re-parse with config-file values as defaults so explicit flags win."""
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    try:
        conf = _read_config(args.config)
    except (OSError, ValueError) as exc:
        subparser.error(str(exc))
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, text in conf.items():
        action = actions.get(key)
        if action is None:
            subparser.error(f"unknown config key {key!r}")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = text.lower() in ("1", "true", "yes", "on")
        elif action.nargs in ("+", "*"):
            defaults[key] = [action.type(t) for t in text.replace(",", " ").split()]
        else:
            defaults[key] = action.type(text) if action.type else text
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def manifest_record(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "config", "jobs")}
    return {"subcommand": args.command, "config": cfg, "seed": args.seed, "rng": RNG_ALGORITHM,
            "numpy": np.__version__, "backend": backend(), "version": __version__}


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser, argv)
    out = args.out if args.out is not None else Path("runs") / args.command
    out.mkdir(parents=True, exist_ok=True)
    manifest = manifest_record(args)
    try:
        summary = RUNNERS[args.command](args, out)
    except (AxiliftError, OSError) as exc:
        info = exc.record() if isinstance(exc, AxiliftError) else {"error": "io-error", "message": str(exc)}
        record = {"status": "error", **info}
        write_jsonl(out / "manifest.jsonl", [manifest, record])
        print(json.dumps(record, sort_keys=True, default=str), file=sys.stderr)
        return 1
    write_jsonl(out / "manifest.jsonl", [manifest, {"status": "ok", "summary": summary}])
    print(json.dumps({k: (v if not isinstance(v, float) or math.isfinite(v) else str(v))
                      for k, v in summary.items()}, sort_keys=True, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
