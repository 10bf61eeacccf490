"""Command-line interface.

Subcommands: eig, run, steady, sweep, reduce, verify.  Global flags --out,
--jobs, --rng-seed and --config (key=value file merged into the scenario
defaults).  Exit code 0 iff every executed check passes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .dynamics import Params, integrate
from .errors import ParseError, RangeError, ShbifError, UsageError
from .harness import (
    SCENARIOS,
    ExperimentConfig,
    default_config,
    parse_config,
    run_suite,
)
from .linear_analysis import principal
from .reduced import build_reduced, predict_amplitudes, reduced_fixed_points
from .spectral import SpectralField, to_grid, write_csv_1d, write_pgm_2d
from .steady import find_all, newton, stability


def _json_out(obj, path: Path | None):
    text = json.dumps(obj, sort_keys=True, indent=2)
    if path is not None:
        path.write_text(text + "\n")
    print(text)


def _base_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if getattr(args, "config", None):
        cfg = parse_config(Path(args.config).read_text(), base=cfg)
    for key in ("dim", "bc", "length", "grid_n", "band", "mu", "dt",
                "t_end", "n_seeds"):
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "lam", None) is not None:
        cfg.lam = args.lam
    if args.rng_seed is not None:
        cfg.rng_seed = args.rng_seed
    cfg.jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    cfg.out_dir = args.out
    return cfg


def _seed_field(cfg: ExperimentConfig, args):
    d = cfg.domain()
    if getattr(args, "seed_file", None):
        spec = json.loads(Path(args.seed_file).read_text())
        coeffs = {(m["kind"], tuple(m["k"])): m["c"] for m in spec["modes"]}
        return SpectralField.from_modes(d, coeffs)
    mode = getattr(args, "seed_mode", None)
    amp = getattr(args, "seed_amp", None) or 0.1
    if mode is None:
        mode = principal(d).critical_modes[0]
    else:
        mode = int(mode) if cfg.dim == 1 else tuple(int(v) for v in mode.split(","))
    return amp * SpectralField.from_modes(d, {mode: 1.0})


def _snapshot(field, out: Path, stem: str):
    g = to_grid(field)
    if field.domain.dim == 1:
        path = out / f"{stem}.csv"
        write_csv_1d(g, path)
        return str(path)
    if field.domain.dim == 2:
        path = out / f"{stem}.pgm"
        write_pgm_2d(g, path)
        return str(path)
    return None


def cmd_eig(args) -> int:
    cfg = _base_config(args)
    summ = principal(cfg.domain())
    _json_out(summ.as_dict(lam=cfg.lam), Path(cfg.out_dir) / "eig.json"
              if args.write else None)
    return 0


def cmd_run(args) -> int:
    cfg = _base_config(args)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    u0 = _seed_field(cfg, args)
    rep = integrate(u0, cfg.params(), cfg.stepper())
    rows = zip(rep.times, rep.l2_norms, rep.lyapunov_values)
    series = out / "run-series.csv"
    with open(series, "w") as fh:
        fh.write("t,l2,lyapunov\n")
        for t, l2, ly in rows:
            fh.write(f"{float(t)!r},{float(l2)!r},{float(ly)!r}\n")
    artifacts = [str(series)]
    if args.snapshot:
        snap = _snapshot(rep.final_state, out, "run-final")
        if snap:
            artifacts.append(snap)
    doc = rep.as_dict()
    doc["rng_seed"] = cfg.rng_seed
    doc["artifacts"] = artifacts
    _json_out(doc, out / "run-report.json")
    return 0


def cmd_steady(args) -> int:
    cfg = _base_config(args)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    p = cfg.params()
    if args.nseeds:
        states = find_all(cfg.domain(), p, n_seeds=args.nseeds,
                          rng_seed=cfg.rng_seed, jobs=cfg.jobs)
    else:
        states = [stability(newton(_seed_field(cfg, args), p))]
    docs = []
    for i, s in enumerate(states):
        doc = s.as_dict()
        snap = _snapshot(s.state, out, f"steady-{i}")
        if snap:
            doc["snapshot"] = snap
        docs.append(doc)
    _json_out({"states": docs, "rng_seed": cfg.rng_seed}, out / "steady.json")
    return 0


def cmd_sweep(args) -> int:
    cfg = _base_config(args)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lams = np.linspace(args.lambda_min, args.lambda_max, args.steps)
    path = out / "sweep.csv"
    crit = principal(cfg.domain()).critical_modes[0]
    with open(path, "w") as fh:
        fh.write("lambda,state_id,l2_norm,critical_amplitude,morse_index\n")
        for lam in lams:
            lam = float(lam)
            states = find_all(cfg.domain(), Params(lam, cfg.mu),
                              n_seeds=args.nseeds, rng_seed=cfg.rng_seed,
                              jobs=cfg.jobs)
            for i, s in enumerate(states):
                amp = s.state.coeff(crit)
                fh.write(f"{lam!r},{i},{s.norm!r},{amp!r},{s.morse_index}\n")
    print(f"wrote {path}")
    return 0


def cmd_reduce(args) -> int:
    cfg = _base_config(args)
    d = cfg.domain()
    sys = build_reduced(d)
    fps = reduced_fixed_points(sys, cfg.lam)
    pred = predict_amplitudes(d, cfg.params())
    doc = {
        "reduced_system": sys.as_dict(),
        "fixed_points": [f.as_dict() for f in fps],
        "prediction": pred.as_dict(),
    }
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _json_out(doc, out / "reduce.json")
    return 0


def cmd_verify(args) -> int:
    names = sorted(SCENARIOS) if args.scenario == "all" else [args.scenario]
    ok = True
    for name in names:
        cfg = default_config(name)
        if args.config:
            cfg = parse_config(Path(args.config).read_text(), base=cfg)
        if args.rng_seed is not None:
            cfg.rng_seed = args.rng_seed
        if args.jobs is not None:
            cfg.jobs = args.jobs
        cfg.out_dir = args.out
        report = run_suite(name, cfg)
        for line in report.summary_lines():
            print(line)
        ok = ok and report.passed
    print("overall:", "PASS" if ok else "FAIL")
    return 0 if ok else 1


def _add_domain_flags(sp):
    sp.add_argument("--dim", type=int, default=None)
    sp.add_argument("--bc", type=str, default=None)
    sp.add_argument("--length", type=float, default=None)
    sp.add_argument("--grid", dest="grid_n", type=int, default=None)
    sp.add_argument("--band", type=int, default=None)


def _add_param_flags(sp):
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--mu", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shbif",
                                 description="Swift-Hohenberg bifurcation toolkit")
    ap.add_argument("--out", default="out", help="output directory")
    ap.add_argument("--jobs", type=int, default=None, help="worker processes")
    ap.add_argument("--rng-seed", type=int, default=None)
    ap.add_argument("--config", default=None, help="key=value config file")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("eig", help="principal eigenvalue and critical modes")
    _add_domain_flags(sp)
    _add_param_flags(sp)
    sp.add_argument("--write", action="store_true")
    sp.set_defaults(func=cmd_eig)

    sp = sub.add_parser("run", help="time integration with bound monitors")
    _add_domain_flags(sp)
    _add_param_flags(sp)
    sp.add_argument("--dt", type=float, default=None)
    sp.add_argument("--t-end", dest="t_end", type=float, default=None)
    sp.add_argument("--seed-mode", default=None)
    sp.add_argument("--seed-amp", type=float, default=None)
    sp.add_argument("--seed-file", default=None)
    sp.add_argument("--snapshot", action="store_true")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("steady", help="Newton steady-state solves")
    _add_domain_flags(sp)
    _add_param_flags(sp)
    sp.add_argument("--from-mode", dest="seed_mode", default=None)
    sp.add_argument("--amp", dest="seed_amp", type=float, default=None)
    sp.add_argument("--from-file", dest="seed_file", default=None)
    sp.add_argument("--nseeds", type=int, default=0)
    sp.set_defaults(func=cmd_steady)

    sp = sub.add_parser("sweep", help="bifurcation diagram over lambda")
    _add_domain_flags(sp)
    sp.add_argument("--mu", type=float, default=None)
    sp.add_argument("--lambda-min", type=float, required=True)
    sp.add_argument("--lambda-max", type=float, required=True)
    sp.add_argument("--steps", type=int, default=11)
    sp.add_argument("--nseeds", type=int, default=20)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("reduce", help="reduced tensors, fixed points, predictions")
    _add_domain_flags(sp)
    _add_param_flags(sp)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("verify", help="run a verification scenario (or 'all')")
    sp.add_argument("scenario")
    sp.set_defaults(func=cmd_verify)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    except (ParseError, RangeError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except ShbifError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
