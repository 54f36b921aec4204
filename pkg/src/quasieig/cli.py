"""Command line entry point: ``quasieig check|solve|eigen|verify|sweep``.

Exit codes: ``check`` returns 0 (holds), 1 (fails) or 2 (unknown); every
command returns 3 on a configuration or solver error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .admissibility import Verdict, full_report
from .config import Config, ConfigError, load_config
from .radial_solver import RadialSolution, SolverError, solve_annulus, solve_eigen, solve_ivp
from .verifier import SweepConfig, gradient_estimate_check, harnack_check, liouville_probe, run_sweep

PROFILE_COLUMNS = ("r", "u", "du", "flux")
EXIT_CONFIG = 3


def _need(cfg: Config, *what: str):
    for w in what:
        if getattr(cfg, w) is None:
            raise ConfigError(f"config needs a [{w}] section")


def _profile_csv(sol: RadialSolution, meta: dict, timestamp: bool) -> str:
    buf = io.StringIO()
    buf.write("# quasieig profile csv v1\n")
    for k, v in meta.items():
        buf.write(f"# {k}: {v}\n")
    buf.write(f"# status: {sol.status}\n")
    if sol.r_stop is not None:
        buf.write(f"# r_stop: {sol.r_stop!r}\n")
    buf.write(f"# tolerances: atol={sol.tolerances[0]!r} rtol={sol.tolerances[1]!r}\n")
    if timestamp:
        buf.write(f"# generated: {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    buf.write(",".join(PROFILE_COLUMNS) + "\n")
    for row in zip(sol.grid, sol.u, sol.du, sol.flux):
        buf.write(",".join(repr(float(x)) for x in row) + "\n")
    return buf.getvalue()


def _emit(text: str, out: str | None, filename: str):
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    (path / filename).write_text(text)
    print(f"wrote {path / filename}")


def _solve_from(cfg: Config) -> tuple[RadialSolution, dict]:
    _need(cfg, "geometry", "problem")
    sec = cfg.section("solve")
    meta = {"geometry": cfg.geometry.id, "spec": cfg.problem.name or "-", "lam": repr(cfg.problem.lam)}
    if "R1" in sec:
        R1, R2 = float(sec["R1"]), float(sec["R2"])
        boundary = tuple(map(float, sec["boundary"]))
        sol = solve_annulus(cfg.geometry, cfg.problem, R1, R2, boundary, atol=cfg.atol, rtol=cfg.rtol)
        meta.update(mode="annulus", R1=R1, R2=R2, boundary=boundary)
    else:
        u0, R = float(sec.get("u0", 1.0)), float(sec["R"])
        sol = solve_ivp(cfg.geometry, cfg.problem, u0, R, atol=cfg.atol, rtol=cfg.rtol)
        meta.update(mode="ivp", u0=u0, R=R)
    return sol, meta


def cmd_check(cfg: Config, args) -> int:
    _need(cfg, "geometry", "problem")
    rep = full_report(cfg.problem)
    print(rep.format())
    if args.out:
        _emit(json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n", args.out, "report.json")
    return {Verdict.HOLDS: 0, Verdict.FAILS: 1, Verdict.UNKNOWN: 2}[rep.overall]


def cmd_solve(cfg: Config, args) -> int:
    sol, meta = _solve_from(cfg)
    _emit(_profile_csv(sol, meta, not args.no_timestamp), args.out, "solve.csv")
    return 0


def cmd_eigen(cfg: Config, args) -> int:
    _need(cfg, "geometry", "problem")
    sec = cfg.section("eigen")
    R, u0 = float(sec.get("R", 1.0)), float(sec.get("u0", 1.0))
    lam, sol = solve_eigen(cfg.geometry, cfg.problem, R, u0, tuple(map(float, sec["bracket"])),
                           atol=cfg.atol, rtol=cfg.rtol)
    meta = {"geometry": cfg.geometry.id, "spec": cfg.problem.name or "-", "mode": "eigen", "R": R, "u0": u0,
            "eigenvalue": repr(lam)}
    if args.out:
        _emit(_profile_csv(sol, meta, not args.no_timestamp), args.out, "eigen.csv")
    print(f"eigenvalue {lam!r}")
    return 0


def cmd_verify(cfg: Config, args) -> int:
    sec = cfg.section("verify")
    kind = sec.get("kind", "gradient")
    if kind == "liouville":
        _need(cfg, "geometry", "problem")
        rep = liouville_probe(cfg.geometry, cfg.problem, float(sec["R_max"]), u0=float(sec.get("u0", 1.0)),
                              growth=float(sec.get("growth", 1e6)), atol=cfg.atol, rtol=cfg.rtol)
        print(f"branch {rep.branch}")
        print(f"r_event {rep.r_event!r}")
        if rep.detail:
            print(f"detail {rep.detail}")
        return 0
    sol, _ = _solve_from(cfg)
    center, R = float(sec.get("center", 0.0)), float(sec["R"])
    if kind == "gradient":
        est = gradient_estimate_check(sol, center, R)
        for k in ("center", "R", "sup_ratio", "bound_shape", "fitted_C", "status"):
            print(f"{k} {getattr(est, k)!r}" if k != "status" else f"{k} {est.status}")
    elif kind == "harnack":
        h = harnack_check(sol, R, center)
        print(f"ratio {h.ratio!r}")
        print(f"exponent {h.exponent!r}")
    else:
        raise ConfigError(f"unknown verify kind {kind!r}")
    return 0


def cmd_sweep(cfg: Config, args) -> int:
    sweep = SweepConfig.from_dict(cfg.section("sweep"), atol=cfg.atol, rtol=cfg.rtol)
    paths = run_sweep(sweep, args.out or ".", timestamp=not args.no_timestamp, jobs=args.jobs)
    for p in paths.values():
        print(f"wrote {p}")
    return 0


COMMANDS = {"check": cmd_check, "solve": cmd_solve, "eigen": cmd_eigen, "verify": cmd_verify, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quasieig", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="TOML config file")
    ap.add_argument("--out", help="output directory (default: stdout for profiles, cwd for sweeps)")
    ap.add_argument("--no-timestamp", action="store_true", help="omit the generated-at header line")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    np.seterr(all="ignore")
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, SolverError, ValueError, KeyError) as exc:
        msg = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
        print(f"quasieig {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
