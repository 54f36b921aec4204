"""Measurements of the gradient estimate, Harnack ratio and Liouville dichotomy.

Geodesic balls about an off-centre point at distance ``c`` from the pole
meet a radial profile exactly on the radius interval ``[max(0, c - R), c + R]``,
so every check here works on intervals of the radial solution.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .admissibility import ProblemSpec, Verdict, full_report
from .config import ConfigError, build_problem, single_term
from .radial_solver import (
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    ModelGeometry,
    RadialSolution,
    SolverError,
    solve_annulus,
    solve_eigen,
    solve_ivp,
)

__all__ = [
    "EstimateResult",
    "HarnackResult",
    "LiouvilleReport",
    "SweepConfig",
    "BallError",
    "gradient_estimate_check",
    "harnack_check",
    "liouville_probe",
    "run_sweep",
    "CSV_VERSION",
    "SWEEP_COLUMNS",
]

CSV_VERSION = 1
RED_FLAG_OSCILLATION = 1e-6


class BallError(ValueError):
    """The tested ball (with its positivity margin) leaves the solution's domain."""


@dataclass(frozen=True)
class EstimateResult:
    spec_id: str
    geometry_id: str
    center: float
    R: float
    sup_ratio: float
    bound_shape: float
    fitted_C: float
    status: str
    argmax: float = math.nan


@dataclass(frozen=True)
class HarnackResult:
    ratio: float
    exponent: float


@dataclass(frozen=True)
class LiouvilleReport:
    """Outcome of integrating a regular radial solution outward.

    ``branch`` is ``hit_zero`` or ``unbounded`` (both consistent with the
    Liouville dichotomy), ``trivial`` for lam = 0, ``red_flag`` for a bounded
    positive profile that barely oscillates, and ``inconclusive`` otherwise.
    """

    branch: str
    r_event: Optional[float]
    u_max: float
    u_min: float
    R_max: float
    detail: str = ""

    @property
    def consistent(self) -> bool:
        return self.branch in ("hit_zero", "unbounded", "trivial")


def _ball(solution: RadialSolution, center: float, R: float, margin: float) -> tuple[float, float]:
    if not R > 0:
        raise ValueError("R must be positive")
    if center < 0:
        raise ValueError("center offset must be non-negative")
    lo, hi = solution.domain
    if solution.status != "completed":
        hi = min(hi, solution.r_stop if solution.r_stop is not None else hi)
    need_lo, need_hi = max(0.0, center - margin), center + margin
    tol = 1e-12 * max(1.0, hi)
    if need_lo < lo - tol or need_hi > hi + tol:
        raise BallError(
            f"ball of radius {margin:g} about offset {center:g} needs radii [{need_lo:g}, {need_hi:g}] "
            f"but the solution is positive only on [{lo:g}, {hi:g}]"
        )
    return max(lo, center - R), min(hi, center + R)


def _log_slope(solution: RadialSolution):
    def f(r):
        u, du = solution(r)
        return np.abs(du) / u

    return f


def _refined_max(f, lo: float, hi: float, grid: np.ndarray) -> tuple[float, float]:
    """Max of f on [lo, hi]: grid points plus a bounded search around the best."""
    pts = np.concatenate([[lo], grid[(grid > lo) & (grid < hi)], [hi]])
    if pts.size < 64:
        pts = np.union1d(pts, np.linspace(lo, hi, 64))
    vals = np.asarray(f(pts), dtype=float)
    i = int(np.argmax(vals))
    best, arg = float(vals[i]), float(pts[i])
    if 0 < i < pts.size - 1:
        res = minimize_scalar(lambda x: -float(f(x)), bounds=(pts[i - 1], pts[i + 1]), method="bounded",
                              options={"xatol": 1e-12 * max(1.0, abs(pts[i]))})
        if -res.fun > best:
            best, arg = float(-res.fun), float(res.x)
    return best, arg


def gradient_estimate_check(solution: RadialSolution, center: float, R: float) -> EstimateResult:
    """sup of |u'|/u over the ball of radius R about the offset ``center``.

    The solution must be positive on the ball of radius 2R about the same
    point. ``fitted_C`` is the sup divided by ``(1 + sqrt(K) R)/R``.
    """
    lo, hi = _ball(solution, center, R, 2.0 * R)
    sup, arg = _refined_max(_log_slope(solution), lo, hi, solution.grid)
    K = solution.geometry.K
    shape = (1.0 + math.sqrt(K) * R) / R
    return EstimateResult(
        spec_id=solution.spec.name or "spec",
        geometry_id=solution.geometry.id,
        center=float(center), R=float(R), sup_ratio=sup, bound_shape=shape,
        fitted_C=sup / shape, status=solution.status, argmax=arg,
    )


def harnack_check(solution: RadialSolution, R: float, center: float = 0.0) -> HarnackResult:
    """sup u / inf u on the ball and the exponent ``log(ratio)/(1 + sqrt(K) R)``."""
    lo, hi = _ball(solution, center, R, R)
    umax, _ = _refined_max(lambda r: solution(r)[0], lo, hi, solution.grid)
    neg_min, _ = _refined_max(lambda r: -solution(r)[0], lo, hi, solution.grid)
    umin = -neg_min
    if not umin > 0:
        raise BallError("solution is not positive on the ball")
    ratio = umax / umin
    return HarnackResult(ratio=ratio, exponent=math.log(ratio) / (1.0 + math.sqrt(solution.geometry.K) * R))


def liouville_probe(
    geometry: ModelGeometry,
    spec: ProblemSpec,
    R_max: float,
    u0: float = 1.0,
    growth: float = 1e6,
    atol: float = DEFAULT_ATOL,
    rtol: float = DEFAULT_RTOL,
) -> LiouvilleReport:
    """Which branch of the Liouville dichotomy a regular radial solution takes.

    ``unbounded`` means u exceeded ``growth * u0`` before ``R_max``.
    """
    if geometry.kappa != 0.0:
        raise ValueError("the Liouville probe needs a flat model (kappa = 0)")
    if spec.lam == 0.0:
        return LiouvilleReport("trivial", None, u0, u0, R_max, "lam = 0: constants are the regular solutions")
    sol = solve_ivp(geometry, spec, u0, R_max, atol=atol, rtol=rtol, blowup=growth)
    umax, umin = float(sol.u.max()), float(sol.u.min())
    if sol.status == "hit_zero":
        return LiouvilleReport("hit_zero", sol.r_stop, umax, 0.0, R_max)
    if sol.status == "blew_up":
        return LiouvilleReport("unbounded", sol.r_stop, growth * u0, umin, R_max)
    if umax / umin < 1.0 + RED_FLAG_OSCILLATION:
        return LiouvilleReport(
            "red_flag", None, umax, umin, R_max,
            "bounded positive profile on the whole range with lam != 0",
        )
    return LiouvilleReport("inconclusive", None, umax, umin, R_max, "neither zero nor growth cap reached")


# -- sweeps -----------------------------------------------------------------

SWEEP_COLUMNS = (
    "row", "experiment", "spec_id", "n", "kappa", "p", "terms", "r", "phi", "a", "psi", "lam", "u0", "R",
    "admissible", "c1", "c2", "c3", "I", "gamma", "Theta", "poly_threshold", "poly_admissible", "poly_agrees",
    "status", "center", "sup_ratio", "bound_shape", "fitted_C", "harnack_ratio", "harnack_exponent",
    "branch", "r_event", "eigenvalue", "error",
)

EXPERIMENTS = ("admissibility", "gradient", "liouville", "eigen")
_GRID_KEYS = ("n", "kappa", "p", "terms", "r", "phi", "a", "psi", "lam", "u0", "R")
_DEFAULTS = {"n": [3], "kappa": [0.0], "lam": [0.0], "u0": [1.0], "R": [1.0]}


@dataclass
class SweepConfig:
    """A parameter sweep.

    ``grid`` maps parameter names to lists: ``n``, ``kappa``, ``lam``,
    ``u0``, ``R`` and either the polynomial family (``p``, ``terms`` or
    ``q``, ``r``) or explicit functions (``phi``, ``a``, ``psi`` strings).
    Rows follow the Cartesian product in the fixed order of ``_GRID_KEYS``.
    """

    experiment: str
    grid: dict
    name: str = "sweep"
    annulus: dict = field(default_factory=dict)
    liouville: dict = field(default_factory=dict)
    eigen: dict = field(default_factory=dict)
    negative_test: bool = False
    plot: bool = False
    atol: float = DEFAULT_ATOL
    rtol: float = DEFAULT_RTOL

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        grid = dict(self.grid)
        if "q" in grid:
            if "terms" in grid:
                raise ConfigError("give either 'q' or 'terms', not both")
            grid["terms"] = [[list(t) for t in single_term(q)] for q in grid.pop("q")]
        poly = "p" in grid
        if poly and any(k in grid for k in ("phi", "a", "psi")):
            raise ConfigError("polynomial grids (p, q/terms, r) and explicit functions cannot be mixed")
        if poly:
            grid.setdefault("terms", [[[1.0, 1.0]]])
            grid.setdefault("r", [1.0])
        unknown = set(grid) - set(_GRID_KEYS)
        if unknown:
            raise ConfigError(f"unknown grid keys: {sorted(unknown)}")
        for k, v in _DEFAULTS.items():
            grid.setdefault(k, v)
        for k, v in grid.items():
            if not isinstance(v, list):
                raise ConfigError(f"grid entry {k!r} must be a list")
        self.grid = grid

    @classmethod
    def from_dict(cls, d: dict, atol: float = DEFAULT_ATOL, rtol: float = DEFAULT_RTOL) -> "SweepConfig":
        d = dict(d)
        if "experiment" not in d:
            raise ConfigError("[sweep] needs an 'experiment'")
        known = ("experiment", "grid", "name", "annulus", "liouville", "eigen", "negative_test", "plot")
        unknown = sorted(set(d) - set(known))
        if unknown:
            raise ConfigError(f"unknown [sweep] keys: {unknown}")
        return cls(
            experiment=d["experiment"], grid=d.get("grid", {}), name=d.get("name", "sweep"),
            annulus=d.get("annulus", {}), liouville=d.get("liouville", {}), eigen=d.get("eigen", {}),
            negative_test=bool(d.get("negative_test", False)), plot=bool(d.get("plot", False)),
            atol=atol, rtol=rtol,
        )

    def points(self) -> list[dict]:
        keys = [k for k in _GRID_KEYS if k in self.grid]
        return [dict(zip(keys, combo)) for combo in itertools.product(*(self.grid[k] for k in keys))]


def _spec_for(point: dict) -> tuple[ModelGeometry, ProblemSpec]:
    geometry = ModelGeometry(int(point["n"]), float(point["kappa"]))
    section = {k: point[k] for k in ("p", "terms", "r", "phi", "a", "psi", "lam") if k in point}
    section["name"] = _spec_id(point)
    return geometry, build_problem(section, geometry)


def _spec_id(point: dict) -> str:
    if "p" in point:
        terms = "+".join(f"{a:g}u^{q:g}" for a, q in point["terms"])
        return f"p{point['p']:g}[{terms}]r{point['r']:g}"
    return f"phi={point.get('phi', 'pow(t, 0)')};a={point.get('a', 'pow(t, 0)')};psi={point.get('psi', 'pow(t, 0)')}"


def _admissibility_columns(spec: ProblemSpec) -> dict:
    rep = full_report(spec)
    out = {
        "admissible": rep.overall.value, "c1": rep.c1.verdict.value, "c2": rep.c2.verdict.value,
        "c3": rep.c3.verdict.value, "I": rep.I_class, "gamma": rep.gamma, "Theta": rep.Theta,
    }
    if rep.thm4 is not None:
        out.update(poly_threshold=rep.thm4.r_threshold, poly_admissible=rep.thm4.admissible,
                   poly_agrees=rep.thm4_agrees)
    return out


def _base_row(point: dict, experiment: str) -> dict:
    row = {k: point.get(k) for k in ("n", "kappa", "p", "r", "phi", "a", "psi", "lam", "u0", "R")}
    if "terms" in point:
        row["terms"] = ";".join(f"{a:g}:{q:g}" for a, q in point["terms"])
    row["experiment"] = experiment
    row["spec_id"] = _spec_id(point)
    return row


def _task(args) -> tuple[list[dict], Optional[dict]]:
    """One spec and all its R values. Returns (rows, plot data)."""
    cfg, points = args
    rows, plot = [], None
    try:
        geometry, spec = _spec_for(points[0])
        adm = _admissibility_columns(spec)
    except Exception as exc:  # recorded, never aborts the sweep
        return [dict(_base_row(p, cfg.experiment), error=f"{type(exc).__name__}: {exc}") for p in points], None
    blocked = (
        cfg.experiment != "admissibility" and not cfg.negative_test and adm["admissible"] != Verdict.HOLDS.value
    )
    solution = None
    if cfg.experiment == "gradient" and not blocked:
        an = cfg.annulus
        try:
            solution = solve_annulus(geometry, spec, float(an["r_in"]), float(an["r_out"]),
                                     tuple(map(float, an["boundary"])), atol=cfg.atol, rtol=cfg.rtol)
        except Exception as exc:
            solution = exc
    xs, ys = [], []
    for point in points:
        row = _base_row(point, cfg.experiment)
        row.update(adm)
        if blocked:
            row["error"] = f"not admissible (overall={adm['admissible']}); set negative_test to run anyway"
            rows.append(row)
            continue
        try:
            _measure(cfg, geometry, spec, point, solution, row)
        except Exception as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
        if cfg.experiment == "gradient" and row.get("fitted_C") is not None:
            xs.append(point["R"])
            ys.append(row["fitted_C"])
        if cfg.experiment == "admissibility":
            xs.append(point.get("r", 0.0))
            ys.append(1.0 if adm["admissible"] == "holds" else 0.0)
    if cfg.experiment in ("gradient", "admissibility"):
        plot = {"label": _spec_id(points[0]) + f" lam={points[0]['lam']:g}", "x": xs, "y": ys}
    if cfg.experiment in ("liouville", "eigen") and rows and "_profile" in rows[-1]:
        plot = rows[-1].pop("_profile")
    for row in rows:
        row.pop("_profile", None)
    return rows, plot


def _measure(cfg: SweepConfig, geometry, spec, point, solution, row):
    R = float(point["R"])
    if cfg.experiment == "admissibility":
        return
    if cfg.experiment == "gradient":
        if isinstance(solution, Exception):
            raise solution
        an = cfg.annulus
        center = float(an.get("center_scale", 4.0)) * R + float(an.get("center_shift", 0.0))
        est = gradient_estimate_check(solution, center, R)
        h = harnack_check(solution, R, center)
        row.update(status=solution.status, center=center, sup_ratio=est.sup_ratio, bound_shape=est.bound_shape,
                   fitted_C=est.fitted_C, harnack_ratio=h.ratio, harnack_exponent=h.exponent)
    elif cfg.experiment == "liouville":
        lv = cfg.liouville
        rep = liouville_probe(geometry, spec, R, u0=float(point["u0"]), growth=float(lv.get("growth", 1e6)),
                              atol=cfg.atol, rtol=cfg.rtol)
        row.update(branch=rep.branch, r_event=rep.r_event)
    elif cfg.experiment == "eigen":
        br = cfg.eigen.get("bracket")
        if br is None:
            raise ConfigError("eigen sweep needs [sweep.eigen] bracket")
        lam, sol = solve_eigen(geometry, spec, R, float(point["u0"]), tuple(map(float, br)),
                               atol=cfg.atol, rtol=cfg.rtol)
        row.update(eigenvalue=lam, status=sol.status)
        row["_profile"] = {"label": f"{row['spec_id']} R={R:g}", "x": list(sol.grid), "y": list(sol.u)}


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_svg(path: Path, cfg: SweepConfig, series: list[dict]):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "quasieig"
    fig, ax = plt.subplots(figsize=(6, 4))
    for s in series:
        if s and s["x"]:
            ax.plot(s["x"], s["y"], marker="o", ms=3, label=s["label"])
    labels = {
        "gradient": ("R", "fitted C"),
        "admissibility": ("r", "admissible (1 = holds)"),
        "eigen": ("r", "u"),
        "liouville": ("r", "u"),
    }[cfg.experiment]
    ax.set_xlabel(labels[0])
    ax.set_ylabel(labels[1])
    if cfg.experiment == "gradient":
        ax.set_xscale("log", base=2)
    ax.set_title(cfg.name)
    if len(series) <= 12 and any(series):
        ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def run_sweep(config: SweepConfig, out_dir: str | Path, timestamp: bool = True, jobs: int = 1) -> dict[str, Path]:
    """Run the sweep and write ``<name>.csv`` (and ``<name>.svg`` if requested).

    Rows are grouped per spec (all R values share one solve when possible)
    and always written in grid order, also with ``jobs > 1``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    points = config.points()
    groups: dict[tuple, list[dict]] = {}
    for pt in points:
        key = tuple((k, _freeze(v)) for k, v in pt.items() if k != "R" or config.experiment in ("liouville", "eigen"))
        groups.setdefault(key, []).append(pt)
    tasks = [(config, g) for g in groups.values()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]

    buf = io.StringIO()
    buf.write(f"# quasieig sweep csv v{CSV_VERSION}\n")
    buf.write(f"# name: {config.name}\n")
    buf.write(f"# experiment: {config.experiment}\n")
    if timestamp:
        buf.write(f"# generated: {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    i = 0
    series = []
    for rows, plot in results:
        series.append(plot)
        for row in rows:
            row["row"] = i
            i += 1
            writer.writerow({k: _fmt(row.get(k)) for k in SWEEP_COLUMNS})
    paths = {"csv": out_dir / f"{config.name}.csv"}
    paths["csv"].write_text(buf.getvalue())
    if config.plot:
        paths["svg"] = out_dir / f"{config.name}.svg"
        _write_svg(paths["svg"], config, [s for s in series if s])
    return paths


def _freeze(v):
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    return v
