"""TOML configuration files.

Schema (every section optional unless the chosen subcommand needs it)::

    [geometry]
    n = 3                 # dimension, integer >= 2
    kappa = 0.0           # sectional curvature is -kappa

    [problem]             # either explicit functions ...
    phi = "pow(t, 0)"
    a = "pow(t, 0)"
    psi = "pow(t, 0)"
    lam = 1.0
    name = "laplace"
    # ... or the polynomial family Delta_p(sum a_i u^q_i) + lam u^r = 0
    # p = 2.0
    # terms = [[1.0, 1.0]]    # (a_i, q_i) pairs
    # r = 1.0

    [solver]
    atol = 1e-10
    rtol = 1e-8

    [solve]               # IVP: u0 and R; annulus: R1, R2 and boundary
    u0 = 1.0
    R = 5.0

    [eigen]
    R = 1.0
    u0 = 1.0
    bracket = [5.0, 15.0]

    [verify]              # kind = "gradient", "harnack" or "liouville"
    kind = "gradient"
    center = 4.0
    R = 1.0

    [sweep]               # see quasieig.verifier.SweepConfig
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .admissibility import ProblemSpec, porous_problem
from .radial_solver import DEFAULT_ATOL, DEFAULT_RTOL, ModelGeometry
from .scalar_family import parse

__all__ = ["ConfigError", "Config", "load_config", "build_problem", "single_term"]


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    raw: dict
    path: Optional[Path] = None
    geometry: Optional[ModelGeometry] = None
    problem: Optional[ProblemSpec] = None
    atol: float = DEFAULT_ATOL
    rtol: float = DEFAULT_RTOL
    sections: dict = field(default_factory=dict)

    def section(self, name: str) -> dict:
        sec = self.raw.get(name)
        if sec is None:
            raise ConfigError(f"config has no [{name}] section")
        return sec


def single_term(q: float) -> tuple[tuple[float, float], ...]:
    """Terms for ``Delta_p(sign(q) u^q)``; the sign keeps a_1 q_1 > 0."""
    return ((1.0 if q > 0 else -1.0, float(q)),)


def build_problem(section: dict, geometry: ModelGeometry) -> ProblemSpec:
    lam = float(section.get("lam", 0.0))
    name = str(section.get("name", ""))
    K = geometry.K
    if "p" in section:
        terms = section.get("terms")
        if terms is None:
            if "q" not in section:
                raise ConfigError("polynomial problem needs 'terms' or 'q'")
            terms = single_term(section["q"])
        terms = tuple((float(a), float(q)) for a, q in terms)
        return porous_problem(geometry.n, K, lam, float(section["p"]), terms, float(section.get("r", 1.0)), name=name)
    funcs = {k: parse(str(section.get(k, "pow(t, 0)"))) for k in ("phi", "a", "psi")}
    return ProblemSpec(n=geometry.n, K=K, lam=lam, name=name, **funcs)


def load_config(path: str | Path) -> Config:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return from_dict(raw, path)


def from_dict(raw: dict[str, Any], path: Optional[Path] = None) -> Config:
    cfg = Config(raw=raw, path=path)
    solver = raw.get("solver", {})
    cfg.atol = float(solver.get("atol", DEFAULT_ATOL))
    cfg.rtol = float(solver.get("rtol", DEFAULT_RTOL))
    try:
        if "geometry" in raw:
            g = raw["geometry"]
            cfg.geometry = ModelGeometry(int(g.get("n", 3)), float(g.get("kappa", 0.0)))
        if "problem" in raw:
            if cfg.geometry is None:
                raise ConfigError("[problem] needs a [geometry] section")
            cfg.problem = build_problem(raw["problem"], cfg.geometry)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg
