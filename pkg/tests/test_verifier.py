import math

import numpy as np
import pytest

from _oracles import log_coth_half, sinh_over_r_crossing
from quasieig.admissibility import ProblemSpec, porous_problem
from quasieig.config import ConfigError
from quasieig.radial_solver import ModelGeometry, solve_annulus, solve_ivp
from quasieig.scalar_family import monomial
from quasieig.verifier import (
    BallError,
    SweepConfig,
    gradient_estimate_check,
    harnack_check,
    liouville_probe,
    run_sweep,
)

ONE = monomial(0.0)


def laplace(n=3, lam=0.0, K=0.0):
    return ProblemSpec(n=n, K=K, lam=lam, phi=ONE, a=ONE, psi=ONE, name="laplace")


@pytest.fixture(scope="module")
def one_over_r():
    return solve_annulus(ModelGeometry(3), laplace(), 1.0, 400.0, (1.0, 1.0 / 400.0))


@pytest.fixture(scope="module")
def hyperbolic_decay():
    return solve_annulus(
        ModelGeometry(2, 1.0), laplace(n=2, K=1.0), 1.0, 261.0, (log_coth_half(1.0), log_coth_half(261.0))
    )


def test_constant_solution_has_zero_ratio():
    sol = solve_ivp(ModelGeometry(3), laplace(), 1.0, 100.0)
    for c, R in [(0.0, 5.0), (30.0, 10.0), (50.0, 25.0)]:
        assert gradient_estimate_check(sol, c, R).sup_ratio == 0.0
    h = harnack_check(sol, 10.0)
    assert h.ratio == 1.0 and h.exponent == 0.0


@pytest.mark.parametrize("c", [4.0, 16.0, 100.0, 256.0])
def test_one_over_r_fitted_constant(one_over_r, c):
    est = gradient_estimate_check(one_over_r, c, c / 4)
    assert est.sup_ratio == pytest.approx(4 / 3 / c, rel=1e-6)
    assert est.bound_shape == pytest.approx(4 / c)
    assert est.fitted_C == pytest.approx(1 / 3, rel=1e-6)
    assert est.argmax == pytest.approx(3 * c / 4, rel=1e-9)


def test_ball_margin_enforced(one_over_r):
    with pytest.raises(BallError):
        gradient_estimate_check(one_over_r, 3.0, 1.5)  # needs radius down to 0
    with pytest.raises(BallError):
        gradient_estimate_check(one_over_r, 390.0, 8.0)


def test_hyperbolic_ratio_stabilises(hyperbolic_decay):
    # sup |u'|/u -> 1 far out, bound shape -> sqrt(K) = 1
    far = gradient_estimate_check(hyperbolic_decay, 200.0, 10.0)
    assert far.sup_ratio == pytest.approx(1.0, rel=1e-6)
    Cs = [gradient_estimate_check(hyperbolic_decay, 2 * R + 1, R).fitted_C for R in (1, 2, 4, 8, 16, 32, 64)]
    assert max(Cs) / min(Cs) <= 4


def test_harnack_one_over_r():
    sol = solve_annulus(ModelGeometry(3), laplace(), 1.0, 3.0, (1.0, 1 / 3))
    h = harnack_check(sol, 1.0, center=2.0)
    assert h.ratio == pytest.approx(3.0, rel=1e-8)
    assert h.exponent == pytest.approx(math.log(3.0), rel=1e-8)


def test_harnack_sinh_grows_linearly():
    sol = solve_ivp(ModelGeometry(3), laplace(lam=-1.0), 1.0, 40.0)
    exps = [harnack_check(sol, R).exponent for R in (10.0, 20.0, 30.0)]
    for R, e in zip((10.0, 20.0, 30.0), exps):
        assert e == pytest.approx(math.log(math.sinh(R) / R), rel=1e-6)
    assert exps[2] - exps[1] == pytest.approx(exps[1] - exps[0], rel=0.05)


def test_liouville_examples():
    g = ModelGeometry(3)
    rep = liouville_probe(g, laplace(lam=1.0), 10.0)
    assert rep.branch == "hit_zero" and rep.r_event == pytest.approx(math.pi, abs=1e-6)
    rep = liouville_probe(g, laplace(lam=-1.0), 40.0)
    assert rep.branch == "unbounded"
    assert rep.r_event == pytest.approx(sinh_over_r_crossing(1e6), abs=1e-6)
    assert liouville_probe(g, laplace(lam=0.0), 10.0).branch == "trivial"
    with pytest.raises(ValueError):
        liouville_probe(ModelGeometry(3, 1.0), laplace(lam=1.0), 10.0)


def test_liouville_inconclusive_when_range_short():
    rep = liouville_probe(ModelGeometry(3), laplace(lam=-1.0), 2.0)
    assert rep.branch == "inconclusive" and not rep.consistent


# -- sweeps ------------------------------------------------------------------


def test_empty_grid_writes_header_only(tmp_path):
    cfg = SweepConfig(experiment="admissibility", grid={"p": [2.0], "r": []}, name="empty")
    path = run_sweep(cfg, tmp_path, timestamp=False)["csv"]
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# quasieig sweep csv v")
    assert lines[-1].startswith("row,")


def _read(path):
    import csv

    with open(path) as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


def test_threshold_flip_sweep(tmp_path):
    n, p, q = 3, 2.0, 1.0
    thr = ((n + 1) * q + 2 * abs(q)) * (p - 1) / (n - 1)
    rs = [0.5, 1.0, 2.0, 2.9, float(np.nextafter(thr, 0)), thr, 3.1, 4.0]
    cfg = SweepConfig(experiment="admissibility", grid={"n": [n], "p": [p], "q": [q], "r": rs, "lam": [1.0]})
    rows = _read(run_sweep(cfg, tmp_path, timestamp=False)["csv"])
    verdicts = [row["admissible"] for row in rows]
    assert verdicts == ["holds"] * 5 + ["fails"] * 3
    assert all(row["poly_agrees"] == "true" for row in rows)


def test_gradient_sweep_reproduces_one_third(tmp_path):
    cfg = SweepConfig(
        experiment="gradient", grid={"n": [3], "p": [2.0], "q": [1.0], "R": [1.0, 4.0, 16.0, 64.0]},
        annulus={"r_in": 1.0, "r_out": 400.0, "boundary": [1.0, 0.0025], "center_scale": 4.0}, plot=True,
    )
    paths = run_sweep(cfg, tmp_path, timestamp=False)
    rows = _read(paths["csv"])
    assert [float(r["fitted_C"]) for r in rows] == pytest.approx([1 / 3] * 4, rel=1e-6)
    assert paths["svg"].read_text().startswith("<?xml")


def test_sweep_errors_are_recorded(tmp_path):
    cfg = SweepConfig(
        experiment="gradient", grid={"n": [3], "p": [2.0], "q": [1.0], "R": [1.0, 200.0]},
        annulus={"r_in": 1.0, "r_out": 400.0, "boundary": [1.0, 0.0025], "center_scale": 4.0},
    )
    rows = _read(run_sweep(cfg, tmp_path, timestamp=False)["csv"])
    assert rows[0]["error"] == "" and "BallError" in rows[1]["error"]


def test_sweep_blocks_inadmissible_specs(tmp_path):
    cfg = SweepConfig(experiment="liouville", grid={"n": [3], "p": [2.0], "q": [1.0], "r": [5.0], "lam": [1.0]})
    rows = _read(run_sweep(cfg, tmp_path, timestamp=False)["csv"])
    assert "not admissible" in rows[0]["error"]
    cfg.negative_test = True
    rows = _read(run_sweep(cfg, tmp_path, timestamp=False)["csv"])
    assert rows[0]["error"] == "" and rows[0]["branch"] == "inconclusive"


def test_critical_exponent_keeps_positive_solution():
    # r = 5 is critical in dimension 3: (1 + r^2/3)^(-1/2) is a positive entire solution
    spec = porous_problem(3, 0.0, 1.0, 2.0, ((1.0, 1.0),), 5.0)
    sol = solve_ivp(ModelGeometry(3), spec, 1.0, 100.0)
    r = np.linspace(0.0, 100.0, 20)
    np.testing.assert_allclose(sol(r)[0], (1 + r * r / 3) ** -0.5, rtol=1e-5)
    rep = liouville_probe(ModelGeometry(3), spec, 100.0)
    assert rep.branch == "inconclusive" and rep.u_min == pytest.approx(3 ** 0.5 / 100, rel=1e-3)


def test_sweep_parallel_matches_serial(tmp_path):
    grid = {"n": [2, 3], "p": [1.5, 2.0, 3.0], "q": [1.0], "r": [0.5], "lam": [1.0, -1.0], "R": [30.0]}
    cfg = SweepConfig(experiment="liouville", grid=grid)
    a = run_sweep(cfg, tmp_path / "a", timestamp=False)["csv"].read_bytes()
    b = run_sweep(cfg, tmp_path / "b", timestamp=False, jobs=3)["csv"].read_bytes()
    assert a == b


def test_eigen_sweep(tmp_path):
    cfg = SweepConfig(experiment="eigen", grid={"n": [3], "p": [2.0], "q": [1.0], "lam": [1.0], "R": [1.0, 2.0]},
                      eigen={"bracket": [1.0, 15.0]}, plot=True)
    rows = _read(run_sweep(cfg, tmp_path, timestamp=False)["csv"])
    assert float(rows[0]["eigenvalue"]) == pytest.approx(math.pi ** 2, abs=1e-7)
    assert float(rows[1]["eigenvalue"]) == pytest.approx(math.pi ** 2 / 4, abs=1e-7)


def test_sweep_config_validation():
    with pytest.raises(ConfigError):
        SweepConfig(experiment="nope", grid={})
    with pytest.raises(ConfigError):
        SweepConfig(experiment="admissibility", grid={"p": [2.0], "phi": ["pow(t, 0)"]})
    with pytest.raises(ConfigError):
        SweepConfig.from_dict({"experiment": "gradient", "bogus": 1})
    with pytest.raises(ConfigError):
        SweepConfig(experiment="admissibility", grid={"n": 3})


def test_explicit_function_grid(tmp_path):
    cfg = SweepConfig(experiment="admissibility",
                      grid={"phi": ["pow(t, 0)", "exp(1.0*t)"], "lam": [1.0]})
    rows = _read(run_sweep(cfg, tmp_path, timestamp=False)["csv"])
    assert rows[0]["admissible"] == "holds" and rows[1]["admissible"] != "holds"
