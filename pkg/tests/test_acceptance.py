"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

The lines are collected in ``conftest.ACCEPTANCE`` and printed in the
terminal summary, so ``pytest tests/test_acceptance.py`` ends with a
nine-line verdict table.
"""

import itertools
import math
import time

import numpy as np
import pytest

from _oracles import (
    hyperbolic_annulus_profile,
    j0_first_zero,
    log_coth_half,
    single_power_threshold,
)
from conftest import ACCEPTANCE
from quasieig.admissibility import (
    ProblemSpec,
    Verdict,
    as_poly_plaplace,
    full_report,
    porous_problem,
    thm4_range,
)
from quasieig.cli import main as cli_main
from quasieig.radial_solver import (
    FluxMonotonicityError,
    ModelGeometry,
    flux_map,
    invert_flux,
    solve_annulus,
    solve_eigen,
    solve_ivp,
)
from quasieig.scalar_family import PowerOfMonomialSum, degree, degree_bounds, degree_slope, monomial, msum
from quasieig.verifier import gradient_estimate_check, liouville_probe

ONE = monomial(0.0)
EPS = np.finfo(float).eps


def record(k: int, ok: bool, title: str, detail: str):
    ACCEPTANCE[k] = f"criterion {k} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    print(ACCEPTANCE[k])


def laplace(n=3, lam=0.0, K=0.0):
    return ProblemSpec(n=n, K=K, lam=lam, phi=ONE, a=ONE, psi=ONE)


# -- 1 -----------------------------------------------------------------------


def test_criterion_1_degree_calculus():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    outside = 0
    for _ in range(1000):
        p = rng.uniform(1.05, 6.0)
        m = rng.integers(1, 5)
        qs = np.sort(rng.uniform(0.05, 4.0, m))
        if np.any(np.diff(qs) <= 0):
            continue
        t = 10.0 ** rng.uniform(-8, 8)
        spec = porous_problem(3, 0.0, 1.0, p, [(rng.uniform(0.1, 10), q) for q in qs], 1.0)
        worst = max(worst, abs(degree(spec.phi, t) - (p - 2)) / max(1.0, abs(p - 2)))
        b = degree_bounds(spec.a, 1)
        lo, hi = (qs[0] - 1) * (p - 1), (qs[-1] - 1) * (p - 1)
        worst = max(worst, abs(b.inf - lo) / max(1.0, abs(lo)), abs(b.sup - hi) / max(1.0, abs(hi)))
        d = degree(spec.a, t)
        slack = 4 * EPS * max(1.0, abs(lo), abs(hi))
        outside += not (b.certified and lo - slack <= d <= hi + slack)
    elapsed = time.perf_counter() - t0
    ok = worst <= 4 * EPS and outside == 0 and elapsed < 1.0
    record(1, ok, "degree calculus", f"max rel err {worst:.1e}, {outside} outside bounds, {elapsed:.2f}s")
    assert worst <= 4 * EPS and outside == 0
    assert elapsed < 1.0


# -- 2 -----------------------------------------------------------------------


def _weighted_moments(cs, rs, t):
    """Mean and variance of the exponents under weights c_i t^r_i, computed directly."""
    logw = np.log(cs) + rs * math.log(t)
    w = np.exp(logw - logw.max())
    w /= w.sum()
    mean = float(w @ rs)
    return mean, float(w @ (rs - mean) ** 2)


def test_criterion_2_monomial_sum_mean_exponent():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    violations = 0
    worst_oracle = 0.0
    for _ in range(10_000):
        m = rng.integers(1, 6)
        rs = np.sort(rng.uniform(-4, 4, m))
        cs = 10.0 ** rng.uniform(-2, 2, m)
        t = 10.0 ** rng.uniform(-6, 6)
        g = msum(list(zip(cs, rs)))
        rs_eff = g.exponents
        r1, rm = rs_eff[0], rs_eff[-1]
        f = float(degree(g, t)) / 2.0  # t g'/g
        tf = float(degree_slope(g, t)) / 2.0  # t d/dt (t g'/g)
        scale = max(1.0, abs(r1), abs(rm))
        violations += not (r1 - 1e-12 * scale <= f <= rm + 1e-12 * scale)
        violations += not (-1e-12 * scale ** 2 <= tf <= (rm - r1) ** 2 / 2 + 1e-12 * scale ** 2)
        mean, var = _weighted_moments(g.coefficients, rs_eff, t)
        worst_oracle = max(worst_oracle, abs(f - mean) / scale, abs(tf - var) / scale ** 2)
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and worst_oracle < 1e-10 and elapsed < 5.0
    record(2, ok, "monomial-sum mean-exponent bounds",
           f"{violations} violations in 1e4 sums, oracle gap {worst_oracle:.1e}, {elapsed:.2f}s")
    assert violations == 0 and worst_oracle < 1e-10
    assert elapsed < 5.0


# -- 3 -----------------------------------------------------------------------


def test_criterion_3_threshold_reproduction():
    eps = np.nextafter(3.0, 0.0)
    flip = (full_report(porous_problem(3, 0.0, 1.0, 2.0, ((1.0, 1.0),), eps)).overall,
            full_report(porous_problem(3, 0.0, 1.0, 2.0, ((1.0, 1.0),), 3.0)).overall)
    flip_ok = flip == (Verdict.HOLDS, Verdict.FAILS)

    points = worst = contradictions = undecided = 0
    for n, p, q, lam in itertools.product((2, 3, 4, 5, 6), (1.5, 2.0, 3.0, 4.0), (-1.0, 0.5, 1.0, 2.0, 3.0), (1.0, -1.0)):
        thr = single_power_threshold(n, p, q, nonneg=lam > 0)
        for off in (-1.0, -1e-3, 1e-3, 1.0):
            r = thr + off
            spec = porous_problem(n, 0.0, lam, p, ((math.copysign(1.0, q), q),), r)
            rng = thm4_range(as_poly_plaplace(spec))
            worst = max(worst, abs(rng.r_threshold - thr) / max(1.0, abs(thr)))
            rep = full_report(spec)
            if rep.overall is Verdict.HOLDS and not rng.admissible:
                contradictions += 1
            elif rep.overall is Verdict.FAILS and rng.admissible:
                contradictions += 1
            undecided += rep.overall is Verdict.UNKNOWN
            points += 1
    ok = flip_ok and points >= 500 and worst <= 1e-12 and contradictions == 0
    record(3, ok, "admissibility threshold",
           f"flip at 3: {flip_ok}, {points} grid points, max rel err {worst:.1e}, "
           f"{contradictions} contradictions, {undecided} undecided")
    assert flip_ok
    assert points >= 500 and worst <= 1e-12 and contradictions == 0


# -- 4 -----------------------------------------------------------------------


def test_criterion_4_eigenvalue_oracles():
    t0 = time.perf_counter()
    lam3, _ = solve_eigen(ModelGeometry(3), laplace(), 1.0, 1.0, (5.0, 15.0))
    t3 = time.perf_counter() - t0
    t0 = time.perf_counter()
    lam2, _ = solve_eigen(ModelGeometry(2), laplace(n=2), 1.0, 1.0, (3.0, 8.0))
    t2 = time.perf_counter() - t0
    j = j0_first_zero()
    e3, e2 = abs(lam3 - math.pi ** 2), abs(lam2 - j * j)
    ok = e3 <= 1e-7 and e2 <= 1e-6 and t3 < 2 and t2 < 2
    record(4, ok, "principal Dirichlet eigenvalues",
           f"n=3 err {e3:.1e} in {t3:.2f}s, n=2 err {e2:.1e} in {t2:.2f}s")
    assert e3 <= 1e-7 and e2 <= 1e-6
    assert t3 < 2 and t2 < 2


# -- 5 -----------------------------------------------------------------------


def test_criterion_5_closed_form_profiles():
    errs = {}
    r = np.linspace(0.0, 3.0, 20)
    sol = solve_ivp(ModelGeometry(3), laplace(lam=1.0), 1.0, 3.0)
    errs["sin(r)/r"] = np.max(np.abs(sol(r)[0] / np.sinc(r / np.pi) - 1))

    r = np.linspace(0.0, 10.0, 20)
    sol = solve_ivp(ModelGeometry(3), laplace(lam=-1.0), 1.0, 10.0)
    exact = np.where(r > 0, np.sinh(r) / np.where(r > 0, r, 1.0), 1.0)
    errs["sinh(r)/r"] = np.max(np.abs(sol(r)[0] / exact - 1))

    r = np.linspace(1.0, 10.0, 20)
    sol = solve_annulus(ModelGeometry(3), laplace(), 1.0, 10.0, (1.0, 0.1))
    errs["1/r"] = np.max(np.abs(sol(r)[0] * r - 1))

    r = np.linspace(0.5, 4.0, 20)
    sol = solve_annulus(ModelGeometry(2, 1.0), laplace(n=2, K=1.0), 0.5, 4.0, (3.0, 1.0))
    oracle = hyperbolic_annulus_profile(0.5, 4.0, 3.0, 1.0)
    errs["hyperbolic annulus"] = np.max(np.abs(sol(r)[0] / oracle(r) - 1))

    ok = all(e <= 1e-6 for e in errs.values())
    record(5, ok, "closed-form profiles", ", ".join(f"{k} {v:.1e}" for k, v in errs.items()))
    assert ok, errs


# -- 6 -----------------------------------------------------------------------


def test_criterion_6_gradient_estimate_constant():
    Rs = [2.0 ** k for k in range(7)]
    sol = solve_annulus(ModelGeometry(3), laplace(), 1.0, 400.0, (1.0, 1.0 / 400.0))
    euclid = [gradient_estimate_check(sol, 4 * R, R).fitted_C for R in Rs]
    third = max(abs(C * 3 - 1) for C in euclid)

    g = ModelGeometry(2, 1.0)
    sol = solve_annulus(g, laplace(n=2, K=1.0), 1.0, 261.0, (log_coth_half(1.0), log_coth_half(261.0)))
    hyper = [gradient_estimate_check(sol, 2 * R + 1, R).fitted_C for R in Rs]

    spread_e, spread_h = max(euclid) / min(euclid), max(hyper) / min(hyper)
    ok = spread_e <= 4 and spread_h <= 4 and third <= 1e-6
    record(6, ok, "gradient-estimate constant",
           f"1/r spread {spread_e:.6f} with |3C-1| <= {third:.1e}, hyperbolic spread {spread_h:.3f}")
    assert spread_e <= 4 and spread_h <= 4
    assert third <= 1e-6


# -- 7 -----------------------------------------------------------------------


def liouville_corpus():
    """Admissible single-power specs on flat space, both signs of lam."""
    out = []
    for p, q, n, lam in itertools.product((1.5, 2.0, 3.0), (0.5, 1.0, 2.0), (2, 3, 4), (1.0, -1.0)):
        base = q * (p - 1)
        if lam > 0:
            hi = single_power_threshold(n, p, q)
            rs = (0.5 * base, 0.5 * (base + hi))
        else:
            rs = (1.5 * base, 3.0 * base)
        out.extend(porous_problem(n, 0.0, lam, p, ((1.0, q),), r) for r in rs)
    return out


def test_criterion_7_liouville_dichotomy():
    corpus = liouville_corpus()
    admissible = [s for s in corpus if full_report(s).overall is Verdict.HOLDS]
    branches = {}
    bad = []
    for spec in admissible:
        rep = liouville_probe(ModelGeometry(spec.n), spec, 200.0)
        branches[rep.branch] = branches.get(rep.branch, 0) + 1
        if rep.branch not in ("hit_zero", "unbounded"):
            bad.append((spec.name, spec.n, spec.lam, str(spec.a), str(spec.psi), rep.branch))
    rep = liouville_probe(ModelGeometry(3), laplace(lam=1.0), 10.0)
    pi_err = abs(rep.r_event - math.pi) if rep.branch == "hit_zero" else math.inf
    ok = len(admissible) >= 50 and len(admissible) == len(corpus) and not bad and pi_err <= 1e-6
    record(7, ok, "Liouville dichotomy",
           f"{len(admissible)}/{len(corpus)} admissible, branches {dict(sorted(branches.items()))}, "
           f"zero at pi err {pi_err:.1e}")
    assert len(admissible) >= 50 and len(admissible) == len(corpus)
    assert not bad, bad
    assert pi_err <= 1e-6


# -- 8 -----------------------------------------------------------------------


def random_flux_spec(rng):
    m = rng.integers(1, 4)
    ks = np.sort(rng.uniform(-0.45, 1.5, m))
    phi = msum(list(zip(10.0 ** rng.uniform(-1, 1, m), ks)))
    a = msum(list(zip(10.0 ** rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2))))
    if rng.random() < 0.3:
        phi = PowerOfMonomialSum(msum([(1.0, 0.0), (rng.uniform(0.1, 3), rng.uniform(0.1, 1))]), rng.uniform(0.2, 1.5))
    return ProblemSpec(n=3, K=0.0, lam=0.0, phi=phi, a=a, psi=ONE)


def test_criterion_8_flux_roundtrip():
    rng = np.random.default_rng(8)
    worst = 0.0
    total = 0
    t0 = time.perf_counter()
    for _ in range(100):
        spec = random_flux_spec(rng)
        s = 10.0 ** rng.uniform(-3, 3, 1000)
        v = rng.choice([-1.0, 1.0], 1000) * 10.0 ** rng.uniform(-6, 6, 1000)
        m = flux_map(spec, s, v)
        back = invert_flux(spec, s, m)
        worst = max(worst, float(np.max(np.abs(back - v) / np.abs(v))))
        total += v.size
    elapsed = time.perf_counter() - t0
    raised = False
    try:
        invert_flux(ProblemSpec(n=3, K=0, lam=0, phi=monomial((0.8 - 2) / 2), a=ONE, psi=ONE), 1.0, 1.0)
    except FluxMonotonicityError:
        raised = True
    ok = total >= 100_000 and worst <= 1e-10 and raised
    record(8, ok, "flux inversion roundtrip",
           f"{total} roundtrips, max rel err {worst:.1e}, {elapsed:.2f}s, p<1 rejected: {raised}")
    assert total >= 100_000 and worst <= 1e-10
    assert raised


# -- 9 -----------------------------------------------------------------------


SWEEP = """
[sweep]
name = "det"
experiment = "{experiment}"
plot = true
[sweep.grid]
n = [2, 3]
p = [1.5, 2.0, 3.0]
q = [0.5, 1.0]
r = [0.25, 1.0, 2.9, 3.0, 3.5]
lam = [1.0, -1.0]
R = [20.0]
"""


@pytest.mark.parametrize("experiment", ["admissibility", "liouville"])
def test_criterion_9_deterministic_sweeps(tmp_path, experiment):
    cfg = tmp_path / "sweep.toml"
    cfg.write_text(SWEEP.format(experiment=experiment))
    blobs = []
    for run in ("a", "b"):
        out = tmp_path / run
        assert cli_main(["sweep", "--config", str(cfg), "--out", str(out), "--no-timestamp"]) == 0
        blobs.append(((out / "det.csv").read_bytes(), (out / "det.svg").read_bytes()))
    same = blobs[0] == blobs[1]
    nrows = blobs[0][0].count(b"\n")
    prev = ACCEPTANCE.get(9, "")
    ok = same and "FAIL" not in prev
    detail = f"{experiment} csv+svg identical: {same}, {nrows} lines"
    if prev:
        detail = prev[prev.index("(") + 1:-1] + "; " + detail
    record(9, ok, "deterministic sweep output", detail)
    assert same
