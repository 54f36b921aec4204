"""Fitted gradient-estimate constants on two exact harmonic families.

For u = 1/r on an annulus of R^3 and balls of radius R about a point at
distance 4R from the pole, ``sup |u'|/u`` over the ball is ``4/(3c)``. The
bound shape is ``(1 + sqrt(K) R)/R``, so the fitted constant is exactly 1/3
for every R. The hyperbolic family ``log coth(r/2)`` on H^2 gives a fitted
constant that stays bounded as R grows. The Liouville probe closes the
tour: sin(r)/r hits zero at pi and sinh(r)/r grows without bound.

Run with ``python demos/gradient_constant.py``.
"""

import math

import numpy as np

from quasieig.admissibility import ProblemSpec
from quasieig.radial_solver import ModelGeometry, solve_annulus
from quasieig.scalar_family import monomial
from quasieig.verifier import gradient_estimate_check, harnack_check, liouville_probe

ONE = monomial(0.0)


def laplace(n: int, lam: float = 0.0, K: float = 0.0) -> ProblemSpec:
    return ProblemSpec(n=n, K=K, lam=lam, phi=ONE, a=ONE, psi=ONE)


def log_coth_half(r):
    return np.log1p(2.0 / np.expm1(r))


if __name__ == "__main__":
    Rs = [2.0 ** k for k in range(7)]
    sol = solve_annulus(ModelGeometry(3), laplace(3), 1.0, 400.0, (1.0, 1 / 400))
    print("u = 1/r in R^3, center 4R")
    for R in Rs:
        est = gradient_estimate_check(sol, 4 * R, R)
        h = harnack_check(sol, R, 4 * R)
        print(f"  R={R:5g}  sup|u'|/u={est.sup_ratio:.10f}  C={est.fitted_C:.10f}  sup/inf={h.ratio:.6f}")

    sol = solve_annulus(ModelGeometry(2, 1.0), laplace(2, K=1.0), 1.0, 261.0,
                        (float(log_coth_half(1.0)), float(log_coth_half(261.0))))
    print("u = log coth(r/2) in H^2, center 2R + 1")
    for R in Rs:
        est = gradient_estimate_check(sol, 2 * R + 1, R)
        print(f"  R={R:5g}  sup|u'|/u={est.sup_ratio:.10f}  C={est.fitted_C:.6f}")

    print("Liouville probe, Laplacian in R^3")
    for lam in (1.0, -1.0, 0.0):
        rep = liouville_probe(ModelGeometry(3), laplace(3, lam), 40.0)
        print(f"  lam={lam:+g}: {rep.branch}  r_event={rep.r_event}")
    print(f"  pi = {math.pi!r}")
