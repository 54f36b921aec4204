"""Principal Dirichlet eigenvalues of the ball by shooting.

The Laplacian on the unit ball has lam* = pi^2 in dimension 3 and
lam* = j_{0,1}^2 in dimension 2. The p-Laplacian eigenvalue is shown for
a few p together with the scaling lam*(R) = lam*(1) / R^p.

Run with ``python demos/eigenvalues.py``.
"""

import math
import time

from quasieig.admissibility import ProblemSpec
from quasieig.radial_solver import ModelGeometry, solve_eigen
from quasieig.scalar_family import monomial

ONE = monomial(0.0)


def plap(n: int, p: float) -> ProblemSpec:
    # Delta_p u + lam |u|^(p-2) u = 0
    return ProblemSpec(n=n, K=0.0, lam=1.0, phi=monomial((p - 2) / 2), a=ONE, psi=monomial((p - 2) / 2))


if __name__ == "__main__":
    for n, ref, label in [(3, math.pi ** 2, "pi^2"), (2, 2.404825557695773 ** 2, "j01^2")]:
        t0 = time.perf_counter()
        lam, _ = solve_eigen(ModelGeometry(n), plap(n, 2.0), 1.0, 1.0, (3.0, 15.0))
        print(f"n={n}: lam* = {lam:.12f}  {label} = {ref:.12f}  diff {lam - ref:.1e}  ({time.perf_counter() - t0:.2f}s)")
    print()
    for p in (1.5, 3.0, 4.0):
        lam1, _ = solve_eigen(ModelGeometry(3), plap(3, p), 1.0, 1.0, (1.0, 200.0))
        lam2, _ = solve_eigen(ModelGeometry(3), plap(3, p), 2.0, 1.0, (lam1 / 2 ** p / 2, lam1 / 2 ** p * 2))
        print(f"p={p:g}: lam*(1) = {lam1:.10f}  lam*(2) 2^p / lam*(1) = {lam2 * 2 ** p / lam1:.10f}")
