"""Admissibility of Delta_p(u^q) + lam u^r = 0 as r crosses its threshold.

For a single power the admissible exponents are ``r < ((n+1)q + 2|q|)(p-1)/(n-1)``
when lam > 0. The exact-arithmetic checker and the closed-form range are
printed side by side; for p = 2, q = 1, n = 3 the flip sits at r = 3.

Run with ``python demos/threshold_flip.py``.
"""

import numpy as np

from quasieig.admissibility import as_poly_plaplace, full_report, porous_problem, thm4_range


def table(n: int, p: float, q: float, lam: float, rs):
    print(f"n={n} p={p:g} q={q:g} lam={lam:+g}")
    print(f"  {'r':>22}  {'checker':>8}  {'closed form':>11}  threshold")
    for r in rs:
        spec = porous_problem(n, 0.0, lam, p, ((np.sign(q), q),), r)
        rep = full_report(spec)
        rng = thm4_range(as_poly_plaplace(spec))
        print(f"  {r!r:>22}  {rep.overall.value:>8}  {str(rng.admissible):>11}  {rng.r_threshold:.12g}")


if __name__ == "__main__":
    table(3, 2.0, 1.0, 1.0, [1.0, 2.5, 2.99, float(np.nextafter(3.0, 0.0)), 3.0, 3.01, 4.0])
    print()
    table(4, 3.0, 0.5, -1.0, [0.5, 0.99, 1.0, float(np.nextafter(1.0, 2.0)), 1.01, 2.0])
    print()
    # full report for one admissible case: gamma, Theta and the derived constants
    print(full_report(porous_problem(3, 0.0, -1.0, 2.0, ((1.0, 1.0),), 1.5)).format())
