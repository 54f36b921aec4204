"""Reference values computed independently of the package.

Nothing here imports quasieig: every oracle is a closed form, a series or a
plain bisection.
"""

import math


def bessel_j0(x: float) -> float:
    """J0 from its power series sum (-1)^k (x/2)^(2k) / (k!)^2."""
    term, total, k = 1.0, 1.0, 0
    q = -(x * x) / 4.0
    while True:
        k += 1
        term *= q / (k * k)
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)):
            return total


def bisect(f, lo: float, hi: float, tol: float = 1e-15) -> float:
    flo = f(lo)
    if flo * f(hi) > 0:
        raise ValueError("no sign change")
    while hi - lo > tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def j0_first_zero() -> float:
    return bisect(bessel_j0, 2.0, 3.0)


def sinh_over_r_crossing(level: float) -> float:
    """Radius where sinh(r)/r first reaches ``level``."""
    return bisect(lambda r: math.sinh(r) / r - level, 1.0, 100.0, tol=1e-14)


def log_coth_half(r):
    """int_r^inf ds / sinh(s) = log coth(r/2), a harmonic profile on H^2."""
    import numpy as np

    return np.log1p(2.0 / np.expm1(r))


def hyperbolic_annulus_profile(R1, R2, u1, u2):
    """u = A + B log tanh(r/2): radial harmonic on H^2 with u(R1)=u1, u(R2)=u2."""
    import numpy as np

    L1, L2 = math.log(math.tanh(R1 / 2.0)), math.log(math.tanh(R2 / 2.0))
    B = (u2 - u1) / (L2 - L1)
    A = u1 - B * L1
    return lambda r: A + B * np.log(np.tanh(np.asarray(r) / 2.0))


def single_power_threshold(n: int, p: float, q: float, nonneg: bool = True) -> float:
    """Largest admissible r (exclusive) for lam >= 0, or smallest for lam <= 0."""
    s = 2.0 if nonneg else -2.0
    return ((n + 1) * q + s * abs(q)) * (p - 1.0) / (n - 1)


def poly_gamma(n: int, p: float, q1: float, qm: float) -> float:
    return 4 * q1 ** 2 * (p - 1) ** 2 / (n - 1) ** 2 - 2 * (qm - q1) ** 2 * (p - 1) / (n - 1)


def c2_literal_gamma(n: int, p: float, q1: float, qm: float) -> float:
    """Lower bound of the C2 expression for the polynomial family (q1 > 0)."""
    return q1 ** 2 * (p - 1) ** 2 / (n - 1) - (p - 1) * (qm - q1) ** 2 / 2.0
