"""Radial reduction on rotationally symmetric model manifolds.

On the model ``dr^2 + w(r)^2 g_{S^{n-1}}`` with ``w(r) = r`` (flat) or
``w(r) = sinh(sqrt(kappa) r)/sqrt(kappa)`` a radial solution of the
eigenproblem satisfies

    (J a(u^2) phi(u'^2) u')' = -lam J psi(u^2) u,     J = w^(n-1).

The state is ``(u, F)`` with the flux ``F = J a(u^2) phi(u'^2) u'``. The slope
is recovered by inverting ``v -> a(s) phi(v^2) v``, which is strictly
monotone exactly when the degree of phi stays above -1. Working with the
flux keeps the equation conservative and never divides by J(0) = 0.

For p != 2 the radial problem may have several solutions through degenerate
points; the integrator follows the flux-continuous branch and makes no
uniqueness claim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp as _scipy_solve_ivp
from scipy.optimize import brentq

from .admissibility import ProblemSpec
from .scalar_family import Exponential, MonomialSum, PowerOfMonomialSum, degree_bounds

__all__ = [
    "ModelGeometry",
    "RadialSolution",
    "FluxMonotonicityError",
    "SolverError",
    "flux_map",
    "invert_flux",
    "solve_ivp",
    "solve_eigen",
    "solve_annulus",
    "DEFAULT_ATOL",
    "DEFAULT_RTOL",
]

DEFAULT_ATOL = 1e-10
DEFAULT_RTOL = 1e-8


class FluxMonotonicityError(ValueError):
    """The flux is not strictly increasing in the slope (C1 violated)."""


class SolverError(RuntimeError):
    def __init__(self, message: str, r: float = math.nan, state=None):
        super().__init__(message)
        self.r = r
        self.state = state


@dataclass(frozen=True)
class ModelGeometry:
    n: int
    kappa: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        if not self.kappa >= 0.0:
            raise ValueError("kappa must be non-negative")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "kappa", float(self.kappa))

    @property
    def K(self) -> float:
        """Ricci lower bound parameter: Ric = -(n-1) kappa = -K."""
        return (self.n - 1) * self.kappa

    @property
    def id(self) -> str:
        return f"n{self.n}_k{self.kappa:g}"

    def warp(self, r):
        if self.kappa == 0.0:
            return r
        k = math.sqrt(self.kappa)
        return np.sinh(k * r) / k

    def warp_prime(self, r):
        if self.kappa == 0.0:
            return np.ones_like(r) if np.ndim(r) else 1.0
        return np.cosh(math.sqrt(self.kappa) * r)

    def J(self, r):
        """Volume density w(r)^(n-1)."""
        return self.warp(r) ** (self.n - 1)

    def J_integral(self, r: float) -> float:
        """int_0^r J by its small-r series (used only near the centre)."""
        n, kap = self.n, self.kappa
        m = n - 1
        c4 = m / 120.0 + m * (m - 1) / 72.0
        return r ** n * (1.0 / n + m * kap * r * r / (6.0 * (n + 2)) + c4 * kap * kap * r ** 4 / (n + 4))


@dataclass(frozen=True, eq=False)
class RadialSolution:
    """Radial profile on a strictly increasing grid.

    ``status`` is ``completed``, ``hit_zero`` (u reached zero at ``r_stop``)
    or ``blew_up`` (u exceeded the growth cap at ``r_stop``).
    """

    geometry: ModelGeometry
    spec: ProblemSpec
    grid: np.ndarray
    u: np.ndarray
    du: np.ndarray
    flux: np.ndarray
    status: str
    r_stop: Optional[float]
    tolerances: tuple[float, float]
    _dense: Optional[Callable] = field(default=None, repr=False)

    @property
    def lam(self) -> float:
        return self.spec.lam

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])

    @property
    def log_u(self) -> np.ndarray:
        return np.log(self.u)

    @property
    def hat_H(self) -> np.ndarray:
        """|grad log u|^2 on the grid."""
        return (self.du / self.u) ** 2

    def __call__(self, r):
        """(u, u') at arbitrary radii inside the domain."""
        r = np.asarray(r, dtype=float)
        lo, hi = self.domain
        if np.any(r < lo - 1e-12 * max(1.0, abs(lo))) or np.any(r > hi + 1e-12 * max(1.0, abs(hi))):
            raise ValueError(f"radius outside the solution domain [{lo}, {hi}]")
        r = np.clip(r, lo, hi)
        if self._dense is None:
            u = np.interp(r, self.grid, self.u)
            du = np.interp(r, self.grid, self.du)
            return (float(u), float(du)) if r.ndim == 0 else (u, du)
        return self._dense(r)

    def flux_residual(self) -> float:
        """Max over grid intervals of |F_b - F_a + lam int_a^b J psi(u^2) u| / scale.

        The source integral uses 5-point Gauss-Legendre on the dense output.
        """
        if self.lam == 0.0:
            scale = max(1.0, float(np.abs(self.flux).max()))
            return float(np.abs(np.diff(self.flux)).max(initial=0.0)) / scale
        x, w = np.polynomial.legendre.leggauss(5)
        a, b = self.grid[:-1], self.grid[1:]
        mid, half = (a + b) / 2.0, (b - a) / 2.0
        pts = mid[:, None] + half[:, None] * x[None, :]
        u, _ = self(pts.ravel())
        u = u.reshape(pts.shape)
        src = self.geometry.J(pts) * np.asarray(self.spec.psi.value(u * u)) * u
        integral = (src * w[None, :]).sum(axis=1) * half
        res = np.diff(self.flux) + self.lam * integral
        scale = max(1.0, float(np.abs(self.flux).max()), float(np.abs(self.lam * integral).sum()))
        return float(np.abs(res).max(initial=0.0)) / scale


# -- flux -------------------------------------------------------------------


def flux_map(spec: ProblemSpec, s, v):
    """a(s) phi(v^2) v, with the exact value 0 at v = 0."""
    s, v = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(v, dtype=float))
    core = np.zeros(v.shape)
    nz = v != 0
    if np.any(nz):
        with np.errstate(over="ignore"):
            core[nz] = np.asarray(spec.phi.value(v[nz] ** 2)) * v[nz]
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.asarray(spec.a.value(s)) * core
    return float(out) if out.ndim == 0 else out


def _pure_power(spec: ProblemSpec):
    phi = spec.phi
    if isinstance(phi, MonomialSum) and phi.is_power:
        return phi.terms[0]
    return None


def _check_monotone(spec: ProblemSpec):
    pp = _pure_power(spec)
    if pp is not None:
        if not 2.0 * pp[1] + 1.0 > 0:
            raise FluxMonotonicityError(
                f"phi = {spec.phi} makes the flux decreasing in the slope (degree {2 * pp[1]} <= -1, C1 violated)"
            )
        return
    b = degree_bounds(spec.phi, 1)
    if not b.inf > -1.0:
        raise FluxMonotonicityError(
            f"degree of phi reaches {b.inf} <= -1: flux is not monotone in the slope (C1 violated)"
        )


def invert_flux(spec: ProblemSpec, s, m, rtol: float = 1e-12):
    """The unique v with ``a(s) phi(v^2) v = m``.

    Pure powers phi = c t^k invert in closed form. Otherwise the equation is
    solved in log variables, ``x = log v``, where ``log(phi(e^2x) e^x)`` has
    slope ``1 + degree_phi > 0``: a bracket (closed form for monomial sums,
    expansion otherwise) followed by Newton steps safeguarded by bisection.
    The map is odd, so only |m| is solved for and the sign restored exactly.
    """
    _check_monotone(spec)
    s, m = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(m, dtype=float))
    with np.errstate(divide="ignore", over="ignore"):
        target = np.abs(m) / np.asarray(spec.a.value(s), dtype=float)
    pp = _pure_power(spec)
    if pp is not None:
        c, k = pp
        with np.errstate(divide="ignore"):
            v = (target / c) ** (1.0 / (2.0 * k + 1.0))
    else:
        v = np.zeros(target.shape)
        pos = target > 0
        if np.any(pos):
            v[pos] = np.exp(_solve_log(spec.phi, np.log(target[pos]), rtol))
    out = np.where(m == 0, 0.0, np.copysign(v, m))
    return float(out) if out.ndim == 0 else out


def _log_flux(phi):
    """x -> (log(phi(e^(2x)) e^x), 1 + degree_phi(e^(2x))) on arrays."""
    if isinstance(phi, (MonomialSum, PowerOfMonomialSum)) and phi.positive:
        base = phi.base if isinstance(phi, PowerOfMonomialSum) else phi
        e = phi.e if isinstance(phi, PowerOfMonomialSum) else 1.0
        logc = np.log(base.coefficients)
        k2 = 2.0 * base.exponents

        def h(x):
            z = logc[None, :] + k2[None, :] * x[:, None]
            top = z.max(axis=1)
            w = np.exp(z - top[:, None])
            tot = w.sum(axis=1)
            mean = (w @ k2) / tot
            return e * (top + np.log(tot)) + x, 1.0 + e * mean

        return h
    if isinstance(phi, Exponential):
        beta = phi.beta

        def h(x):
            t = np.exp(2.0 * x)
            return beta * t + x, 1.0 + 2.0 * beta * t

        return h

    def h(x):
        t = np.exp(2.0 * x)
        return np.log(np.asarray(phi.value(t), dtype=float)) + x, 1.0 + np.asarray(phi.degree(t), dtype=float)

    return h


def _log_bracket(phi, y):
    """[lo, hi] in log v containing the root of log(phi(v^2) v) = y."""
    if isinstance(phi, MonomialSum) and phi.positive:
        # every term c v^(2k+1) is increasing (C1 gives 2k_1 + 1 > 0), and
        # max term <= phi(v^2) v <= (#terms) max term
        logc = np.log(phi.coefficients)
        ex = 2.0 * phi.exponents + 1.0
        per = (y[:, None] - logc[None, :]) / ex[None, :]
        lo = ((y[:, None] - math.log(len(ex)) - logc[None, :]) / ex[None, :]).min(axis=1)
        return lo, per.min(axis=1)
    h = _log_flux(phi)
    lo, hi = y - 1.0, y + 1.0
    step = np.ones_like(y)
    for _ in range(64):
        fl, _ = h(lo)
        fh, _ = h(hi)
        bad_lo, bad_hi = ~(fl <= y), ~(fh >= y)
        if not (bad_lo.any() or bad_hi.any()):
            return lo, hi
        lo = np.where(bad_lo, lo - step, lo)
        hi = np.where(bad_hi, hi + step, hi)
        step = step * 2.0
    raise FluxMonotonicityError("flux target not bracketed: phi(v^2) v does not cover the value")


def _solve_log(phi, y, rtol: float):
    h = _log_flux(phi)
    lo, hi = _log_bracket(phi, y)
    x = 0.5 * (lo + hi)
    active = np.ones(y.shape, bool)
    for _ in range(200):
        xa = x[active]
        f, slope = h(xa)
        f = f - y[active]
        if np.any(~(slope > 0)):
            raise FluxMonotonicityError("flux derivative changes sign (C1 violated)")
        lo_a, hi_a = lo[active], hi[active]
        lo_a = np.where(f <= 0, xa, lo_a)
        hi_a = np.where(f >= 0, xa, hi_a)
        newton = xa - f / slope
        inside = (newton > lo_a) & (newton < hi_a)
        x_new = np.where(inside, newton, 0.5 * (lo_a + hi_a))
        x_new = np.where(f == 0, xa, x_new)
        tol = 1e-3 * rtol * np.maximum(1.0, np.abs(x_new))
        done = (np.abs(x_new - xa) <= tol) | (hi_a - lo_a <= tol)
        lo[active], hi[active], x[active] = lo_a, hi_a, x_new
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        if not active.any():
            break
    return x


def _solve_positive(phi, target: float, rtol: float) -> float:
    return float(np.exp(_solve_log(phi, np.array([math.log(target)]), rtol))[0])


def _scalar_eval(f) -> Callable[[float], float]:
    """Plain-float evaluator of a scalar-family function (no array overhead)."""
    if isinstance(f, MonomialSum):
        pairs = tuple(zip(f.coefficients.tolist(), f.exponents.tolist()))
        if len(pairs) == 1:
            c, k = pairs[0]
            return (lambda t: c) if k == 0.0 else (lambda t: c * t ** k)
        return lambda t: sum(c * t ** k if k != 0.0 else c for c, k in pairs)
    if isinstance(f, PowerOfMonomialSum):
        base, e = _scalar_eval(f.base), f.e
        return lambda t: base(t) ** e
    if isinstance(f, Exponential):
        beta = f.beta
        return lambda t: math.exp(beta * t)
    return lambda t: float(f.value(t))


def _scalar_inverter(spec: ProblemSpec):
    """Fast scalar (s, m) -> v for use inside the ODE right-hand side."""
    _check_monotone(spec)
    pp = _pure_power(spec)
    a = _scalar_eval(spec.a)
    if pp is not None:
        c, k = pp
        expo = 1.0 / (2.0 * k + 1.0)

        def inv(s, m):
            if m == 0.0:
                return 0.0
            return math.copysign((abs(m) / (a(s) * c)) ** expo, m)

        return inv
    phi = spec.phi
    if isinstance(phi, MonomialSum) and phi.positive:
        return _scalar_msum_inverter(phi, a)

    def inv(s, m):
        if m == 0.0:
            return 0.0
        return math.copysign(_solve_positive(phi, abs(m) / a(s), 1e-12), m)

    return inv


def _scalar_msum_inverter(phi: MonomialSum, a):
    """Scalar version of the log-variable solve for a positive monomial sum."""
    terms = [(math.log(c), 2.0 * k) for c, k in phi.terms]
    nlog = math.log(len(terms))

    def inv(s, m):
        if m == 0.0:
            return 0.0
        y = math.log(abs(m) / a(s))
        lo = min((y - nlog - lc) / (k2 + 1.0) for lc, k2 in terms)
        hi = min((y - lc) / (k2 + 1.0) for lc, k2 in terms)
        x = 0.5 * (lo + hi)
        for _ in range(200):
            z = [lc + k2 * x for lc, k2 in terms]
            top = max(z)
            w = [math.exp(zi - top) for zi in z]
            tot = sum(w)
            f = top + math.log(tot) + x - y
            slope = 1.0 + sum(wi * k2 for wi, (_, k2) in zip(w, terms)) / tot
            if f <= 0:
                lo = x
            if f >= 0:
                hi = x
            step = x - f / slope
            x_new = step if lo < step < hi else 0.5 * (lo + hi)
            if f == 0 or abs(x_new - x) <= 1e-15 * max(1.0, abs(x)) or hi - lo <= 1e-15 * max(1.0, abs(x)):
                x = x_new
                break
            x = x_new
        return math.copysign(math.exp(x), m)

    return inv


# -- integration ------------------------------------------------------------


def _rhs(geometry: ModelGeometry, spec: ProblemSpec):
    inv = _scalar_inverter(spec)
    lam = spec.lam
    psi = _scalar_eval(spec.psi)
    m = geometry.n - 1
    if geometry.kappa == 0.0:
        def J_of(r):
            return r ** m
    else:
        k = math.sqrt(geometry.kappa)

        def J_of(r):
            return (math.sinh(k * r) / k) ** m

    def rhs(r, y):
        u, F = y
        J = J_of(r)
        s = u * u
        v = inv(s, F / J)
        if lam == 0.0:
            return [v, 0.0]
        return [v, -lam * J * psi(s) * u]

    return rhs, inv


def _integrate(geometry, spec, r_start, y0, r_end, atol_vec, rtol, zero_level, blow_level, u_scale):
    """Integrate (u, F) from r_start to r_end with zero / blow-up events.

    A step-size underflow is accepted as an event when the local distance to
    the singularity, ``u/|u'|``, is below ``1e-8 r``: a steep zero when u is
    small and decreasing (``a(u^2) -> 0``), a finite-radius blow-up when u is
    large and increasing. Anything else is a solver failure.
    """
    rhs, inv = _rhs(geometry, spec)

    def hit_zero(r, y):
        return y[0] - zero_level

    hit_zero.terminal = True
    hit_zero.direction = -1

    def blow_up(r, y):
        return y[0] - blow_level

    blow_up.terminal = True
    blow_up.direction = 1

    sol = _scipy_solve_ivp(
        rhs, (r_start, r_end), list(y0), method="RK45",
        rtol=rtol, atol=atol_vec, events=[hit_zero, blow_up], dense_output=True,
    )
    r = sol.t
    u, F = sol.y
    status, r_stop = "completed", None
    if sol.status == -1:
        u_last, F_last, r_last = u[-1], F[-1], r[-1]
        v_last = inv(u_last * u_last, F_last / float(geometry.J(r_last)))
        direction = math.copysign(1.0, r_end - r_start)
        dist = u_last / abs(v_last) if v_last != 0.0 else math.inf
        steep = dist <= 1e-8 * max(1.0, abs(r_last))
        if steep and v_last * direction < 0 and u_last <= 1e-4 * u_scale:
            status, r_stop = "hit_zero", float(r_last + direction * dist)
        elif steep and v_last * direction > 0 and u_last >= 1e4 * u_scale:
            status, r_stop = "blew_up", float(r_last)
        else:
            raise SolverError(f"integration failed at r = {r_last}: {sol.message}", r_last, (u_last, F_last))
    elif sol.status == 1:
        if sol.t_events[0].size:
            status, r_stop = "hit_zero", float(sol.t_events[0][0])
        else:
            status, r_stop = "blew_up", float(sol.t_events[1][0])
    return r, u, F, status, r_stop, sol.sol, inv


def _package(geometry, spec, r, u, F, status, r_stop, dense, inv, tolerances, centre=None) -> RadialSolution:
    order = np.argsort(r, kind="stable")
    r, u, F = r[order], u[order], F[order]
    du = _slopes(geometry, spec, r, u, F)

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        uu = np.empty_like(flat)
        vv = np.empty_like(flat)
        inner = flat < centre[0] if centre is not None else np.zeros(flat.shape, bool)
        if np.any(inner):
            # straight interpolation from the centre value to the series start
            t = flat[inner] / centre[0]
            uu[inner] = centre[1] + t * (centre[2] - centre[1])
            vv[inner] = t * centre[3]
        outer = ~inner
        if np.any(outer):
            xo = flat[outer]
            uo, Fo = dense(xo)
            uu[outer] = uo
            vv[outer] = _slopes(geometry, spec, xo, uo, Fo)
        if x.ndim == 0:
            return float(uu[0]), float(vv[0])
        return uu.reshape(x.shape), vv.reshape(x.shape)

    return RadialSolution(
        geometry=geometry, spec=spec, grid=r, u=u, du=du, flux=F,
        status=status, r_stop=r_stop, tolerances=tolerances, _dense=evaluate,
    )


def _slopes(geometry, spec, r, u, F) -> np.ndarray:
    """u' from the flux, with u' = 0 where J vanishes."""
    J = np.asarray(geometry.J(r), dtype=float)
    safe = np.where(J > 0, J, 1.0)
    return np.where(J > 0, invert_flux(spec, u * u, F / safe), 0.0)


def _check_spec(geometry: ModelGeometry, spec: ProblemSpec):
    if geometry.n != spec.n:
        raise ValueError(f"geometry dimension {geometry.n} differs from spec dimension {spec.n}")


def solve_ivp(
    geometry: ModelGeometry,
    spec: ProblemSpec,
    u0: float,
    R: float,
    atol: float = DEFAULT_ATOL,
    rtol: float = DEFAULT_RTOL,
    eps: float = 1e-6,
    zero_frac: float = 1e-12,
    blowup: float = 1e12,
) -> RadialSolution:
    """Regular radial solution with u(0) = u0, u'(0) = 0, integrated to R.

    Integration starts at ``r0 = eps R min(1, 1/sqrt(|lam| + 1))`` from the
    centre asymptotics ``F(r0) = -lam psi(u0^2) u0 int_0^r0 J``. It stops with
    ``hit_zero`` once ``u <= zero_frac u0`` and ``blew_up`` once
    ``u >= blowup u0``.
    """
    _check_spec(geometry, spec)
    if not u0 > 0:
        raise ValueError("u0 must be positive")
    if not R > 0:
        raise ValueError("R must be positive")
    lam = spec.lam
    s0 = u0 * u0
    source = lam * float(spec.psi.value(s0)) * u0
    r0 = eps * R * min(1.0, 1.0 / math.sqrt(abs(lam) + 1.0))
    inv = _scalar_inverter(spec)
    F0 = -source * geometry.J_integral(r0)
    if lam == 0.0:
        u_start = u0
    else:
        # u(r0) = u0 + int_0^r0 u' with u' from the leading-order flux
        x, w = np.polynomial.legendre.leggauss(8)
        pts = r0 * (x + 1.0) / 2.0
        slopes = [inv(s0, -source * geometry.J_integral(p) / float(geometry.J(p))) for p in pts]
        u_start = u0 + r0 / 2.0 * float(np.dot(w, slopes))
    tol = (atol, rtol)
    if lam == 0.0:
        # F stays 0, so u' = 0 exactly: the constant solution
        grid = np.array([0.0, R])
        return RadialSolution(
            geometry, spec, grid, np.full(2, u0), np.zeros(2), np.zeros(2), "completed", None, tol,
            _dense=lambda x: (np.full(np.shape(x), u0) if np.ndim(x) else u0,
                              np.zeros(np.shape(x)) if np.ndim(x) else 0.0),
        )
    atol_vec = [atol * u0, atol * max(abs(source), 1e-300)]
    r, u, F, status, r_stop, dense, inv = _integrate(
        geometry, spec, r0, (u_start, F0), R, atol_vec, rtol, zero_frac * u0, blowup * u0, u0,
    )
    r = np.concatenate([[0.0], r])
    u = np.concatenate([[u0], u])
    F = np.concatenate([[0.0], F])
    v0 = inv(u_start * u_start, F0 / float(geometry.J(r0)))
    return _package(geometry, spec, r, u, F, status, r_stop, dense, inv, tol, centre=(r0, u0, u_start, v0))


def _first_zero(geometry, spec, u0, R, atol, rtol) -> float:
    sol = solve_ivp(geometry, spec, u0, R, atol=atol, rtol=rtol)
    if sol.status == "hit_zero":
        return sol.r_stop
    return math.inf


def solve_eigen(
    geometry: ModelGeometry,
    spec: ProblemSpec,
    R: float,
    u0: float,
    bracket: tuple[float, float],
    atol: float = DEFAULT_ATOL,
    rtol: float = DEFAULT_RTOL,
    xtol: float = 1e-10,
) -> tuple[float, RadialSolution]:
    """Principal Dirichlet eigenvalue on B(o, R) by bisection on lam.

    The indicator is whether the regular solution from u(0) = u0 reaches zero
    before R. ``spec.lam`` is ignored; the returned solution carries lam*.
    """
    from dataclasses import replace

    lo, hi = map(float, bracket)
    if not lo < hi:
        raise ValueError("bracket must satisfy lam_lo < lam_hi")

    def zero_at(lam):
        return _first_zero(geometry, replace(spec, lam=lam), u0, R, atol, rtol)

    z_lo, z_hi = zero_at(lo), zero_at(hi)
    if not (z_lo > R and z_hi <= R):
        raise ValueError(
            f"bracket does not straddle the principal eigenvalue: first zero at lam={lo} is {z_lo}, "
            f"at lam={hi} is {z_hi} (R = {R})"
        )
    while hi - lo > xtol * (1.0 + abs(0.5 * (lo + hi))):
        mid = 0.5 * (lo + hi)
        if zero_at(mid) <= R:
            hi = mid
        else:
            lo = mid
    lam_star = 0.5 * (lo + hi)
    sol = solve_ivp(geometry, replace(spec, lam=lam_star), u0, R, atol=atol, rtol=rtol)
    return lam_star, sol


def solve_annulus(
    geometry: ModelGeometry,
    spec: ProblemSpec,
    R1: float,
    R2: float,
    boundary: tuple[float, float],
    atol: float = DEFAULT_ATOL,
    rtol: float = DEFAULT_RTOL,
) -> RadialSolution:
    """Positive solution on [R1, R2] with prescribed boundary values.

    Shooting runs from the end with the smaller boundary value towards the
    other, so the integration always follows the growing direction (decaying
    profiles keep full relative accuracy). The shooting unknown is the flux
    density at the starting end, found by Brent's method. ``atol`` is taken
    relative to the smaller boundary value.
    """
    _check_spec(geometry, spec)
    if not 0 < R1 < R2:
        raise ValueError("need 0 < R1 < R2")
    u1, u2 = map(float, boundary)
    if not (u1 > 0 and u2 > 0):
        raise ValueError("boundary values must be positive")
    if u1 <= u2:
        ra, ua, rb, ub = R1, u1, R2, u2
    else:
        ra, ua, rb, ub = R2, u2, R1, u1
    tol = (atol, rtol)
    Ja = float(geometry.J(ra))
    inv = _scalar_inverter(spec)
    scale_u = min(u1, u2)

    def shoot(m):
        F0 = Ja * m
        atol_vec = [atol * scale_u, atol * max(abs(F0), 1e-300) + 1e-300]
        return _integrate(geometry, spec, ra, (ua, F0), rb, atol_vec, rtol, 1e-12 * scale_u, 1e12 * max(u1, u2), scale_u)

    sign = 1.0 if rb > ra else -1.0

    def mismatch(m):
        r, u, F, status, r_stop, _, _ = shoot(m)
        if status == "hit_zero":
            return -ub - abs(rb - r_stop)
        if status == "blew_up":
            return 1e12 * max(u1, u2) + abs(rb - r_stop)
        return u[-1] - ub

    # linearised guess: u' = m / (a(u^2) phi(1)) J_a / J
    if ua == ub and spec.lam == 0.0:
        m0 = 0.0
    else:
        xs = np.linspace(min(ra, rb), max(ra, rb), 201)
        ubar = 0.5 * (ua + ub)
        w = Ja / (geometry.J(xs) * float(spec.a.value(ubar * ubar)))
        integral = float(np.trapezoid(w, xs))
        lin = sign * (ub - ua) / integral
        m0 = float(flux_map(spec, ubar * ubar, lin)) / float(spec.a.value(ubar * ubar)) * float(spec.a.value(ua * ua))
    f0 = mismatch(m0)
    if f0 == 0.0:
        m_star = m0
    else:
        # the endpoint value increases with the initial flux when moving outward
        want_up = (f0 < 0) == (sign > 0)
        step = max(abs(m0), 1e-300) * 1e-3 if m0 != 0 else 1e-6 * max(ub, ua)
        a_m, fa = m0, f0
        for _ in range(2000):
            b_m = a_m + step if want_up else a_m - step
            fb = mismatch(b_m)
            if (fb > 0) != (f0 > 0) or fb == 0:
                break
            a_m, fa = b_m, fb
            step *= 2.0
        else:
            raise SolverError("no positive solution found in the shooting bracket")
        lo_m, hi_m = sorted((a_m, b_m))
        m_star = brentq(mismatch, lo_m, hi_m, xtol=1e-300, rtol=1e-15, maxiter=500)
    r, u, F, status, r_stop, dense, inv = shoot(m_star)
    if status != "completed" or np.any(u <= 0):
        raise SolverError("no positive solution found in the shooting bracket")
    return _package(geometry, spec, r, u, F, status, r_stop, dense, inv, tol)
