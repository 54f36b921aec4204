"""Certified admissibility checks for separable quasilinear eigenproblems.

The problem is ``div(a(u^2) phi(|grad u|^2) grad u) + lam psi(u^2) u = 0`` on
an n-manifold with ``Ric >= -K``. Writing d_f for the degree function of f,
the gradient estimate needs

* C1: ``d_phi(t) >= l_phi > -1``
* C2: ``(d_phi(t) + d_a(s) + 1)^2/(n-1) - 2 t d_phi'(t) - 2 s d_a'(s) >= gamma > 0``
* C3: ``Theta := sup B(s,t)^2 < 4 gamma/(n-1)`` where the sup runs over
  t outside the favourable set I and
  ``B = 2(d_phi + d_a + 1)/(n-1) + d_phi + d_a - d_psi``.

Every verdict is three-valued. ``holds`` is only returned when interval
bounds prove it; ``fails`` only when a concrete evaluation (or an exact
limit) exhibits a violation; anything in between is ``unknown``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from .intervals import Interval
from .scalar_family import (
    DegreeBounds,
    Exponential,
    MonomialSum,
    PowerOfMonomialSum,
    ScalarFunc,
    degree_bounds,
    degree_limits,
    degree_slope_range,
    monomial,
    msum,
)

__all__ = [
    "Verdict",
    "ProblemSpec",
    "PolyPLaplaceSpec",
    "Check",
    "Thm4Range",
    "AdmissibilityReport",
    "check_c1",
    "check_c2",
    "classify_I",
    "check_c3",
    "derived_constants",
    "thm4_range",
    "full_report",
    "as_poly_plaplace",
    "c2_expression_grid",
    "c3_bracket_grid",
    "WITNESS_GRID",
    "porous_problem",
]

# log grid for witness evaluations; exact limits at 0+ and +inf are appended
WITNESS_GRID = np.logspace(-12.0, 12.0, 200)


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ProblemSpec:
    """``div(a(u^2) phi(|du|^2) du) + lam psi(u^2) u = 0`` with ``Ric >= -K``."""

    n: int
    K: float
    lam: float
    phi: ScalarFunc
    a: ScalarFunc
    psi: ScalarFunc
    name: str = ""

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.n}")
        if not (self.K >= 0.0):
            raise ValueError(f"K must be non-negative, got {self.K}")
        if not math.isfinite(self.lam):
            raise ValueError("lambda must be finite")
        for label in ("phi", "a", "psi"):
            f = getattr(self, label)
            if not f.positive:
                raise ValueError(f"{label} = {f} is not certifiably positive on (0, inf)")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "K", float(self.K))
        object.__setattr__(self, "lam", float(self.lam))

    def b(self, s):
        """lam psi(s) / a(s)."""
        return self.lam * self.psi.value(s) / self.a.value(s)


@dataclass(frozen=True)
class PolyPLaplaceSpec:
    """``Delta_p(sum a_i u^q_i) + lam u^r = 0`` with only the sign of lam fixed."""

    p: float
    terms: tuple[tuple[float, float], ...]
    r: float
    lambda_sign: str
    n: int

    def __post_init__(self):
        if not self.p > 1.0:
            raise ValueError(f"p must exceed 1, got {self.p}")
        terms = tuple((float(a), float(q)) for a, q in self.terms)
        if not terms:
            raise ValueError("at least one term is required")
        qs = [q for _, q in terms]
        if any(b <= a for a, b in zip(qs, qs[1:])):
            raise ValueError(f"exponents must be strictly increasing, got {qs}")
        if any(a * q <= 0 for a, q in terms):
            raise ValueError("every term needs a_i q_i > 0")
        if self.lambda_sign not in ("nonneg", "nonpos"):
            raise ValueError("lambda_sign must be 'nonneg' or 'nonpos'")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "n", int(self.n))

    @property
    def q1(self) -> float:
        return self.terms[0][1]

    @property
    def qm(self) -> float:
        return self.terms[-1][1]

    def to_problem(self, lam: float, K: float = 0.0, name: str = "") -> ProblemSpec:
        if self.lambda_sign == "nonneg" and lam < 0 or self.lambda_sign == "nonpos" and lam > 0:
            raise ValueError(f"lambda = {lam} does not match sign {self.lambda_sign}")
        return porous_problem(self.n, K, lam, self.p, self.terms, self.r, name=name)


def porous_problem(n: int, K: float, lam: float, p: float, terms, r: float, name: str = "") -> ProblemSpec:
    """ProblemSpec for ``Delta_p(sum a_i u^q_i) + lam u^r = 0``.

    ``phi = t^((p-2)/2)``, ``a = (sum a_i q_i s^((q_i-1)/2))^(p-1)`` and
    ``psi = s^((r-1)/2)``.
    """
    base = msum([(a * q, (q - 1.0) / 2.0) for a, q in terms])
    if p == 2.0:
        a_fn: ScalarFunc = base
    else:
        a_fn = PowerOfMonomialSum(base, p - 1.0)
    return ProblemSpec(
        n=n, K=K, lam=lam,
        phi=monomial((p - 2.0) / 2.0),
        a=a_fn,
        psi=monomial((r - 1.0) / 2.0),
        name=name,
    )


@dataclass(frozen=True)
class Check:
    """Verdict of a single condition with its certified constant.

    ``value`` is the certified constant (l_phi, gamma or Theta) or None;
    ``evidence`` is the witness value from pointwise evaluation.
    """

    verdict: Verdict
    value: Optional[float]
    evidence: Optional[float] = None
    notes: tuple[str, ...] = ()
    exact: Optional[Fraction] = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class Thm4Range:
    admissible: bool
    r_threshold: float
    literal_admissible: bool
    gamma: float
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class AdmissibilityReport:
    c1: Check
    c2: Check
    c3: Check
    I_class: str
    theta: Optional[float]
    alpha: Optional[float]
    finite_degree: Verdict
    overall: Verdict
    gamma_poly: Optional[float] = None
    thm4: Optional[Thm4Range] = None
    thm4_agrees: Optional[bool] = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def l_phi(self):
        return self.c1.value

    @property
    def gamma(self):
        return self.c2.value

    @property
    def Theta(self):
        return self.c3.value

    def to_dict(self) -> dict:
        def check(c: Check):
            return {"verdict": c.verdict.value, "value": c.value, "evidence": c.evidence}

        out = {
            "overall": self.overall.value,
            "finite_degree": self.finite_degree.value,
            "c1": check(self.c1),
            "c2": check(self.c2),
            "c3": check(self.c3),
            "I": self.I_class,
            "theta": self.theta,
            "alpha": self.alpha,
            "gamma_poly": self.gamma_poly,
            "thm4": None,
            "thm4_agrees": self.thm4_agrees,
            "notes": list(self.notes),
        }
        if self.thm4 is not None:
            out["thm4"] = {
                "admissible": self.thm4.admissible,
                "r_threshold": self.thm4.r_threshold,
                "literal_admissible": self.thm4.literal_admissible,
                "gamma": self.thm4.gamma,
            }
        return out

    def format(self) -> str:
        def fmt(x):
            return "-" if x is None else f"{x:.12g}"

        lines = [
            f"overall        {self.overall}",
            f"finite degree  {self.finite_degree}",
            f"C1             {self.c1.verdict:<8} l_phi = {fmt(self.c1.value)}",
            f"C2             {self.c2.verdict:<8} gamma = {fmt(self.c2.value)}  (grid min {fmt(self.c2.evidence)})",
            f"I              {self.I_class}",
            f"C3             {self.c3.verdict:<8} Theta = {fmt(self.c3.value)}  (grid max {fmt(self.c3.evidence)})",
            f"theta          {fmt(self.theta)}",
            f"alpha          {fmt(self.alpha)}",
        ]
        if self.gamma_poly is not None:
            lines.append(f"gamma (poly)   {fmt(self.gamma_poly)}")
        if self.thm4 is not None:
            lines.append(
                f"poly range     admissible={self.thm4.admissible} r_threshold={fmt(self.thm4.r_threshold)}"
                f" agrees={self.thm4_agrees}"
            )
        lines.extend(f"note: {n}" for n in self.notes)
        return "\n".join(lines)


# -- helpers ----------------------------------------------------------------


def _degree_iv(f: ScalarFunc) -> tuple[Interval, bool]:
    """Exact interval of the degree of f over t > 0 and whether it is certified."""
    if isinstance(f, (MonomialSum, PowerOfMonomialSum)) and f.positive:
        base = f.base if isinstance(f, PowerOfMonomialSum) else f
        iv = Interval(2 * Fraction(base.terms[0][1]), 2 * Fraction(base.terms[-1][1]))
        if isinstance(f, PowerOfMonomialSum):
            iv = Fraction(f.e) * iv
        return iv, True
    b = degree_bounds(f, 1)
    return Interval(b.inf, b.sup), b.certified


def _slope_iv(f: ScalarFunc) -> tuple[Interval, bool]:
    """Exact interval of t * degree'(t) over t > 0."""
    if isinstance(f, (MonomialSum, PowerOfMonomialSum)) and f.positive:
        base = f.base if isinstance(f, PowerOfMonomialSum) else f
        spread = Fraction(base.terms[-1][1]) - Fraction(base.terms[0][1])
        iv = Interval(0, spread * spread)
        if isinstance(f, PowerOfMonomialSum):
            iv = Fraction(f.e) * iv
        return iv, True
    b = degree_slope_range(f)
    return Interval(b.inf, b.sup), b.certified


def _profile(f: ScalarFunc, grid=WITNESS_GRID):
    """Degree and degree slope at grid points plus the finite end limits."""
    d = np.asarray(f.degree(grid), dtype=float)
    sl = np.asarray(f.degree_slope(grid), dtype=float)
    lim0, liminf = degree_limits(f)
    extra_d, extra_s = [], []
    for lim in (lim0, liminf):
        if math.isfinite(lim):
            extra_d.append(lim)
            extra_s.append(0.0)
    d = np.concatenate([d, extra_d])
    sl = np.concatenate([sl, extra_s])
    ok = np.isfinite(d) & np.isfinite(sl)
    return d[ok], sl[ok]


def _s_profile(a: ScalarFunc, psi: ScalarFunc, grid=WITNESS_GRID):
    """Joint (d_a(s), d_psi(s), s d_a'(s)) at common s values and common end limits."""
    da = np.asarray(a.degree(grid), dtype=float)
    dpsi = np.asarray(psi.degree(grid), dtype=float)
    sa = np.asarray(a.degree_slope(grid), dtype=float)
    la, lpsi = degree_limits(a), degree_limits(psi)
    extra = [(la[i], lpsi[i], 0.0) for i in (0, 1) if math.isfinite(la[i]) and math.isfinite(lpsi[i])]
    if extra:
        e = np.array(extra)
        da = np.concatenate([da, e[:, 0]])
        dpsi = np.concatenate([dpsi, e[:, 1]])
        sa = np.concatenate([sa, e[:, 2]])
    ok = np.isfinite(da) & np.isfinite(dpsi) & np.isfinite(sa)
    return da[ok], dpsi[ok], sa[ok]


def c2_expression_grid(spec: ProblemSpec, grid=WITNESS_GRID) -> np.ndarray:
    """The C2 expression on the (s, t) grid, rows indexed by t."""
    dphi, sphi = _profile(spec.phi, grid)
    da, _, sa = _s_profile(spec.a, spec.psi, grid)
    x = dphi[:, None] + da[None, :] + 1.0
    return x * x / (spec.n - 1) - 2.0 * sphi[:, None] - 2.0 * sa[None, :]


def c3_bracket_grid(spec: ProblemSpec, grid=WITNESS_GRID) -> np.ndarray:
    """B(s, t) on the (s, t) grid, rows indexed by t."""
    n = spec.n
    dphi, _ = _profile(spec.phi, grid)
    da, dpsi, _ = _s_profile(spec.a, spec.psi, grid)
    return 2.0 * (dphi[:, None] + da[None, :] + 1.0) / (n - 1) + dphi[:, None] + da[None, :] - dpsi[None, :]


def _bracket_parts(spec: ProblemSpec):
    """Split B = c d_phi(t) + g(s) with c = (n+1)/(n-1)."""
    n = spec.n
    c = Fraction(n + 1, n - 1)
    dphi, ok1 = _degree_iv(spec.phi)
    da, ok2 = _degree_iv(spec.a)
    dpsi, ok3 = _degree_iv(spec.psi)
    t_part = c * dphi
    s_part = c * da - dpsi + Fraction(2, n - 1)
    return c, t_part, s_part, ok1 and ok2 and ok3


def _exact_limits(f: ScalarFunc) -> Optional[tuple[Fraction, Fraction]]:
    """Exact degree limits at 0+ and +inf, or None when one is infinite."""
    if isinstance(f, MonomialSum):
        return 2 * Fraction(f.terms[0][1]), 2 * Fraction(f.terms[-1][1])
    if isinstance(f, PowerOfMonomialSum):
        lo, hi = _exact_limits(f.base)
        return Fraction(f.e) * lo, Fraction(f.e) * hi
    if isinstance(f, Exponential) and f.beta == 0.0:
        return Fraction(0), Fraction(0)
    return None


def _limit_witnesses(spec: ProblemSpec):
    """Exact (C2 expression, B) values at the four corner limits of (s, t).

    Degree slopes vanish at both ends, so each corner value is a limit of
    the expression and therefore bounds its inf (or sup) from above (below).
    Returns None when some limit is infinite.
    """
    lp, la, lpsi = _exact_limits(spec.phi), _exact_limits(spec.a), _exact_limits(spec.psi)
    if lp is None or la is None or lpsi is None:
        return None
    n = spec.n
    c = Fraction(n + 1, n - 1)
    E, B = [], []
    for dphi in lp:
        for da, dpsi in zip(la, lpsi):
            x = dphi + da + 1
            E.append(x * x / (n - 1))
            B.append(c * (dphi + da) + Fraction(2, n - 1) - dpsi)
    return E, B


# -- conditions -------------------------------------------------------------


def check_c1(spec: ProblemSpec) -> Check:
    """C1: the degree of phi stays above some l_phi > -1."""
    b = degree_bounds(spec.phi, 1)
    notes = []
    if not b.certified:
        return Check(Verdict.UNKNOWN, b.inf, b.inf, ("degree bounds of phi are sampled, not certified",))
    if math.isinf(b.sup):
        notes.append("phi lacks a finite degree (sup of its degree is +inf)")
        return Check(Verdict.FAILS, b.inf, b.inf, tuple(notes))
    if b.inf > -1.0:
        return Check(Verdict.HOLDS, b.inf, b.inf)
    return Check(Verdict.FAILS, b.inf, b.inf, (f"inf degree of phi = {b.inf} is not > -1",))


def check_c2(spec: ProblemSpec, grid=WITNESS_GRID) -> Check:
    """C2 with a certified lower bound gamma of the expression over all s, t."""
    n = spec.n
    dphi, ok1 = _degree_iv(spec.phi)
    da, ok2 = _degree_iv(spec.a)
    sphi, ok3 = _slope_iv(spec.phi)
    sa, ok4 = _slope_iv(spec.a)
    certified = ok1 and ok2 and ok3 and ok4
    x = dphi + da + 1
    # only the lower end matters; it stays well defined when slopes are unbounded
    gamma = x.square().lo / (n - 1)
    for hi in (sphi.hi, sa.hi):
        gamma = -math.inf if math.isinf(hi) else gamma - 2 * hi
    gamma_f = float(gamma)
    grid_vals = c2_expression_grid(spec, grid)
    witness = float(grid_vals.min()) if grid_vals.size else math.nan
    notes = []
    if certified and gamma > 0:
        return Check(Verdict.HOLDS, gamma_f, witness, exact=gamma)
    corners = _limit_witnesses(spec)
    if corners is not None and min(corners[0]) <= 0:
        e_min = min(corners[0])
        notes.append(f"C2 expression tends to {float(e_min):.6g} <= 0 at an end of the (s, t) range")
        return Check(Verdict.FAILS, gamma_f if certified else None, float(e_min), tuple(notes))
    if math.isfinite(witness) and witness <= 0:
        notes.append(f"C2 expression reaches {witness:.6g} <= 0")
        return Check(Verdict.FAILS, gamma_f if certified else None, witness, tuple(notes))
    if not certified:
        notes.append("degree bounds are sampled; C2 left undecided")
    else:
        notes.append(f"certified lower bound {gamma_f:.6g} is not positive but grid minimum is {witness:.6g}")
    return Check(Verdict.UNKNOWN, gamma_f if certified else None, witness, tuple(notes))


def classify_I(spec: ProblemSpec, grid=WITNESS_GRID) -> str:
    """Classify the favourable set I as 'all', 'empty' or 'mixed'.

    t belongs to I when ``b(t) B(s, t) >= 0`` for every s. As a, psi > 0 the
    sign of b is the sign of lam, and B = c d_phi(t) + g(s).
    """
    if spec.lam == 0.0:
        return "all"
    sigma = 1.0 if spec.lam > 0 else -1.0
    c, t_part, s_part, certified = _bracket_parts(spec)
    if not certified:
        return "mixed"
    tp = sigma * t_part
    sp = sigma * s_part
    if (tp + sp).lo >= 0:
        return "all"
    n = spec.n
    da, dpsi, _ = _s_profile(spec.a, spec.psi, grid)
    g = sigma * (float(c) * da - dpsi + 2.0 / (n - 1))
    if g.size and (Interval.point(tp.hi) + float(g.min())).hi < 0:
        return "empty"
    return "mixed"


def check_c3(spec: ProblemSpec, c2: Optional[Check] = None, grid=WITNESS_GRID) -> Check:
    """C3: bound Theta against 4 gamma / (n - 1)."""
    c2 = c2 if c2 is not None else check_c2(spec, grid)
    n = spec.n
    cls = classify_I(spec, grid)
    if cls == "all":
        return Check(Verdict.HOLDS, 0.0, 0.0, ("vacuous: I = (0, inf), sup over an empty set",))
    if cls == "mixed":
        return Check(
            Verdict.UNKNOWN, None, None,
            ("I is neither (0, inf) nor empty; I is read as a set of u^2 values and the bracket "
             "is bounded jointly over (s, t)",),
        )
    _, t_part, s_part, certified = _bracket_parts(spec)
    theta_exact = (t_part + s_part).square().hi
    theta_up = float(theta_exact)
    bracket = c3_bracket_grid(spec, grid)
    theta_w = float((bracket ** 2).max())
    if c2.verdict is Verdict.FAILS:
        return Check(Verdict.FAILS, theta_up, theta_w, ("no admissible gamma since C2 fails",))
    if c2.verdict is Verdict.HOLDS and certified and c2.exact is not None:
        if theta_exact < 4 * c2.exact / (n - 1):
            return Check(Verdict.HOLDS, theta_up, theta_w, exact=theta_exact)
    corners = _limit_witnesses(spec)
    if corners is not None:
        e_min = min(corners[0])
        b_max = max(b * b for b in corners[1])
        if b_max >= 4 * e_min / (n - 1):
            return Check(
                Verdict.FAILS, theta_up, max(theta_w, float(b_max)),
                (f"B^2 tends to {float(b_max):.6g} while 4 gamma/(n-1) <= {float(4 * e_min / (n - 1)):.6g}",),
            )
    gamma_w = c2.evidence
    if gamma_w is not None and math.isfinite(gamma_w) and theta_w >= 4.0 * gamma_w / (n - 1):
        return Check(
            Verdict.FAILS, theta_up, theta_w,
            (f"Theta >= {theta_w:.6g} exceeds 4 gamma/(n-1) <= {4.0 * gamma_w / (n - 1):.6g}",),
        )
    return Check(Verdict.UNKNOWN, theta_up, theta_w, ("interval bounds too coarse to decide C3",))


def derived_constants(spec: ProblemSpec, gamma: float, Theta: Optional[float], vacuous: bool = False):
    """(theta, alpha) from gamma and the sup of B^2 outside I."""
    if vacuous or not Theta:
        return gamma, 0.0
    n = spec.n
    theta = gamma - (n - 1) / 4.0 * Theta
    assert theta > 0, "theta must be positive whenever C3 holds"
    d_phi = degree_bounds(spec.phi, 1).sup
    alpha = (d_phi + 1.0) / (4.0 * theta) * Theta
    return theta, alpha


# -- the polynomial p-Laplacian family --------------------------------------


def _poly_gamma(spec: PolyPLaplaceSpec) -> float:
    n, p, q1, qm = spec.n, spec.p, spec.q1, spec.qm
    return 4.0 * q1 * q1 * (p - 1) ** 2 / (n - 1) ** 2 - 2.0 * (qm - q1) ** 2 * (p - 1) / (n - 1)


def thm4_range(spec: PolyPLaplaceSpec) -> Thm4Range:
    """Closed-form admissible range of r for ``Delta_p(sum a_i u^q_i) + lam u^r = 0``.

    Requires ``q_1^2 (p-1)^2/(n-1) - (p-1)(q_m - q_1)^2/2 > 0``. With
    ``c = (n+1)(p-1)/(n-1)`` and ``g`` the polynomial gamma the thresholds are
    ``c q_1 + sqrt(g)`` (lam >= 0, r below) and ``c q_m - sqrt(g)``
    (lam <= 0, r above). ``admissible`` additionally enforces the opposite
    end of the bracket when the favourable set is empty; for a single power
    both coincide.
    """
    n, p, q1, qm, r = spec.n, spec.p, spec.q1, spec.qm, spec.r
    pre = q1 * q1 * (p - 1) ** 2 / (n - 1) - (p - 1) * (qm - q1) ** 2 / 2.0
    if not pre > 0:
        raise ValueError(
            f"q_1^2 (p-1)^2/(n-1) - (p-1)(q_m-q_1)^2/2 = {pre:.6g} is not positive"
        )
    g = _poly_gamma(spec)
    root = math.sqrt(g)
    c = (n + 1) * (p - 1) / (n - 1)
    # comparisons against c q +- sqrt(g) are decided exactly: x < sqrt(g) iff x < 0 or x^2 < g
    P, Q1, QM, R = (Fraction(x) for x in (p, q1, qm, r))
    C = (n + 1) * (P - 1) / (n - 1)
    G = 4 * Q1 * Q1 * (P - 1) ** 2 / (n - 1) ** 2 - 2 * (QM - Q1) ** 2 * (P - 1) / (n - 1)

    def below_root(x: Fraction) -> bool:
        return x < 0 or x * x < G

    notes = []
    below_upper = below_root(R - C * Q1)  # r < c q_1 + sqrt(g)
    above_lower = below_root(C * QM - R)  # r > c q_m - sqrt(g)
    if spec.lambda_sign == "nonneg":
        threshold = c * q1 + root
        literal = below_upper
        admissible = literal and (R <= C * Q1 or above_lower)
    else:
        threshold = c * qm - root
        literal = above_lower
        admissible = literal and (R >= C * QM or below_upper)
    if admissible != literal:
        notes.append("r lies in the literal range but the far end of the bracket violates C3")
    if len(spec.terms) > 1 and q1 < 0:
        notes.append("q_1 < 0 with several terms: q_1^2 need not bound (p-1)^2 Q^2 from below")
    return Thm4Range(admissible, threshold, literal, g, tuple(notes))


def as_poly_plaplace(spec: ProblemSpec, rtol: float = 1e-12) -> Optional[PolyPLaplaceSpec]:
    """Recognise a ProblemSpec of the polynomial p-Laplacian shape, else None."""
    phi, a, psi = spec.phi, spec.a, spec.psi
    if not (isinstance(phi, MonomialSum) and phi.is_power):
        return None
    if not (isinstance(psi, MonomialSum) and psi.is_power):
        return None
    p = 2.0 * phi.terms[0][1] + 2.0
    if not p > 1.0:
        return None
    if isinstance(a, PowerOfMonomialSum):
        if abs(a.e - (p - 1.0)) > rtol * max(1.0, abs(p - 1.0)):
            return None
        base = a.base
    elif isinstance(a, MonomialSum):
        if abs(p - 2.0) <= rtol:
            base = a
        elif a.is_power:
            c, k = a.terms[0]
            base = monomial(k / (p - 1.0), c ** (1.0 / (p - 1.0)))
        else:
            return None
    else:
        return None
    terms = []
    for c, k in base.terms:
        q = 2.0 * k + 1.0
        if q == 0.0:
            return None
        terms.append((c / q, q))
    r = 2.0 * psi.terms[0][1] + 1.0
    sign = "nonneg" if spec.lam >= 0 else "nonpos"
    try:
        return PolyPLaplaceSpec(p=p, terms=tuple(terms), r=r, lambda_sign=sign, n=spec.n)
    except ValueError:
        return None


# -- aggregate --------------------------------------------------------------


def _finite_degree(spec: ProblemSpec) -> tuple[Verdict, list[str]]:
    notes = []
    verdict = Verdict.HOLDS
    for label in ("phi", "a"):
        f = getattr(spec, label)
        for k in (1, 2):
            b = degree_bounds(f, k)
            if not b.finite:
                notes.append(f"{label} has no {k}-order finite degree")
                if b.certified:
                    verdict = Verdict.FAILS
                elif verdict is Verdict.HOLDS:
                    verdict = Verdict.UNKNOWN
            elif not b.certified and verdict is Verdict.HOLDS:
                verdict = Verdict.UNKNOWN
    return verdict, notes


def full_report(spec: ProblemSpec, grid=WITNESS_GRID) -> AdmissibilityReport:
    notes: list[str] = []
    c1 = check_c1(spec)
    finite, fnotes = _finite_degree(spec)
    notes.extend(fnotes)
    c2 = check_c2(spec, grid)
    cls = classify_I(spec, grid)
    c3 = check_c3(spec, c2, grid)
    for c in (c1, c2, c3):
        notes.extend(c.notes)

    theta = alpha = None
    if c2.verdict is Verdict.HOLDS and c3.verdict is Verdict.HOLDS:
        theta, alpha = derived_constants(spec, c2.value, c3.value, vacuous=(cls == "all"))

    verdicts = [c1.verdict, finite, c2.verdict, c3.verdict]
    if all(v is Verdict.HOLDS for v in verdicts):
        overall = Verdict.HOLDS
    elif any(v is Verdict.FAILS for v in verdicts):
        overall = Verdict.FAILS
    else:
        overall = Verdict.UNKNOWN

    gamma_poly = thm4 = agrees = None
    poly = as_poly_plaplace(spec)
    if poly is not None:
        gamma_poly = _poly_gamma(poly)
        if c2.value is not None and c2.verdict is Verdict.HOLDS:
            scaled = 4.0 * c2.value / (spec.n - 1)
            if not math.isclose(gamma_poly, c2.value, rel_tol=1e-9, abs_tol=1e-12):
                notes.append(
                    f"polynomial-family gamma {gamma_poly:.12g} differs from the C2 bound "
                    f"{c2.value:.12g}; it equals 4 gamma/(n-1) = {scaled:.12g}"
                )
        try:
            thm4 = thm4_range(poly)
        except ValueError as exc:
            notes.append(f"polynomial range not applicable: {exc}")
        if thm4 is not None:
            notes.extend(thm4.notes)
            if spec.lam == 0.0:
                notes.append("lam = 0: r plays no role, polynomial range not compared")
            else:
                contradiction = (overall is Verdict.HOLDS and not thm4.admissible) or (
                    overall is Verdict.FAILS and thm4.admissible
                )
                agrees = not contradiction
                if contradiction:
                    notes.append(
                        f"DEFECT: general checker says {overall} but the polynomial range says "
                        f"admissible={thm4.admissible}"
                    )
    if cls == "mixed":
        notes.append("nontrivial I: treated as a set of u^2 values with the bracket bounded over all (s, t)")

    return AdmissibilityReport(
        c1=c1, c2=c2, c3=c3, I_class=cls, theta=theta, alpha=alpha,
        finite_degree=finite, overall=overall, gamma_poly=gamma_poly,
        thm4=thm4, thm4_agrees=agrees, notes=tuple(dict.fromkeys(notes)),
    )
