"""Quantitative four-moment bounds for chaos elements against Pearson targets.

For a target with coefficients ``(m, b0, b1, b2)``, ``b2 < 1/3``, define

    Q(x) = x^2 + 2(b1+m)/(2b2-1) x + (b0 + m(b1+m)/(2b2-1)) / (b2-1)
    U(x) = (1-b2) Q(x)^2 - Q'(x)^3 (x-m) / 12

For an eigenfunction ``F`` with eigenvalue ``-lambda`` and grade ``eta`` and
``G = F + m``,

    int (Gamma(G, -L^-1 G) - b(G))^2 dmu
        <= 2(1 - b2 - eta/4) int U(G) dmu + xi (1-b2)/2 int Q(G)^2 dmu

with ``xi = max(eta - 2(1-b2), 0)``.  The square root of the right side,
times an unspecified Stein constant ``c_H``, bounds distances between the
law of ``G`` and the target.

The target is normalized to ``theta = 1/2``.  Both sides of the inequality
are unchanged by rescaling either generator (``Gamma`` and ``L^-1`` scale
inversely, and grades are ratios of eigenvalues), so the rescaling factor is
only recorded.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BoundInconsistency, MomentError, NotChaotic
from .pearson import PearsonParams
from .polycalc import MPoly, Poly, as_rational
from .tensor import ChaosElement, apply_LN, gamma_N, integrate_N, l_inverse_N

__all__ = [
    "TargetSpec",
    "BoundReport",
    "Verdict",
    "q_poly",
    "u_poly",
    "uq_coefficients",
    "moment_combination",
    "lhs_exact",
    "quadratic_identity_residual",
    "bound",
    "convergence_conditions",
    "bound_table_csv",
    "STEIN_LABEL",
]

STEIN_LABEL = "up to the Stein constant c_H"
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class TargetSpec:
    """A Pearson target with four moments, normalized to ``theta = 1/2``."""

    params: PearsonParams
    original_theta: Fraction = field(default=None)

    def __post_init__(self):
        p = self.params
        if p.b2 * 3 >= 1:
            raise MomentError(f"moment does not exist: a target needs b2 < 1/3, got {p.b2}")
        if p.is_degenerate:
            raise ValueError("degenerate target")
        object.__setattr__(self, "original_theta", p.theta if self.original_theta is None else self.original_theta)
        if p.theta != HALF:
            object.__setattr__(self, "params", p.with_theta(HALF))

    @property
    def theta_rescale(self) -> Fraction:
        """Factor applied to the input speed to reach ``theta = 1/2``."""
        return HALF / self.original_theta

    @property
    def m(self) -> Fraction:
        return self.params.m

    @property
    def b2(self) -> Fraction:
        return self.params.b2

    @property
    def eta_tilde(self) -> Fraction:
        return 2 * (1 - self.params.b2)


def _target(t) -> TargetSpec:
    return t if isinstance(t, TargetSpec) else TargetSpec(t)


def q_poly(target) -> Poly:
    t = _target(target).params
    m, b0, b1, b2 = t.m, t.b0, t.b1, t.b2
    return Poly([(b0 + m * (b1 + m) / (2 * b2 - 1)) / (b2 - 1), 2 * (b1 + m) / (2 * b2 - 1), 1])


def u_poly(target) -> Poly:
    t = _target(target).params
    q = q_poly(target)
    return q * q * (1 - t.b2) - q.diff() ** 3 * Poly([-t.m, 1]) / 12


def uq_coefficients(target) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Coefficients ``(c_0..c_4)`` of ``U`` and ``(d_0..d_4)`` of ``Q^2``."""
    u = u_poly(target)
    q = q_poly(target)
    q2 = q * q
    return tuple(u.coeff(j) for j in range(5)), tuple(q2.coeff(j) for j in range(5))


def moment_combination(target, ms: Sequence) -> tuple:
    """``(sum c_j m_j, sum d_j m_j)`` from moments ``m_1..m_4`` (``m_0 = 1``).

    A length-5 sequence starting with ``m_0`` is accepted too.  Rational input
    gives exact output; floats give floats.
    """
    ms = list(ms)
    if len(ms) == 5:
        ms = ms[1:]
    if len(ms) != 4:
        raise ValueError("expected the moments m_1..m_4")
    c, d = uq_coefficients(target)
    exact = all(isinstance(v, (int, Fraction)) for v in ms)
    full = [1] + ms
    if exact:
        full = [as_rational(v) for v in full]
        return (sum((cj * mj for cj, mj in zip(c, full)), Fraction(0)),
                sum((dj * mj for dj, mj in zip(d, full)), Fraction(0)))
    fc = [float(v) for v in c]
    fd = [float(v) for v in d]
    return (sum(cj * float(mj) for cj, mj in zip(fc, full)),
            sum(dj * float(mj) for dj, mj in zip(fd, full)))


def _gamma_term(G: ChaosElement) -> MPoly:
    """``Gamma(G, -L^-1 G) = Gamma(F, F) / lambda`` for an eigenfunction."""
    F = G.F
    return gamma_N(G.gen, F, F, check=False) / G.lam


def lhs_exact(G: ChaosElement, target) -> Fraction:
    """``int (Gamma(G, -L^-1 G) - b(G))^2 dmu`` in exact arithmetic."""
    t = _target(target).params
    Gp = G.G
    for v in Gp.variables():
        need = 4 * G.F.degree_in(v)
        if need > G.gen.coords[v].max_moment_order:
            raise MomentError(f"moments insufficient: coordinate {v + 1} needs order {need}")
    diff = _gamma_term(G) - t.b.compose(Gp)
    return integrate_N(G.gen, diff * diff)


def quadratic_identity_residual(G: ChaosElement, target, rhs_eigenvalue=None) -> MPoly:
    """``Gamma(G,-L^-1 G) - b(G) - (L + 2(1-b2) lambda) Q(G) / (2 lambda)``.

    The left side uses the generic pseudo-inverse.  ``rhs_eigenvalue``
    replaces ``lambda`` on the right side, which is how a mismatched speed
    convention shows up.
    """
    t = _target(target).params
    Gp = G.G
    lhs = gamma_N(G.gen, Gp, -l_inverse_N(G.gen, Gp), check=False) - t.b.compose(Gp)
    lam = G.lam if rhs_eigenvalue is None else as_rational(rhs_eigenvalue)
    qg = q_poly(target).compose(Gp)
    rhs = (apply_LN(G.gen, qg) + qg * (2 * (1 - t.b2) * lam)) / (2 * lam)
    return lhs - rhs


@dataclass(frozen=True)
class BoundReport:
    eta: Fraction
    eta_tilde: Fraction
    xi: Fraction
    U_int: Fraction
    Q2_int: Fraction
    lhs_exact: Fraction | None
    rhs_sq: Fraction
    regime: str
    c_H: Fraction
    distance_bound: float
    theta_rescale: Fraction
    moments: tuple[Fraction, ...]
    measure: str
    label: str = STEIN_LABEL

    def to_dict(self, as_float: bool = False) -> dict:
        def conv(v):
            if v is None:
                return None
            if isinstance(v, Fraction):
                return float(v) if as_float else (
                    str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}")
            return v

        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            out[f.name] = [conv(x) for x in v] if isinstance(v, tuple) else conv(v)
        return out


def bound(G: ChaosElement, target, c_H=1, exact_lhs: bool | None = None, lhs_term_limit: int = 64) -> BoundReport:
    """Evaluate the four-moment bound for ``G`` against ``target``.

    ``exact_lhs=None`` computes the left side when ``G`` has at most
    ``lhs_term_limit`` product terms; ``True`` forces it, ``False`` skips it.
    """
    ts = _target(target)
    t = ts.params
    if G.grade is None:
        raise NotChaotic("not chaotic: G has no chaos grade")
    if G.shift != t.m:
        raise ValueError(f"G must be shifted to the target mean {t.m} (got {G.shift}); use G.shifted(m)")
    c_H = as_rational(c_H)
    if c_H <= 0:
        raise ValueError("c_H must be positive")
    eta = G.grade
    eta_t = ts.eta_tilde
    xi = max(eta - eta_t, Fraction(0))
    regime = "low-grade" if eta <= eta_t else "high-grade"
    ms = G.moments(4)
    U_int, Q2_int = moment_combination(ts, ms)
    rhs = 2 * (1 - t.b2 - eta / 4) * U_int + xi * (1 - t.b2) / 2 * Q2_int
    if rhs < 0:
        raise BoundInconsistency(f"negative bound {rhs}")
    lhs = None
    if exact_lhs or (exact_lhs is None and G.n_terms() <= lhs_term_limit):
        lhs = lhs_exact(G, ts)
        if lhs > rhs:
            raise BoundInconsistency(f"left side {lhs} exceeds bound {rhs}")
    measure = "product of the stationary laws of the coordinates of G's generator"
    return BoundReport(
        eta, eta_t, xi, U_int, Q2_int, lhs, rhs, regime, c_H,
        float(c_H) * math.sqrt(rhs), ts.theta_rescale, tuple(ms), measure,
    )


@dataclass(frozen=True)
class Verdict:
    cond_i: bool
    cond_ii: bool
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.cond_i and self.cond_ii


def convergence_conditions(reports: Sequence[BoundReport], tol: float = 1e-2, eta_tol: float | None = None) -> Verdict:
    """Finite-sequence check of the two sufficient conditions for convergence.

    (i) ``int U`` tends to 0: the last value is within ``tol`` and no larger
    in size than the first.
    (ii) along the high-grade subsequence, ``int Q^2`` stays finite and the
    grade gap ``xi`` shrinks: non-increasing, last value within ``eta_tol``.
    """
    if not reports:
        raise ValueError("need at least one report")
    eta_tol = tol if eta_tol is None else eta_tol
    notes = []
    us = [abs(float(r.U_int)) for r in reports]
    cond_i = us[-1] <= tol and us[-1] <= us[0]
    if not cond_i:
        notes.append(f"U integral not vanishing: first {us[0]:.3g}, last {us[-1]:.3g}")
    high = [r for r in reports if r.regime == "high-grade"]
    cond_ii = True
    if high:
        q2 = [float(r.Q2_int) for r in high]
        xis = [float(r.xi) for r in high]
        finite = all(math.isfinite(v) for v in q2)
        shrinking = all(b <= a for a, b in zip(xis, xis[1:])) and xis[-1] <= eta_tol
        cond_ii = finite and shrinking
        if not cond_ii:
            notes.append(f"grade gap not closing along high-grade terms: xi = {xis}")
    return Verdict(cond_i, cond_ii, tuple(notes))


BOUND_COLUMNS = ("k", "eta", "xi", "U_int", "Q2_int", "rhs_sq", "bound")


def bound_table_csv(rows: Iterable[tuple[int, BoundReport]], as_float: bool = False) -> str:
    """CSV text with columns ``k, eta, xi, U_int, Q2_int, rhs_sq, bound``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BOUND_COLUMNS)
    for k, r in rows:
        d = r.to_dict(as_float)
        w.writerow([k, d["eta"], d["xi"], d["U_int"], d["Q2_int"], d["rhs_sq"], repr(r.distance_bound)])
    return buf.getvalue()
