"""Self-check suites run by ``pearson-chaos verify``.

Each suite returns a list of :class:`Check`.  Exact suites compare rationals;
the quadrature suite uses a relative tolerance.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import reference
from .errors import PearsonError
from .fourmoments import TargetSpec, quadratic_identity_residual, uq_coefficients
from .generator import GeneratorHandle, apply_L, gamma_by_definition, gamma_op, integrate, l_inverse
from .pearson import (
    PearsonParams,
    beta_law,
    f_law,
    gamma_law,
    gaussian,
    inverse_gamma,
    moments,
    skew_t,
    student_t,
)
from .polycalc import Poly
from .spectral import (
    chaos_grade,
    eigenvalue,
    is_chaotic,
    max_eigen_degree,
    orthopoly,
    positive_eigenvalue,
    square_expansion,
)
from .stein import sigma2_from_density
from .tensor import TensorGenerator, tensor_eigenfunction

__all__ = ["Check", "SUITES", "run_suite", "class_zoo", "random_params"]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name}" + (f"  ({self.detail})" if self.detail else "")


def class_zoo() -> dict[str, PearsonParams]:
    """One member of every class with four moments, at assorted speeds."""
    return {
        "gaussian": gaussian(1, 2, theta=Fraction(1, 2)),
        "gamma": gamma_law(3, 2),
        "beta": beta_law(2, 3, theta=3),
        "skew_t": skew_t(6, 1, Fraction(1, 2), 2),
        "student_t": student_t(9),
        "inverse_gamma": inverse_gamma(7, 2),
        "f": f_law(5, 12),
    }


def _rand_q(rng: random.Random, lo: int, hi: int, den: int = 12) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))


def random_params(rng: random.Random, b2_max: Fraction = Fraction(1, 3)) -> PearsonParams:
    """Random valid coefficients with ``b2 < b2_max``."""
    while True:
        b2 = Fraction(rng.randint(-24, 23), 24) * b2_max
        m = _rand_q(rng, -3, 3)
        b1 = _rand_q(rng, -2, 2)
        b0 = _rand_q(rng, -2, 4)
        # shift b0 so that b(m) > 0
        bm = b2 * m * m + b1 * m + b0
        if bm <= 0:
            b0 += -bm + Fraction(rng.randint(1, 8), 4)
        try:
            p = PearsonParams(Fraction(rng.randint(1, 6), rng.randint(1, 4)), m, b0, b1, b2)
        except PearsonError:
            continue
        if b2 < b2_max:
            return p


def _rand_poly(rng: random.Random, deg: int) -> Poly:
    return Poly([Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(deg + 1)])


def suite_moments(seed: int = 0, n: int = 50) -> list[Check]:
    """Recursion against the tabulated closed forms for ``E[X^2..4]``."""
    rng = random.Random(seed)
    bad = {2: 0, 3: 0, 4: 0}
    bad_fixed = 0
    for _ in range(n):
        p = random_params(rng)
        ms = moments(p, 4)
        shown = reference.moment_displays(p.m, p.b0, p.b1, p.b2)
        fixed = reference.moment_displays_corrected(p.m, p.b0, p.b1, p.b2)
        for j, v in zip((2, 3, 4), shown):
            bad[j] += ms[j] != v
        bad_fixed += tuple(ms[2:5]) != fixed
    out = [Check(f"closed form E[X^{j}] (as tabulated)", bad[j] == 0, f"{n - bad[j]}/{n} exact") for j in (2, 3, 4)]
    out.append(Check("closed form E[X^4] with 1/(1-b2) in the third term", bad_fixed == 0,
                     f"{n - bad_fixed}/{n} exact"))
    return out


def suite_table1(seed: int = 0, n: int = 50) -> list[Check]:
    """``U`` and ``Q^2`` coefficients against the tabulated expressions."""
    rng = random.Random(seed)
    names = [f"c{j}" for j in range(5)] + [f"d{j}" for j in range(5)]
    bad = dict.fromkeys(names, 0)
    bad_fixed = 0
    for _ in range(n):
        p = random_params(rng)
        c, d = uq_coefficients(TargetSpec(p))
        tc, td = reference.coefficient_table(p.m, p.b0, p.b1, p.b2)
        for name, x, y in zip(names, c + d, tc + td):
            bad[name] += x != y
        fc, fd = reference.coefficient_table_corrected(p.m, p.b0, p.b1, p.b2)
        bad_fixed += (c, d) != (fc, fd)
    out = [Check(f"coefficient {k} (as tabulated)", v == 0, f"{n - v}/{n} exact") for k, v in bad.items()]
    out.append(Check("all coefficients with d2 sign fixed", bad_fixed == 0, f"{n - bad_fixed}/{n} exact"))
    return out


def suite_grades(seed: int = 0, n: int = 1000) -> list[Check]:
    """Grades, eigenvalue ratios and the chaotic threshold over a sweep."""
    rng = random.Random(seed)
    ok_formula = ok_ratio = ok_flag = ok_range = 0
    for i in range(n):
        b2 = Fraction(rng.randint(-60, 30), rng.randint(30, 120))
        deg = rng.randint(1, 6)
        p = PearsonParams(Fraction(rng.randint(1, 5), 2), 0, 1, 0, b2)
        g = GeneratorHandle(p)
        expect = b2 < Fraction(1, 4 * deg - 1)
        ok_flag += is_chaotic(g, deg) == expect
        if not expect:
            ok_formula += 1
            ok_ratio += 1
            ok_range += 1
            continue
        eta = chaos_grade(g, deg)
        closed = Fraction(2) if b2 == 0 else 2 * (1 + deg / (deg - 1 - 1 / b2))
        ok_formula += eta == closed
        ok_ratio += eta == positive_eigenvalue(g, 2 * deg) / positive_eigenvalue(g, deg)
        if b2 > 0:
            ok_range += Fraction(4, 3) < eta <= 2 - 2 * b2
        else:
            ok_range += eta >= 2
    out = [
        Check("chaotic iff b2 < 1/(4n-1)", ok_flag == n, f"{ok_flag}/{n}"),
        Check("grade closed form", ok_formula == n, f"{ok_formula}/{n}"),
        Check("grade equals lambda_2n / lambda_n", ok_ratio == n, f"{ok_ratio}/{n}"),
        Check("heavy-tail grades in (4/3, 2-2b2], light tails >= 2", ok_range == n, f"{ok_range}/{n}"),
    ]
    flat = all(chaos_grade(GeneratorHandle(q), k) == 2 for q in (gaussian(), gamma_law(3)) for k in range(1, 8))
    out.append(Check("grade 2 for Gaussian and Gamma", flat))
    beta_ok = all(
        chaos_grade(GeneratorHandle(beta_law(a, b)), k) == 2 * (1 + Fraction(k) / (k - 1 + a + b))
        for a in (Fraction(1, 2), 1, 2, 5) for b in (Fraction(1, 3), 1, 3) for k in range(1, 6)
    )
    out.append(Check("Beta grade 2(1 + n/(n-1+a+b))", beta_ok))
    return out


def suite_identities(seed: int = 0, n: int = 20) -> list[Check]:
    """Exact generator identities for every class in :func:`class_zoo`."""
    rng = random.Random(seed)
    out = []
    for name, p in class_zoo().items():
        g = GeneratorHandle(p)
        x = Poly.x()
        # Gamma(x, -L^-1 x) = b(x)
        char = gamma_op(g, x, -l_inverse(g, x)) - p.b
        out.append(Check(f"{name}: Gamma(x, -L^-1 x) = b", char.is_zero(), "" if char.is_zero() else str(char)))
        top = min(4, max_eigen_degree(g))
        eig_ok = all((apply_L(g, orthopoly(g, k).poly) - orthopoly(g, k).poly * eigenvalue(g, k)).is_zero()
                     for k in range(top + 1))
        out.append(Check(f"{name}: L P_n = -lambda_n P_n, n <= {top}", eig_ok))
        gam_ok = inv_ok = True
        for _ in range(n):
            f, h = _rand_poly(rng, rng.randint(0, 4)), _rand_poly(rng, rng.randint(0, 4))
            gam_ok &= (gamma_op(g, f, h, check=False) - gamma_by_definition(g, f, h)).is_zero()
            f = _rand_poly(rng, rng.randint(0, top))
            inv_ok &= (apply_L(g, l_inverse(g, f)) - (f - integrate(g, f))).is_zero()
        out.append(Check(f"{name}: Gamma formula equals (L(fg) - f Lg - g Lf)/2", gam_ok))
        out.append(Check(f"{name}: L L^-1 f = f - E f", inv_ok))
        if p.b2 * 3 < 1:
            tg = TensorGenerator((g,))
            res_ok = True
            for k in range(1, top + 1):
                G = tensor_eigenfunction(tg, [((k,), 1)], shift=p.m, require_chaotic=False)
                res_ok &= quadratic_identity_residual(G, p).is_zero()
            out.append(Check(f"{name}: Gamma(G,-L^-1 G) - b(G) = (L + 2(1-b2) lambda) Q(G) / (2 lambda), n <= {top}",
                             res_ok))
    return out


def suite_hermite(seed: int = 0, n: int = 5) -> list[Check]:
    """``H_p^2`` in the Hermite basis against ``j! C(p, j)^2``."""
    g = GeneratorHandle(gaussian())
    out = []
    for p in range(1, n + 1):
        sq = square_expansion(g, orthopoly(g, p))
        want = {2 * (p - j): Fraction(reference.hermite_square_constant(p, j)) for j in range(p + 1)}
        out.append(Check(f"H_{p}^2 expansion", sq == want, "" if sq == want else f"{sq} != {want}"))
    return out


def suite_stein(seed: int = 0, n: int = 100, rtol: float = 1e-6) -> list[Check]:
    """``sigma^2`` by quadrature against ``2 theta b`` on quantile grids."""
    from .pearson import cdf
    from scipy import optimize

    out = []
    qs = np.linspace(0.005, 0.995, n)
    for name, p in class_zoo().items():
        lo, hi = p.support
        # quantile grid via bracketing on the closed-form cdf
        pts = []
        for q in qs:
            a = lo + 1e-9 if np.isfinite(lo) else float(p.m) - 1.0
            b = hi - 1e-9 if np.isfinite(hi) else float(p.m) + 1.0
            while not np.isfinite(lo) and cdf(p, a) > q:
                a = float(p.m) - 2 * (float(p.m) - a)
            while not np.isfinite(hi) and cdf(p, b) < q:
                b = float(p.m) + 2 * (b - float(p.m))
            pts.append(optimize.brentq(lambda x: float(cdf(p, x)) - q, a, b, xtol=1e-14))
        pts = np.array(pts)
        got = sigma2_from_density(p, pts)
        want = 2 * float(p.theta) * p.b(pts)
        err = float(np.max(np.abs(got - want) / np.abs(want)))
        out.append(Check(f"{name}: sigma^2 = 2 theta b on {n} points", err <= rtol, f"max rel err {err:.2e}"))
    return out


SUITES: dict[str, Callable[..., list[Check]]] = {
    "identities": suite_identities,
    "table1": suite_table1,
    "grades": suite_grades,
    "stein": suite_stein,
    "moments": suite_moments,
    "hermite": suite_hermite,
}


def run_suite(name: str, seed: int = 0, n: int | None = None) -> list[Check]:
    if name == "all":
        return [c for k in SUITES for c in run_suite(k, seed, n)]
    fn = SUITES[name]
    return fn(seed) if n is None else fn(seed, n)
