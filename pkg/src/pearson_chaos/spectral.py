"""Eigenvalues, orthogonal eigenpolynomials and chaos grades.

For a Pearson generator the polynomial eigenvalues are
``-lambda_n = -n (1 - (n-1) b2) theta``, valid while ``b2 < 1/(2n-1)``.  The
eigenfunction of degree ``n`` is the monic orthogonal polynomial of the
stationary law, obtained here by Gram-Schmidt on exact moments so that
heavy-tailed laws need no special recurrences.

The chaos grade ``eta_n = lambda_{2n} / lambda_n`` bounds the spectrum of
``P_n**2``; it exists when ``b2 < 1/(4n-1)``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, MomentError, NotChaotic, NotEigenvalue
from .generator import GeneratorHandle, apply_L, integrate
from .polycalc import Poly

__all__ = [
    "Eigenfunction",
    "eigenvalue",
    "positive_eigenvalue",
    "max_eigen_degree",
    "max_chaotic_degree",
    "orthopoly",
    "eigenbasis",
    "to_eigenbasis",
    "from_eigenbasis",
    "is_chaotic",
    "chaos_grade",
    "square_expansion",
    "direct_eigenpoly",
]


@dataclass(frozen=True)
class Eigenfunction:
    degree: int
    poly: Poly
    eigenvalue: Fraction
    gen: GeneratorHandle
    grade: Fraction | None = None


def _bound_limit(b2: Fraction, k: int) -> bool:
    """``b2 < 1/k`` for positive ``k``."""
    return b2 * k < 1


def max_eigen_degree(gen: GeneratorHandle) -> int | float:
    """Largest ``n`` with ``b2 < 1/(2n-1)`` (``inf`` when ``b2 <= 0``)."""
    b2 = gen.b2
    if b2 <= 0:
        return math.inf
    # 2n - 1 < 1/b2
    t = 1 / b2
    n = (t + 1) / 2
    return math.ceil(n) - 1


def max_chaotic_degree(gen: GeneratorHandle) -> int | float:
    """Largest ``n`` with ``b2 < 1/(4n-1)``."""
    b2 = gen.b2
    if b2 <= 0:
        return math.inf
    t = 1 / b2
    n = (t + 1) / 4
    return math.ceil(n) - 1


def positive_eigenvalue(gen: GeneratorHandle, n: int) -> Fraction:
    """``lambda_n`` (so that ``L P_n = -lambda_n P_n``)."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n >= 1 and not _bound_limit(gen.b2, 2 * n - 1):
        raise NotEigenvalue(f"not an eigenvalue: degree {n} requires b2 < 1/{2 * n - 1}, got {gen.b2}")
    return n * (1 - (n - 1) * gen.b2) * gen.theta


def eigenvalue(gen: GeneratorHandle, n: int) -> Fraction:
    return -positive_eigenvalue(gen, n)


@functools.lru_cache(maxsize=1024)
def _basis(gen: GeneratorHandle, n: int) -> tuple[Poly, ...]:
    if n == 0:
        return (Poly.const(1),)
    if 2 * n > gen.max_moment_order:
        raise MomentError(f"moments insufficient: degree {n} needs moments up to {2 * n}")
    lower = _basis(gen, n - 1)
    x_n = Poly.monomial(n)
    p = x_n
    for q in lower:
        p = p - q * (integrate(gen, x_n * q) / integrate(gen, q * q))
    if apply_L(gen, p) != p * eigenvalue(gen, n):  # pragma: no cover - guards the recursion
        raise AssertionError(f"Gram-Schmidt polynomial of degree {n} is not an eigenfunction")
    return lower + (p,)


def eigenbasis(gen: GeneratorHandle, n: int) -> tuple[Poly, ...]:
    """Monic eigenpolynomials ``P_0 .. P_n``."""
    return _basis(gen, n)


def _basis_for_degree(gen: GeneratorHandle, n: int) -> tuple[Poly, ...]:
    # b2 < 1/(2n-1) is the same condition as finiteness of the moment of order 2n,
    # so Gram-Schmidt is available on the whole polynomial spectrum
    if n > max_eigen_degree(gen):
        raise DomainError(f"outside domain: degree {n} exceeds the polynomial spectrum (b2={gen.b2})")
    return _basis(gen, n)


def direct_eigenpoly(gen: GeneratorHandle, n: int) -> Poly:
    """Monic eigenpolynomial of degree ``n`` from the triangular action of ``L``.

    ``L x^j = theta [(-j + b2 j(j-1)) x^j + (m j + b1 j(j-1)) x^(j-1) + b0 j(j-1) x^(j-2)]``,
    so the coefficients follow by back substitution from the leading one.
    """
    th, m = gen.theta, gen.m
    p = gen.params
    lam = -positive_eigenvalue(gen, n)
    diag = [th * (-j + p.b2 * j * (j - 1)) for j in range(n + 1)]
    c = [Fraction(0)] * (n + 1)
    c[n] = Fraction(1)
    for j in range(n - 1, -1, -1):
        # coefficient of x^j in (L - lam) P must vanish
        s = c[j + 1] * th * (m * (j + 1) + p.b1 * (j + 1) * j)
        if j + 2 <= n:
            s += c[j + 2] * th * p.b0 * (j + 2) * (j + 1)
        c[j] = -s / (diag[j] - lam)
    return Poly(c)


def orthopoly(gen: GeneratorHandle, n: int) -> Eigenfunction:
    """Monic orthogonal eigenpolynomial of degree ``n``."""
    poly = _basis(gen, n)[n]
    grade = chaos_grade(gen, n) if n >= 1 and is_chaotic(gen, n) else None
    return Eigenfunction(n, poly, eigenvalue(gen, n), gen, grade)


def to_eigenbasis(gen: GeneratorHandle, f: Poly) -> dict[int, Fraction]:
    """Coefficients of ``f`` in the eigenbasis, by triangular elimination."""
    if f.is_zero():
        return {}
    basis = _basis_for_degree(gen, f.degree)
    out = {}
    rest = f
    for k in range(f.degree, -1, -1):
        c = rest.coeff(k)
        if c:
            out[k] = c
            rest = rest - basis[k] * c
    return dict(sorted(out.items()))


def from_eigenbasis(gen: GeneratorHandle, coeffs: dict[int, Fraction]) -> Poly:
    if not coeffs:
        return Poly()
    basis = _basis_for_degree(gen, max(coeffs))
    out = Poly()
    for k, c in coeffs.items():
        out = out + basis[k] * c
    return out


def is_chaotic(gen: GeneratorHandle, n: int) -> bool:
    if n < 1:
        raise ValueError("chaotic-ness is defined for n >= 1")
    return _bound_limit(gen.b2, 4 * n - 1)


def chaos_grade(gen: GeneratorHandle, n: int) -> Fraction:
    """``eta_n = 2 (1 + n / (n - 1 - 1/b2))`` (and ``2`` when ``b2 = 0``)."""
    if not is_chaotic(gen, n):
        raise NotChaotic(f"not chaotic: degree {n} requires b2 < 1/{4 * n - 1}, got {gen.b2}")
    b2 = gen.b2
    eta = Fraction(2) if b2 == 0 else 2 * (1 + n / (n - 1 - 1 / b2))
    ratio = positive_eigenvalue(gen, 2 * n) / positive_eigenvalue(gen, n)
    if ratio != eta:  # pragma: no cover
        raise AssertionError("grade formula disagrees with the eigenvalue ratio")
    return eta


def square_expansion(gen: GeneratorHandle, F: Eigenfunction | Poly) -> dict[int, Fraction]:
    """Coefficients of ``F**2`` in the eigenbasis ``{k: c_k}``."""
    poly = F.poly if isinstance(F, Eigenfunction) else F
    # P_{2n} needs moments up to order 4n, the same condition as chaotic-ness
    if 4 * poly.degree > gen.max_moment_order:
        raise MomentError(f"moments insufficient: expanding F^2 needs moments up to {4 * poly.degree}, "
                          f"only {gen.max_moment_order} exist")
    return to_eigenbasis(gen, poly * poly)
