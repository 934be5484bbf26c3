"""The Pearson generator acting on polynomials.

    L f   = -theta (x - m) f' + theta b(x) f''
    Gamma(f, g) = theta b f' g'

Expectations under the stationary law are exact sums of recursion moments.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction

from .errors import MomentError
from .pearson import PearsonParams, max_moment_order, moments
from .polycalc import Poly, as_rational

__all__ = [
    "GeneratorHandle",
    "apply_L",
    "gamma_op",
    "gamma_by_definition",
    "l_inverse",
    "integrate",
]


@dataclass(frozen=True)
class GeneratorHandle:
    """A Pearson generator.

    ``theta_convention`` overrides the speed used in ``L`` without touching
    the stationary law; ``None`` means "use ``params.theta``".
    """

    params: PearsonParams
    theta_convention: Fraction | None = None

    def __post_init__(self):
        if self.theta_convention is not None:
            t = as_rational(self.theta_convention)
            if t <= 0:
                raise ValueError("theta must be positive")
            object.__setattr__(self, "theta_convention", t)

    @property
    def theta(self) -> Fraction:
        return self.theta_convention if self.theta_convention is not None else self.params.theta

    @property
    def m(self) -> Fraction:
        return self.params.m

    @property
    def b2(self) -> Fraction:
        return self.params.b2

    @property
    def b(self) -> Poly:
        return self.params.b

    def scaled(self, factor) -> "GeneratorHandle":
        """Same law, generator multiplied by ``factor``."""
        return dataclasses.replace(self, theta_convention=self.theta * as_rational(factor))

    def with_theta(self, theta) -> "GeneratorHandle":
        return dataclasses.replace(self, theta_convention=as_rational(theta))

    def moments(self, pmax: int) -> list[Fraction]:
        return moments(self.params, pmax)

    @property
    def max_moment_order(self):
        return max_moment_order(self.params)


def apply_L(gen: GeneratorHandle, f: Poly) -> Poly:
    th = gen.theta
    drift = Poly([-gen.m, 1]) * f.diff()
    return (gen.b * f.diff(2) - drift) * th


def gamma_by_definition(gen: GeneratorHandle, f: Poly, g: Poly) -> Poly:
    return (apply_L(gen, f * g) - f * apply_L(gen, g) - g * apply_L(gen, f)) / 2


def gamma_op(gen: GeneratorHandle, f: Poly, g: Poly, check: bool = True) -> Poly:
    """Carré du champ, in diffusion form ``theta b f' g'``.

    With ``check`` the result is compared against the defining formula
    ``(L(fg) - f Lg - g Lf) / 2``.
    """
    out = gen.b * f.diff() * g.diff() * gen.theta
    if check:
        ref = gamma_by_definition(gen, f, g)
        if ref != out:  # pragma: no cover - would mean an arithmetic bug
            raise AssertionError(f"carré du champ mismatch: {out} vs {ref}")
    return out


def integrate(gen: GeneratorHandle, f: Poly) -> Fraction:
    """Exact expectation of ``f`` under the stationary law."""
    if f.is_zero():
        return Fraction(0)
    if f.degree > gen.max_moment_order:
        raise MomentError(f"moment does not exist: degree {f.degree} needs moments beyond {gen.max_moment_order}")
    ms = gen.moments(f.degree)
    return sum((c * mk for c, mk in zip(f.coeffs, ms)), Fraction(0))


def l_inverse(gen: GeneratorHandle, f: Poly) -> Poly:
    """Pseudo-inverse of ``L`` on mean-zero polynomials.

    ``f`` is expanded in the orthogonal eigenbasis, the constant component is
    dropped and component ``n`` is divided by ``-lambda_n``.
    """
    from .spectral import from_eigenbasis, positive_eigenvalue, to_eigenbasis

    comps = to_eigenbasis(gen, f)
    out = {n: -c / positive_eigenvalue(gen, n) for n, c in comps.items() if n > 0}
    return from_eigenbasis(gen, out)
