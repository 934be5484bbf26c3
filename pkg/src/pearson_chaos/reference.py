"""Closed-form expressions transcribed verbatim for audit.

These are *not* used by the computational pipeline; they exist so the exact
machinery can be compared against the tabulated formulas term by term.  Each
function takes plain rationals ``(m, b0, b1, b2)`` and returns rationals.
Where a tabulated expression disagrees with the exact computation, a
corrected companion is given next to it.
"""

from __future__ import annotations

import math
from fractions import Fraction

__all__ = [
    "moment_displays",
    "moment_displays_corrected",
    "coefficient_table",
    "coefficient_table_corrected",
    "hermite_square_constant",
]


def moment_displays(m, b0, b1, b2) -> tuple[Fraction, Fraction, Fraction]:
    """``E[X^2], E[X^3], E[X^4]`` exactly as tabulated."""
    m, b0, b1, b2 = map(Fraction, (m, b0, b1, b2))
    base = (b1 + m) * m + b0
    m2 = base / (1 - b2)
    m3 = (2 * b1 + m) * base / ((1 - b2) * (1 - 2 * b2)) + 2 * b0 * m / (1 - 2 * b2)
    m4 = (
        (3 * b1 + m) * (2 * b1 + m) * base / ((1 - b2) * (1 - 2 * b2) * (1 - 3 * b2))
        + (3 * b1 + m) * 2 * b0 * m / ((1 - 2 * b2) * (1 - 3 * b2))
        + 3 * b0 * base / (1 - 3 * b2)
    )
    return m2, m3, m4


def moment_displays_corrected(m, b0, b1, b2) -> tuple[Fraction, Fraction, Fraction]:
    """Same displays with the third ``E[X^4]`` term divided by ``1 - b2``.

    The tabulated third term omits this factor; it is ``3 b0 E[X^2] / (1 - 3 b2)``.
    """
    m, b0, b1, b2 = map(Fraction, (m, b0, b1, b2))
    m2, m3, m4 = moment_displays(m, b0, b1, b2)
    base = (b1 + m) * m + b0
    m4 += 3 * b0 * base / ((1 - b2) * (1 - 3 * b2)) - 3 * b0 * base / (1 - 3 * b2)
    return m2, m3, m4


def coefficient_table(m, b0, b1, b2) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Tabulated ``(c_0..c_4)`` for ``U`` and ``(d_0..d_4)`` for ``Q^2``."""
    m, b0, b1, b2 = map(Fraction, (m, b0, b1, b2))
    s = b1 + m
    c = (
        (b0 + m * s / (2 * b2 - 1)) ** 2 / (1 - b2) + 2 * m * s**3 / (3 * (2 * b2 - 1) ** 3),
        4 * b0 * s / (1 - 2 * b2) + 2 * s**2 * (b1 + 2 * m * (3 * b2 - 1)) / (3 * (1 - 2 * b2) ** 3),
        -2 * b0 - 2 * s**2 / (2 * b2 - 1),
        -2 * b1 - Fraction(4, 3) * m,
        Fraction(1, 3) - b2,
    )
    d = (
        (b0 * (2 * b2 - 1) + m * s) ** 2 / ((1 - 2 * b2) ** 2 * (1 - b2) ** 2),
        4 * s * (b0 * (2 * b2 - 1) + m * s) / ((1 - 2 * b2) ** 2 * (b2 - 1)),
        2 * (b0 * (1 - 2 * b2) ** 2 + s * (2 * b1 * (b2 - 1) + (4 * b2 - 3) * m)) / ((1 - b2) * (1 - 2 * b2) ** 2),
        4 * s / (2 * b2 - 1),
        Fraction(1),
    )
    return c, d


def coefficient_table_corrected(m, b0, b1, b2):
    """Tabulated coefficients with the sign of ``d_2`` fixed.

    The expansion of ``Q^2`` gives ``d_2`` with denominator
    ``(b2 - 1)(1 - 2 b2)^2``, the negative of the tabulated one.
    """
    c, d = coefficient_table(m, b0, b1, b2)
    return c, (d[0], d[1], -d[2], d[3], d[4])


def hermite_square_constant(p: int, j: int) -> int:
    """Coefficient of ``H_{2(p-j)}`` in ``H_p^2`` for monic Hermite polynomials.

    ``j! * C(p, j)**2`` for ``j = 0 .. p``; the leading term ``j = 0`` is 1.
    """
    if not 0 <= j <= p:
        raise ValueError("need 0 <= j <= p")
    return math.factorial(j) * math.comb(p, j) ** 2
