"""Exact polynomial arithmetic over the rationals.

Two value types are provided:

``Poly``
    univariate polynomial stored as a tuple of ascending coefficients.
``MPoly``
    sparse multivariate polynomial in ``dim`` variables.  A monomial is a
    sorted tuple of ``(variable, exponent)`` pairs with positive exponents, so
    the empty tuple is the constant monomial.  Sparse keys keep products of
    high-dimensional multilinear sums cheap.

Both types are immutable and hashable.  Coefficients are always
``fractions.Fraction``; floats only appear when a polynomial is evaluated at a
floating point argument.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

Monomial = tuple  # tuple[tuple[int, int], ...]
Scalar = Union[int, Fraction]

__all__ = [
    "Poly",
    "MPoly",
    "as_rational",
    "poly_arith",
    "poly_diff",
    "poly_compose",
    "poly_eval",
    "mono_mul",
    "dense_index",
    "sparse_index",
]


def as_rational(value) -> Fraction:
    """Convert ``value`` to an exact rational.

    Floats are read through their shortest decimal representation, so
    ``0.1`` becomes ``1/10`` rather than the binary expansion.  Strings such as
    ``"3/7"`` or ``"0.25"`` are accepted.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("booleans are not rational coefficients")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise ValueError(f"cannot convert {value!r} to a rational")
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        return Fraction(value.strip())
    # gmpy2.mpq and similar expose numerator/denominator
    num, den = getattr(value, "numerator", None), getattr(value, "denominator", None)
    if num is not None and den is not None:
        return Fraction(int(num), int(den))
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, np.integer)) and not isinstance(x, bool)


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _join_terms(parts: list[tuple[Fraction, str]]) -> str:
    """Render ``[(coeff, monomial_text), ...]`` as ``a + b*x - c*x^2``."""
    if not parts:
        return "0"
    out = []
    for i, (c, mono) in enumerate(parts):
        mag = abs(c)
        if not mono:
            body = _fmt_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(mag)}*{mono}"
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


# ---------------------------------------------------------------------------
# univariate


class Poly:
    """Univariate polynomial with exact rational coefficients.

    Parameters
    ----------
    coeffs : iterable
        Coefficients in ascending degree.  Trailing zeros are stripped, so the
        zero polynomial has ``coeffs == ()`` and ``degree == -1``.
    """

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self._hash = None

    @classmethod
    def _raw(cls, cs: list[Fraction]) -> "Poly":
        while cs and cs[-1] == 0:
            cs.pop()
        p = object.__new__(cls)
        p.coeffs = tuple(cs)
        p._hash = None
        return p

    @classmethod
    def x(cls) -> "Poly":
        return cls._raw([Fraction(0), Fraction(1)])

    @classmethod
    def const(cls, c) -> "Poly":
        return cls._raw([as_rational(c)])

    @classmethod
    def monomial(cls, degree: int, c=1) -> "Poly":
        return cls._raw([Fraction(0)] * degree + [as_rational(c)])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "Poly | None":
        if isinstance(other, Poly):
            return other
        if _is_scalar(other):
            return Poly._raw([as_rational(other)])
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        cs = list(a)
        for i, c in enumerate(b):
            cs[i] += c
        return Poly._raw(cs)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw([-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if _is_scalar(other):
            c = as_rational(other)
            return Poly._raw([c * a for a in self.coeffs]) if c else Poly()
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        cs = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    cs[i + j] += ai * bj
        return Poly._raw(cs)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not _is_scalar(other):
            return NotImplemented
        c = as_rational(other)
        return Poly._raw([a / c for a in self.coeffs])

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out, base = Poly.const(1), self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, MPoly) else None
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("Poly", self.coeffs))
        return self._hash

    # calculus -------------------------------------------------------------

    def diff(self, order: int = 1) -> "Poly":
        cs = list(self.coeffs)
        for _ in range(order):
            cs = [k * c for k, c in enumerate(cs)][1:]
        return Poly._raw(cs)

    def compose(self, inner):
        """Return ``self(inner)`` for a ``Poly`` or ``MPoly`` argument."""
        if isinstance(inner, MPoly):
            out = MPoly.const(self.leading, inner.dim)
            for c in reversed(self.coeffs[:-1]):
                out = out * inner + c
            return out if self.coeffs else MPoly.zero(inner.dim)
        if not isinstance(inner, Poly):
            raise TypeError("inner must be Poly or MPoly")
        out = Poly.const(self.leading)
        for c in reversed(self.coeffs[:-1]):
            out = out * inner + c
        return out

    def to_mpoly(self, var: int, dim: int) -> "MPoly":
        """Embed as a polynomial in variable ``var`` of a ``dim``-variate ring."""
        terms = {}
        for k, c in enumerate(self.coeffs):
            if c:
                terms[((var, k),) if k else ()] = c
        return MPoly._raw(dim, terms)

    # evaluation -----------------------------------------------------------

    def __call__(self, x):
        """Evaluate.  Exact for int/Fraction input, Horner in float64 otherwise."""
        if _is_scalar(x):
            x = as_rational(x)
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        arr = np.asarray(x, dtype=float)
        acc = np.zeros_like(arr)
        for c in reversed(self.coeffs):
            acc = acc * arr + float(c)
        return acc if arr.ndim else float(acc)

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if c:
                mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
                parts.append((c, mono))
        return _join_terms(parts)

    def __repr__(self):
        return f"Poly({self})"


# ---------------------------------------------------------------------------
# multivariate


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    """Product of two sparse monomials."""
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def dense_index(mono: Monomial, dim: int) -> tuple[int, ...]:
    out = [0] * dim
    for v, e in mono:
        out[v] = e
    return tuple(out)


def sparse_index(alpha: Sequence[int]) -> Monomial:
    if any(int(a) < 0 for a in alpha):
        raise ValueError("multi-index entries must be nonnegative")
    return tuple((i, int(a)) for i, a in enumerate(alpha) if a)


class MPoly:
    """Sparse multivariate polynomial with exact rational coefficients.

    ``terms`` maps sparse monomials to nonzero coefficients; variables are
    numbered from 0 internally and rendered as ``x1 .. xN``.
    """

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: Mapping | None = None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        clean = {}
        for mono, c in (terms or {}).items():
            key = self._normalize_key(mono, dim)
            c = as_rational(c)
            if c:
                clean[key] = clean.get(key, Fraction(0)) + c
                if not clean[key]:
                    del clean[key]
        self.dim = dim
        self.terms: dict = clean
        self._hash = None

    @staticmethod
    def _normalize_key(mono, dim: int) -> Monomial:
        mono = tuple(mono)
        if mono and not isinstance(mono[0], tuple):
            if len(mono) != dim:
                raise ValueError("dense multi-index has wrong length")
            return sparse_index(mono)
        merged: dict[int, int] = {}
        for v, e in mono:
            if not 0 <= v < dim:
                raise ValueError(f"variable index {v} outside dimension {dim}")
            if e < 0:
                raise ValueError("negative exponent")
            if e:
                merged[v] = merged.get(v, 0) + e
        return tuple(sorted(merged.items()))

    @classmethod
    def _raw(cls, dim: int, terms: dict) -> "MPoly":
        p = object.__new__(cls)
        p.dim = dim
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, dim: int) -> "MPoly":
        return cls._raw(dim, {})

    @classmethod
    def const(cls, c, dim: int) -> "MPoly":
        c = as_rational(c)
        return cls._raw(dim, {(): c} if c else {})

    @classmethod
    def var(cls, i: int, dim: int) -> "MPoly":
        if not 0 <= i < dim:
            raise ValueError("variable index out of range")
        return cls._raw(dim, {((i, 1),): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=-1)

    def degree_in(self, var: int) -> int:
        d = -1 if not self.terms else 0
        for m in self.terms:
            for v, e in m:
                if v == var and e > d:
                    d = e
        return d

    def variables(self) -> set[int]:
        return {v for m in self.terms for v, _ in m}

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    # arithmetic -----------------------------------------------------------

    def _check(self, other: "MPoly"):
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _coerce(self, other) -> "MPoly | None":
        if isinstance(other, MPoly):
            self._check(other)
            return other
        if _is_scalar(other):
            return MPoly.const(other, self.dim)
        if isinstance(other, Poly):
            if self.dim != 1:
                raise ValueError("dimension mismatch: Poly operand with dim > 1")
            return other.to_mpoly(0, 1)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in o.terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return MPoly._raw(self.dim, terms)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw(self.dim, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if _is_scalar(other):
            c = as_rational(other)
            if not c:
                return MPoly.zero(self.dim)
            return MPoly._raw(self.dim, {m: c * a for m, a in self.terms.items()})
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms: dict = {}
        get = terms.get
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = mono_mul(m1, m2)
                terms[m] = get(m, 0) + c1 * c2
        return MPoly._raw(self.dim, {m: c for m, c in terms.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not _is_scalar(other):
            return NotImplemented
        c = as_rational(other)
        return MPoly._raw(self.dim, {m: a / c for m, a in self.terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out, base = MPoly.const(1, self.dim), self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.dim == other.dim and self.terms == other.terms
        if _is_scalar(other):
            return self.terms == MPoly.const(other, self.dim).terms
        if isinstance(other, Poly) and self.dim == 1:
            return self.terms == other.to_mpoly(0, 1).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("MPoly", self.dim, frozenset(self.terms.items())))
        return self._hash

    # calculus -------------------------------------------------------------

    def diff(self, var: int, order: int = 1) -> "MPoly":
        terms = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(var, 0)
            if e < order:
                continue
            factor = math.perm(e, order)
            if e == order:
                del d[var]
            else:
                d[var] = e - order
            terms[tuple(sorted(d.items()))] = c * factor
        return MPoly._raw(self.dim, terms)

    def univariate(self) -> Poly:
        """Convert a polynomial in at most one variable (or ``dim == 1``) to ``Poly``."""
        vs = self.variables()
        if len(vs) > 1:
            raise ValueError("polynomial depends on more than one variable")
        cs: dict[int, Fraction] = {}
        for m, c in self.terms.items():
            cs[m[0][1] if m else 0] = c
        return Poly([cs.get(k, 0) for k in range(max(cs, default=-1) + 1)])

    # evaluation -----------------------------------------------------------

    def __call__(self, point):
        """Evaluate at one point (exact when all entries are rational)."""
        pt = list(point)
        if len(pt) != self.dim:
            raise ValueError(f"point has dimension {len(pt)}, expected {self.dim}")
        if all(_is_scalar(v) for v in pt):
            pt = [as_rational(v) for v in pt]
            return sum(
                (c * math.prod((pt[v] ** e for v, e in m), start=Fraction(1))
                 for m, c in self.terms.items()),
                Fraction(0),
            )
        vals = np.asarray(pt, dtype=float)
        return float(sum(float(c) * np.prod([vals[v] ** e for v, e in m]) for m, c in self.terms.items()))

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Vectorized float evaluation at the rows of an ``(n, dim)`` array."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(f"expected an (n, {self.dim}) array")
        out = np.zeros(pts.shape[0])
        for m, c in self.terms.items():
            t = np.full(pts.shape[0], float(c))
            for v, e in m:
                t *= pts[:, v] ** e
            out += t
        return out

    def __str__(self):
        def key(m):
            return (sum(e for _, e in m), dense_index(m, self.dim)[::-1])

        parts = []
        for m in sorted(self.terms, key=key):
            mono = "*".join(f"x{v + 1}" if e == 1 else f"x{v + 1}^{e}" for v, e in m)
            parts.append((self.terms[m], mono))
        return _join_terms(parts)

    def __repr__(self):
        return f"MPoly[{self.dim}]({self})"


# ---------------------------------------------------------------------------
# functional interface


def poly_arith(p, q, op: str):
    """Apply ``op`` in {add, sub, mul, scale}; ``scale`` takes a scalar ``q``."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        if isinstance(p, MPoly) and isinstance(q, MPoly):
            p._check(q)
        return p * q
    if op == "scale":
        if not _is_scalar(q) and not isinstance(q, (float, str)):
            raise TypeError("scale expects a scalar factor")
        return p * as_rational(q)
    raise ValueError(f"unknown operation {op!r}")


def poly_diff(p: Poly, order: int = 1) -> Poly:
    if order < 0:
        raise ValueError("order must be nonnegative")
    return p.diff(order)


def poly_compose(outer: Poly, inner):
    return outer.compose(inner)


def poly_eval(p, point) -> float:
    """Evaluate and round the exact value once to the nearest double.

    Float arguments are converted exactly to rationals first, so the result is
    the correctly rounded value of the polynomial at that binary number.
    """
    if isinstance(p, Poly):
        if np.ndim(point) != 0:
            raise ValueError("Poly evaluation takes a scalar point")
        x = point if _is_scalar(point) else Fraction(float(point))
        return float(p(x))
    pt = [v if _is_scalar(v) else Fraction(float(v)) for v in point]
    return float(p(pt))
