"""Tensorized Pearson generators and multi-index chaos.

The generator of ``N`` independent Pearson diffusions acts on polynomials in
``x_1 .. x_N`` as the sum of the coordinate generators.  Its polynomial
eigenfunctions are products ``P_alpha = prod_i P_{alpha_i}(x_i)`` with
eigenvalue ``-sum_i lambda_{alpha_i}``.

Product-basis coefficients use the same sparse keys as ``MPoly`` monomials,
read as ``((i, alpha_i), ...)`` over the nonzero entries of ``alpha``.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    CoefficientError,
    DomainError,
    MixedEigenvalues,
    MomentError,
    NotChaotic,
)
from .generator import GeneratorHandle
from .homogeneous import HomogeneousStructure
from .pearson import sample as pearson_sample
from .polycalc import MPoly, Poly, as_rational, dense_index, sparse_index
from .spectral import (
    chaos_grade,
    eigenbasis,
    is_chaotic,
    max_eigen_degree,
    positive_eigenvalue,
    to_eigenbasis,
)

__all__ = [
    "TensorGenerator",
    "ChaosElement",
    "apply_LN",
    "gamma_N",
    "gamma_N_by_definition",
    "integrate_N",
    "l_inverse_N",
    "to_product_basis",
    "from_product_basis",
    "product_eigenvalue",
    "tensor_eigenfunction",
    "tensor_chaos_grade",
    "weighted_average_grade",
    "homogeneous_sum",
    "first_chaos",
]


@dataclass(frozen=True)
class TensorGenerator:
    coords: tuple[GeneratorHandle, ...]

    def __post_init__(self):
        coords = tuple(self.coords)
        if not coords:
            raise ValueError("a tensor generator needs at least one coordinate")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def iid(cls, base: GeneratorHandle, k: int) -> "TensorGenerator":
        return cls((base,) * k)

    @property
    def N(self) -> int:
        return len(self.coords)

    def __getitem__(self, i: int) -> GeneratorHandle:
        return self.coords[i]

    def scaled(self, factor) -> "TensorGenerator":
        return TensorGenerator(tuple(c.scaled(factor) for c in self.coords))

    def _check(self, f: MPoly):
        if f.dim != self.N:
            raise ValueError(f"dimension mismatch: polynomial in {f.dim} variables, generator has {self.N}")


# ---------------------------------------------------------------------------
# operators


def _replace_exp(mono: tuple, pos: int, e: int) -> tuple:
    v = mono[pos][0]
    if e == 0:
        return mono[:pos] + mono[pos + 1 :]
    return mono[:pos] + ((v, e),) + mono[pos + 1 :]


def apply_LN(gen: TensorGenerator, f: MPoly) -> MPoly:
    """Sum of the coordinate generators, applied monomial by monomial."""
    gen._check(f)
    out: dict = {}
    for mono, c in f.terms.items():
        for pos, (v, e) in enumerate(mono):
            h = gen.coords[v]
            p = h.params
            th = h.theta
            ee = e * (e - 1)
            for new_e, w in (
                (e, -e + p.b2 * ee),
                (e - 1, h.m * e + p.b1 * ee),
                (e - 2, p.b0 * ee),
            ):
                if w and new_e >= 0:
                    key = _replace_exp(mono, pos, new_e)
                    out[key] = out.get(key, 0) + c * th * w
    return MPoly._raw(f.dim, {m: c for m, c in out.items() if c})


def gamma_N_by_definition(gen: TensorGenerator, f: MPoly, g: MPoly) -> MPoly:
    return (apply_LN(gen, f * g) - f * apply_LN(gen, g) - g * apply_LN(gen, f)) / 2


def gamma_N(gen: TensorGenerator, f: MPoly, g: MPoly, check: bool = True) -> MPoly:
    """``sum_i theta_i b_i(x_i) d_i f d_i g``, optionally checked against the definition."""
    gen._check(f)
    gen._check(g)
    out = MPoly.zero(f.dim)
    for v in sorted(f.variables() & g.variables()):
        h = gen.coords[v]
        bv = h.b.to_mpoly(v, f.dim)
        out = out + bv * f.diff(v) * g.diff(v) * h.theta
    if check:
        ref = gamma_N_by_definition(gen, f, g)
        if ref != out:  # pragma: no cover
            raise AssertionError("carré du champ mismatch")
    return out


def integrate_N(gen: TensorGenerator, f: MPoly) -> Fraction:
    """Exact expectation under the product of the stationary laws."""
    gen._check(f)
    need: dict[int, int] = {}
    for mono in f.terms:
        for v, e in mono:
            if e > need.get(v, 0):
                need[v] = e
    tables = {}
    for v, e in need.items():
        h = gen.coords[v]
        if e > h.max_moment_order:
            raise MomentError(f"moment does not exist: coordinate {v + 1} needs order {e}")
        tables[v] = h.moments(e)
    total = Fraction(0)
    for mono, c in f.terms.items():
        t = c
        for v, e in mono:
            t *= tables[v][e]
        total += t
    return total


# ---------------------------------------------------------------------------
# product eigenbasis


@functools.lru_cache(maxsize=8192)
def _mono_to_basis(h: GeneratorHandle, e: int) -> tuple[tuple[int, Fraction], ...]:
    return tuple(to_eigenbasis(h, Poly.monomial(e)).items())


@functools.lru_cache(maxsize=8192)
def _basis_to_mono(h: GeneratorHandle, k: int) -> tuple[tuple[int, Fraction], ...]:
    poly = eigenbasis(h, k)[k]
    return tuple((i, c) for i, c in enumerate(poly.coeffs) if c)


def _change_basis(gen: TensorGenerator, terms: Mapping, table) -> dict:
    out: dict = {}
    for mono, c in terms.items():
        factors = [[(v, k, w) for k, w in table(gen.coords[v], e)] for v, e in mono]
        for combo in itertools.product(*factors):
            coef = c
            key = []
            for v, k, w in combo:
                coef *= w
                if k:
                    key.append((v, k))
            key = tuple(key)
            out[key] = out.get(key, 0) + coef
    return {k: c for k, c in out.items() if c}


def _check_domain(gen: TensorGenerator, f: MPoly):
    for v in f.variables():
        d = f.degree_in(v)
        if d > max_eigen_degree(gen.coords[v]):
            raise DomainError(
                f"outside domain: degree {d} in coordinate {v + 1} exceeds its polynomial spectrum"
            )


def to_product_basis(gen: TensorGenerator, f: MPoly) -> dict:
    """Coefficients of ``f`` on the products ``prod_i P_{alpha_i}(x_i)``."""
    gen._check(f)
    _check_domain(gen, f)
    return _change_basis(gen, f.terms, _mono_to_basis)


def from_product_basis(gen: TensorGenerator, coeffs: Mapping) -> MPoly:
    return MPoly._raw(gen.N, _change_basis(gen, coeffs, _basis_to_mono))


def product_eigenvalue(gen: TensorGenerator, key: Iterable) -> Fraction:
    """``sum_i lambda_{alpha_i}`` for a sparse multi-index (positive)."""
    return sum((positive_eigenvalue(gen.coords[v], k) for v, k in key), Fraction(0))


def l_inverse_N(gen: TensorGenerator, f: MPoly) -> MPoly:
    coeffs = to_product_basis(gen, f)
    out = {key: -c / product_eigenvalue(gen, key) for key, c in coeffs.items() if key}
    return from_product_basis(gen, out)


# ---------------------------------------------------------------------------
# chaos elements


@dataclass(frozen=True, eq=False)
class ChaosElement:
    """An eigenfunction ``F`` of a tensor generator, plus a shift ``G = F + shift``.

    ``coeffs`` are product-basis coefficients.  Elements built by
    ``homogeneous_sum`` carry a ``structure`` and materialize their
    coefficients only on demand.
    """

    gen: TensorGenerator
    eigenvalue: Fraction
    grade: Fraction | None
    shift: Fraction = Fraction(0)
    structure: HomogeneousStructure | None = None
    label: str = ""
    _coeffs: dict | None = field(default=None, repr=False)
    normalization: Fraction | None = None

    @functools.cached_property
    def coeffs(self) -> dict:
        if self._coeffs is not None:
            return self._coeffs
        return self.structure.product_coeffs()

    @functools.cached_property
    def F(self) -> MPoly:
        return from_product_basis(self.gen, self.coeffs)

    @property
    def G(self) -> MPoly:
        return self.F + self.shift

    @property
    def lam(self) -> Fraction:
        return -self.eigenvalue

    @property
    def N(self) -> int:
        return self.gen.N

    def n_terms(self) -> int:
        if self._coeffs is None and self.structure is not None:
            return self.structure.n_sets()
        return len(self.coeffs)

    def shifted(self, m) -> "ChaosElement":
        return replace(self, shift=as_rational(m))

    def raw_moments_F(self, jmax: int = 4) -> list[Fraction]:
        """Exact ``E[F^j]``, ``j = 0 .. jmax``."""
        if self.structure is not None:
            return self.structure.raw_moments(jmax)
        out = [Fraction(1)]
        acc = MPoly.const(1, self.N)
        for _ in range(jmax):
            acc = acc * self.F
            out.append(integrate_N(self.gen, acc))
        return out

    def moments(self, jmax: int = 4) -> list[Fraction]:
        """Exact raw moments of ``G = F + shift``."""
        mf = self.raw_moments_F(jmax)
        s = self.shift
        return [
            sum((math.comb(j, i) * mf[i] * s ** (j - i) for i in range(j + 1)), Fraction(0))
            for j in range(jmax + 1)
        ]

    def sample(self, seed: int, n: int) -> np.ndarray:
        """Float values of ``G`` at ``n`` product-measure draws.

        Coordinate ``i`` uses the stream keyed ``(seed, i)``.
        """
        def draw(i: int) -> np.ndarray:
            return pearson_sample(self.gen.coords[i].params, seed, n, key=(i,)).values

        if self.structure is not None:
            return self.structure.evaluate_stream(draw, n) + float(self.shift)
        used = sorted(self.F.variables())
        x = np.zeros((n, self.N))
        for i in used:
            x[:, i] = draw(i)
        return self.F.evaluate(x) + float(self.shift)

    def describe(self) -> dict:
        if self.structure is not None:
            s = self.structure
            return {"kind": "homogeneous_sum", "pattern": s.pattern, "k": s.k, "p": s.p, "label": self.label}
        return {"kind": "element", "N": self.N, "terms": len(self.coeffs), "label": self.label}


def _key_add(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, k in b:
        d[v] = d.get(v, 0) + k
    return tuple(sorted(d.items()))


def weighted_average_grade(gen: TensorGenerator, key: tuple) -> Fraction:
    """Grade of a single product ``P_alpha``: ``sum lambda_i eta_i / sum lambda_i``."""
    num = Fraction(0)
    den = Fraction(0)
    for v, k in key:
        h = gen.coords[v]
        lam = positive_eigenvalue(h, k)
        num += lam * chaos_grade(h, k)
        den += lam
    return num / den


def tensor_chaos_grade(gen: TensorGenerator, F: ChaosElement | Mapping) -> Fraction:
    """Exact chaos grade: top eigenvalue present in ``F**2`` divided by ``lambda``.

    For one product ``P_alpha`` this is the weighted average of the coordinate
    grades.  For sums, cross products ``P_alpha P_beta`` contribute the
    eigenvalue of ``alpha + beta`` and may dominate, so the top level is found
    from all pairs; if its coefficients cancel, ``F**2`` is expanded in full.
    """
    coeffs = F.coeffs if isinstance(F, ChaosElement) else dict(F)
    if not coeffs:
        raise ValueError("zero element has no grade")
    keys = list(coeffs)
    for key in keys:
        for v, k in key:
            if not is_chaotic(gen.coords[v], k):
                raise NotChaotic(f"not chaotic: coordinate {v + 1} at degree {k}")
    lam = product_eigenvalue(gen, keys[0])
    if all(gen.coords[v].b2 == 0 for key in keys for v, _ in key):
        return Fraction(2)
    if len(keys) == 1:
        return weighted_average_grade(gen, keys[0])
    groups: dict = {}
    for i, a in enumerate(keys):
        ca = coeffs[a]
        for b in keys[i:]:
            g = _key_add(a, b)
            w = ca * coeffs[b] * (1 if a == b else 2)
            groups[g] = groups.get(g, 0) + w
    levels: dict = {}
    for g, c in groups.items():
        levels.setdefault(product_eigenvalue(gen, g), []).append(c)
    top = max(levels)
    if any(levels[top]):
        return top / lam
    f = from_product_basis(gen, coeffs)
    sq = to_product_basis(gen, f * f)
    return max(product_eigenvalue(gen, key) for key in sq) / lam


def tensor_eigenfunction(
    gen: TensorGenerator,
    terms: Sequence[tuple[Sequence[int], object]],
    shift=0,
    label: str = "",
    require_chaotic: bool = True,
) -> ChaosElement:
    """Chaos element ``sum a_alpha P_alpha`` from dense multi-indices.

    All multi-indices must share one eigenvalue.  With ``require_chaotic``
    every coordinate degree must be chaotic and the grade is computed;
    otherwise the grade may be ``None``.
    """
    coeffs: dict = {}
    for alpha, a in terms:
        alpha = tuple(int(x) for x in alpha)
        if len(alpha) != gen.N:
            raise ValueError(f"multi-index {alpha} has length {len(alpha)}, expected {gen.N}")
        key = sparse_index(alpha)
        a = as_rational(a)
        if a:
            coeffs[key] = coeffs.get(key, 0) + a
    coeffs = {k: c for k, c in coeffs.items() if c}
    if not coeffs:
        raise ValueError("chaos element has no nonzero terms")
    lams = set()
    for key in coeffs:
        for v, k in key:
            if k > max_eigen_degree(gen.coords[v]):
                raise DomainError(f"outside domain: degree {k} in coordinate {v + 1}")
        lams.add(product_eigenvalue(gen, key))
    if len(lams) != 1:
        raise MixedEigenvalues(f"mixed eigenvalues: {sorted(lams)}")
    lam = lams.pop()
    if lam == 0:
        raise ValueError("the constant eigenfunction is not a chaos element")
    chaotic = all(is_chaotic(gen.coords[v], k) for key in coeffs for v, k in key)
    if require_chaotic and not chaotic:
        raise NotChaotic("not chaotic: some coordinate degree violates b2 < 1/(4n-1)")
    grade = tensor_chaos_grade(gen, coeffs) if chaotic else None
    return ChaosElement(gen, -lam, grade, as_rational(shift), None, label, coeffs)


def first_chaos(base: GeneratorHandle, shift=None) -> ChaosElement:
    """``x - m`` over a single coordinate, shifted back by ``m`` by default."""
    gen = TensorGenerator((base,))
    s = base.m if shift is None else shift
    return tensor_eigenfunction(gen, [((1,), 1)], shift=s, label="first-chaos")


def _symmetric_sets(a, k: int, p: int) -> dict:
    """Collect index-set coefficients from a mapping or dense array."""
    out: dict = {}
    if isinstance(a, Mapping):
        items = a.items()
    else:
        arr = np.asarray(a, dtype=object)
        if arr.shape != (k,) * p:
            raise CoefficientError(f"coefficient tensor must have shape {(k,) * p}")
        items = ((idx, arr[idx]) for idx in itertools.product(range(k), repeat=p))
    for idx, c in items:
        idx = tuple(int(i) for i in idx)
        c = as_rational(c)
        if len(idx) != p or any(not 0 <= i < k for i in idx):
            raise CoefficientError(f"index {idx} invalid for k={k}, p={p}")
        if len(set(idx)) < p:
            if c:
                raise CoefficientError(f"nonzero diagonal coefficient at {idx}")
            continue
        S = tuple(sorted(idx))
        if S in out and out[S] != c:
            raise CoefficientError(f"coefficient tensor not symmetric at {S}")
        out[S] = c
    return {S: c for S, c in out.items() if c}


def _rational_inv_sqrt(q: Fraction, digits: int = 30) -> Fraction:
    """``1/sqrt(q)``, exact when rational, else truncated to ``digits`` decimals."""
    from .pearson import exact_sqrt

    r = exact_sqrt(q)
    if r is not None:
        return 1 / r
    scale = 10**digits
    return Fraction(math.isqrt(q.denominator * scale * scale // q.numerator), scale)


def homogeneous_sum(
    base: GeneratorHandle,
    k: int,
    p: int,
    a,
    pattern: str | None = None,
    normalize: bool = False,
    shift=0,
) -> ChaosElement:
    """Multilinear sum of first eigenfunctions over ``k`` i.i.d. coordinates.

    Parameters
    ----------
    base : GeneratorHandle
        Law and generator of every coordinate.
    k, p : int
        Number of coordinates and order of the sum.
    a : scalar, mapping or array
        A scalar is the common tensor entry under ``pattern`` (``"complete"``
        for all index sets, ``"chain"`` for windows of consecutive indices).
        A mapping ``{(j1,..,jp): a}`` or a dense ``(k,)*p`` array gives a
        general symmetric tensor with zero diagonal.
    normalize : bool
        Rescale to unit variance.  The factor ``1/sqrt(var)`` is exact when
        rational and otherwise a 30-digit rational truncation; the element's
        ``normalization`` records ``c**2 * var`` so the residual is visible.
    """
    if k < 1 or p < 1 or p > k:
        raise ValueError("need 1 <= p <= k")
    if not is_chaotic(base, 1):
        raise NotChaotic("first chaos of the base law is not chaotic (b2 >= 1/3)")
    if isinstance(a, (Mapping, np.ndarray, list)):
        sets = _symmetric_sets(a, k, p)
        if not sets:
            raise CoefficientError("coefficient tensor is zero")
        struct = HomogeneousStructure(base, k, p, "generic", Fraction(0), sets)
    else:
        pat = pattern or "complete"
        if pat not in ("complete", "chain"):
            raise ValueError(f"unknown pattern {pat!r}")
        struct = HomogeneousStructure(base, k, p, pat, as_rational(a))
    norm = None
    if normalize:
        var = struct.variance()
        c = _rational_inv_sqrt(var)
        struct = struct.scaled(c)
        norm = struct.variance()
    lam = p * positive_eigenvalue(base, 1)
    grade = struct.grade()
    gen = TensorGenerator.iid(base, k)
    if grade is None:
        grade = tensor_chaos_grade(gen, struct.product_coeffs())
    return ChaosElement(
        gen, -lam, grade, as_rational(shift), struct, f"homogeneous-{struct.pattern}-k{k}-p{p}", None, norm
    )
