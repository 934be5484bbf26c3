"""Multilinear homogeneous sums over i.i.d. coordinates.

A homogeneous sum of order ``p`` is

    F = sum over ordered tuples (j1..jp) of a_{j1..jp} Y_{j1} ... Y_{jp},

with ``Y_j = x_j - m`` the first eigenfunction of coordinate ``j`` and ``a``
symmetric and zero whenever an index repeats.  Grouping the ``p!`` orderings,
``F = p! * sum_S a_S Y_S`` over ``p``-element index sets ``S``.

Three coefficient patterns are handled:

``complete``
    the same coefficient on every index set; moments come from power sums.
``chain``
    the same coefficient on each window of ``p`` consecutive indices;
    moments come from a transfer recursion along the coordinates.
``generic``
    an explicit sparse map of index sets; moments by direct expansion.

For the first two the exact moments cost nothing like the number of terms,
which is what makes ``k = 1000`` coordinates tractable.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable

import numpy as np

from .generator import GeneratorHandle

__all__ = ["HomogeneousStructure", "power_sum_expectation", "elementary_in_power_sums"]


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


@functools.lru_cache(maxsize=None)
def elementary_in_power_sums(p: int) -> dict:
    """``e_p`` as a polynomial in power sums ``p_1 .. p_p`` (Newton's identities).

    Keys are exponent tuples ``(n_1, .., n_p)`` for ``prod_r p_r ** n_r``.
    """
    zero = (0,) * p
    es = [{zero: Fraction(1)}]
    for n in range(1, p + 1):
        acc: dict = {}
        for i in range(1, n + 1):
            pi = {tuple(1 if r == i - 1 else 0 for r in range(p)): Fraction((-1) ** (i - 1), n)}
            for e, c in _poly_mul(es[n - i], pi).items():
                acc[e] = acc.get(e, 0) + c
        es.append({e: c for e, c in acc.items() if c})
    return es[p]


def _falling(k: int, b: int) -> int:
    return math.perm(k, b) if b <= k else 0


def power_sum_expectation(counts: tuple[int, ...], mu: Callable[[int], Fraction], k: int) -> Fraction:
    """``E[prod_r S_r ** counts[r-1]]`` with ``S_r = sum_i y_i ** r`` over ``k`` i.i.d. ``y``.

    Each way of merging the factors into blocks of equal coordinates
    contributes ``(k)_blocks * prod mu(block degree)``.
    """
    memo: dict = {}

    def rec(n: tuple[int, ...]) -> dict:
        if n in memo:
            return memo[n]
        if not any(n):
            return {0: Fraction(1)}
        r0 = next(i for i, c in enumerate(n) if c)
        out: dict = {}
        ranges = [range(1, n[r0] + 1) if i == r0 else range(0, c + 1) for i, c in enumerate(n)]
        for s in _product(ranges):
            deg = sum((i + 1) * si for i, si in enumerate(s))
            w = mu(deg)
            if not w:
                continue
            ways = math.comb(n[r0] - 1, s[r0] - 1)
            for i, (c, si) in enumerate(zip(n, s)):
                if i != r0:
                    ways *= math.comb(c, si)
            rest = tuple(c - si for c, si in zip(n, s))
            for blocks, val in rec(rest).items():
                out[blocks + 1] = out.get(blocks + 1, 0) + ways * w * val
        memo[n] = out
        return out

    return sum((_falling(k, b) * v for b, v in rec(tuple(counts)).items()), Fraction(0))


def _product(ranges):
    if not ranges:
        yield ()
        return
    for head in ranges[0]:
        for tail in _product(ranges[1:]):
            yield (head,) + tail


@dataclass(frozen=True, eq=False)
class HomogeneousStructure:
    """Coefficient pattern of a homogeneous sum over ``k`` copies of ``base``.

    ``a`` is the symmetric tensor entry (so each index set carries
    ``p! * a``); for ``generic`` the entries live in ``sets``.
    """

    base: GeneratorHandle
    k: int
    p: int
    pattern: str
    a: Fraction = Fraction(0)
    sets: dict = field(default_factory=dict)

    # coefficients ----------------------------------------------------------

    def index_sets(self):
        k, p = self.k, self.p
        if self.pattern == "complete":
            return ((S, self.a) for S in combinations(range(k), p))
        if self.pattern == "chain":
            return ((tuple(range(s, s + p)), self.a) for s in range(k - p + 1))
        return iter(self.sets.items())

    def n_sets(self) -> int:
        if self.pattern == "complete":
            return math.comb(self.k, self.p)
        if self.pattern == "chain":
            return max(self.k - self.p + 1, 0)
        return len(self.sets)

    def product_coeffs(self) -> dict:
        """Sparse product-eigenbasis coefficients ``{((i,1),(j,1),..): p! a_S}``."""
        f = math.factorial(self.p)
        return {tuple((i, 1) for i in S): f * c for S, c in self.index_sets() if c}

    def scaled(self, c: Fraction) -> "HomogeneousStructure":
        return HomogeneousStructure(
            self.base, self.k, self.p, self.pattern, self.a * c, {S: v * c for S, v in self.sets.items()}
        )

    # moments ----------------------------------------------------------------

    def centered_moment(self, q: int) -> Fraction:
        """``E[(x - m)^q]`` of the base law."""
        ms = self.base.moments(q)
        m = self.base.m
        return sum((math.comb(q, i) * ms[i] * (-m) ** (q - i) for i in range(q + 1)), Fraction(0))

    def variance(self) -> Fraction:
        s2 = self.centered_moment(2)
        f = math.factorial(self.p)
        sq = sum((c * c for _, c in self.index_sets()), Fraction(0)) if self.pattern == "generic" else (
            self.a * self.a * self.n_sets()
        )
        return f * f * sq * s2**self.p

    def raw_moments(self, jmax: int) -> list[Fraction]:
        """Exact ``E[F^j]`` for ``j = 0 .. jmax``."""
        if jmax > self.base.max_moment_order:
            from .errors import MomentError

            raise MomentError(f"moment does not exist: coordinates need moments up to {jmax}")
        mu_table = [self.centered_moment(q) for q in range(jmax + 1)]

        def mu(q: int) -> Fraction:
            # moments above jmax cancel identically in these expansions
            return mu_table[q] if q <= jmax else Fraction(0)

        if self.pattern == "complete":
            return self._complete_moments(jmax, mu)
        if self.pattern == "chain":
            return self._chain_moments(jmax, mu)
        return self._generic_moments(jmax)

    def _complete_moments(self, jmax, mu) -> list[Fraction]:
        p = self.p
        ep = elementary_in_power_sums(p)
        scale = math.factorial(p) * self.a
        out = [Fraction(1)]
        power = {(0,) * p: Fraction(1)}
        for j in range(1, jmax + 1):
            power = _poly_mul(power, ep)
            val = sum((c * power_sum_expectation(e, mu, self.k) for e, c in power.items()), Fraction(0))
            out.append(scale**j * val)
        return out

    def _chain_moments(self, jmax, mu) -> list[Fraction]:
        """Transfer recursion for ``E[(sum_s W_s)^j]`` with windows ``W_s``.

        Expanding ``prod_s exp(t W_s)`` and integrating each coordinate as soon
        as every window touching it has chosen its exponent gives a recursion
        whose state is the exponents of the last ``p - 1`` windows and the
        total degree so far.
        """
        k, p = self.k, self.p
        n_win = k - p + 1
        if n_win <= 0:
            return [Fraction(1)] + [Fraction(0)] * jmax
        inv_fact = [Fraction(1, math.factorial(r)) for r in range(jmax + 1)]
        states = {((0,) * (p - 1), 0): Fraction(1)}
        for q in range(k):
            nxt: dict = {}
            for (last, d), w in states.items():
                top = jmax - d if q < n_win else 0
                for r in range(top + 1):
                    e = r + sum(last)
                    me = mu(e)
                    if not me:
                        continue
                    key = ((last + (r,))[1:] if p > 1 else (), d + r)
                    nxt[key] = nxt.get(key, 0) + w * me * inv_fact[r]
            states = nxt
        by_deg = [Fraction(0)] * (jmax + 1)
        for (_, d), w in states.items():
            by_deg[d] += w
        scale = math.factorial(p) * self.a
        return [scale**j * math.factorial(j) * by_deg[j] for j in range(jmax + 1)]

    def _generic_moments(self, jmax) -> list[Fraction]:
        from .polycalc import MPoly
        from .tensor import TensorGenerator, integrate_N

        gen = TensorGenerator.iid(self.base, self.k)
        m = self.base.m
        terms: dict = {}
        f = math.factorial(self.p)
        for S, c in self.sets.items():
            # prod (x_i - m) expanded over subsets
            for r in range(len(S) + 1):
                for sub in combinations(S, r):
                    key = tuple((i, 1) for i in sub)
                    terms[key] = terms.get(key, 0) + f * c * (-m) ** (len(S) - r)
        F = MPoly(self.k, terms)
        out = [Fraction(1)]
        acc = MPoly.const(1, self.k)
        for _ in range(jmax):
            acc = acc * F
            out.append(integrate_N(gen, acc))
        return out

    # grade -------------------------------------------------------------------

    def grade(self) -> Fraction | None:
        """Chaos grade for the structured patterns (``None`` for ``generic``).

        Squares of products over ``S`` and ``T`` produce the eigenvalue
        ``2 theta (p - c b2)`` with ``c = |S & T|``.  For ``b2 <= 0`` the
        largest is at ``c = p``; for ``b2 > 0`` at the smallest overlap, which
        for equal nonnegative coefficients is ``max(0, 2p - k)`` in both patterns.
        """
        if self.pattern == "generic":
            return None
        b2, p = self.base.b2, self.p
        if b2 == 0:
            return Fraction(2)
        c = p if b2 < 0 else max(0, 2 * p - self.k)
        return 2 * (p - c * b2) / p

    # evaluation ------------------------------------------------------------

    def evaluate_stream(self, draw: Callable[[int], np.ndarray], n: int) -> np.ndarray:
        """Evaluate ``F`` on ``n`` draws; ``draw(i)`` returns coordinate ``i``'s sample."""
        p, k = self.p, self.k
        m = float(self.base.m)
        scale = float(math.factorial(p) * self.a)
        if self.pattern == "complete":
            e = [np.ones(n)] + [np.zeros(n) for _ in range(p)]
            for i in range(k):
                y = draw(i) - m
                for r in range(p, 0, -1):
                    e[r] += y * e[r - 1]
            return scale * e[p]
        if self.pattern == "chain":
            out = np.zeros(n)
            window: list[np.ndarray] = []
            for i in range(k):
                window.append(draw(i) - m)
                if len(window) > p:
                    window.pop(0)
                if len(window) == p:
                    out += np.prod(window, axis=0)
            return scale * out
        f = math.factorial(p)
        used = sorted({i for S in self.sets for i in S})
        ys = {i: draw(i) - m for i in used}
        out = np.zeros(n)
        for S, c in self.sets.items():
            out += float(f * c) * np.prod([ys[i] for i in S], axis=0)
        return out
