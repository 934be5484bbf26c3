import math
from fractions import Fraction

import numpy as np
import pytest

from pearson_chaos.errors import CoefficientError, NotChaotic
from pearson_chaos.generator import GeneratorHandle
from pearson_chaos.homogeneous import elementary_in_power_sums
from pearson_chaos.pearson import beta_law, gamma_law, gaussian, sample, student_t
from pearson_chaos.polycalc import MPoly
from pearson_chaos.tensor import apply_LN, homogeneous_sum, integrate_N, tensor_chaos_grade

Q = Fraction
GAUSS = GeneratorHandle(gaussian())
BASES = {
    "gaussian": GAUSS,
    "gamma": GeneratorHandle(gamma_law(2)),
    "beta": GeneratorHandle(beta_law(2, 3)),
    "student": GeneratorHandle(student_t(11)),
}


def brute_moments(G, jmax=4):
    out, acc = [], None
    for _ in range(jmax):
        acc = G.F if acc is None else acc * G.F
        out.append(integrate_N(G.gen, acc))
    return [Q(1)] + out


@pytest.mark.parametrize("base", sorted(BASES))
@pytest.mark.parametrize("pattern", ["complete", "chain"])
@pytest.mark.parametrize("k, p", [(4, 2), (5, 2), (5, 3), (6, 3), (6, 4)])
def test_moments_match_full_expansion(base, pattern, k, p):
    G = homogeneous_sum(BASES[base], k, p, Q(2, 3), pattern=pattern)
    top = 4 if BASES[base].max_moment_order >= 4 else 2
    assert G.raw_moments_F(top) == brute_moments(G, top)


def test_generic_coefficients_match_full_expansion():
    a = {(0, 1): 1, (1, 3): Q(-1, 2), (2, 4): 3, (0, 4): Q(1, 3)}
    G = homogeneous_sum(BASES["gamma"], 5, 2, a)
    assert G.raw_moments_F(4) == brute_moments(G)


def test_dense_tensor_input():
    k = 4
    a = np.zeros((k, k), dtype=object)
    for i in range(k):
        for j in range(k):
            if i != j:
                a[i, j] = Q(1, 1 + abs(i - j))
    G = homogeneous_sum(GAUSS, k, 2, a)
    assert G.raw_moments_F(4) == brute_moments(G)


@pytest.mark.parametrize(
    "a, exc",
    [({(0, 0): 1}, CoefficientError), (np.ones((3, 3)), CoefficientError)],
)
def test_rejects_bad_tensors(a, exc):
    with pytest.raises(exc):
        homogeneous_sum(GAUSS, 3, 2, a)


def test_rejects_asymmetric():
    a = np.zeros((3, 3))
    a[0, 1], a[1, 0] = 1, 2
    with pytest.raises(CoefficientError):
        homogeneous_sum(GAUSS, 3, 2, a)


def test_rejects_non_chaotic_base():
    with pytest.raises(NotChaotic):
        homogeneous_sum(GeneratorHandle(student_t(3)), 4, 2, 1)


def test_examples():
    G = homogeneous_sum(GAUSS, 5, 1, {(2,): 1})
    assert G.F == MPoly.var(2, 5)
    k = 6
    a = 1 / math.sqrt(2 * k * (k - 1))
    G = homogeneous_sum(GAUSS, k, 2, Q(1), normalize=True)
    assert G.moments(2)[2] == pytest.approx(1, abs=1e-28)
    assert float(homogeneous_sum(GAUSS, k, 2, 1).structure.scaled(Q(a)).variance()) == pytest.approx(1, rel=1e-12)
    for base in BASES.values():
        G = homogeneous_sum(base, 4, 3, 1)
        assert G.eigenvalue == -3 * base.theta
        assert apply_LN(G.gen, G.F) == G.F * G.eigenvalue


@pytest.mark.parametrize("base", sorted(BASES))
@pytest.mark.parametrize("pattern", ["complete", "chain"])
@pytest.mark.parametrize("k, p", [(4, 2), (5, 3)])
def test_grade_matches_pairwise_computation(base, pattern, k, p):
    G = homogeneous_sum(BASES[base], k, p, 1, pattern=pattern)
    assert G.grade == tensor_chaos_grade(G.gen, G.coeffs)


def test_newton_identities():
    # e_3 = (p1^3 - 3 p1 p2 + 2 p3) / 6
    assert elementary_in_power_sums(3) == {(3, 0, 0): Q(1, 6), (1, 1, 0): Q(-1, 2), (0, 0, 1): Q(1, 3)}


@pytest.mark.parametrize("k", [3, 10, 100, 1000])
def test_complete_gaussian_kurtosis(k):
    # F = 2 sum_{i<j} x_i x_j = (k-1) chi2_1 - chi2_{k-1} with independent parts, so
    # m4 / m2^2 = 3 + 12 ((k-1)^3 + 1) / ((k-1) k^2) by cumulant additivity
    G = homogeneous_sum(GAUSS, k, 2, 1, pattern="complete")
    m = G.moments(4)
    assert m[2] == 2 * k * (k - 1)
    assert m[4] / m[2] ** 2 == 3 + Q(12 * ((k - 1) ** 3 + 1), (k - 1) * k * k)


def test_streamed_evaluation_matches_polynomial():
    G = homogeneous_sum(BASES["beta"], 6, 3, Q(1, 2), pattern="chain")
    fast = G.sample(11, 2000)
    draws = np.column_stack([sample(G.gen[i].params, 11, 2000, key=(i,)).values for i in range(6)])
    assert np.allclose(fast, G.F.evaluate(draws) + float(G.shift))
