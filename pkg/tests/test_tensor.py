import math
from fractions import Fraction

import numpy as np
import pytest

from pearson_chaos.errors import DomainError, MixedEigenvalues, NotChaotic
from pearson_chaos.generator import GeneratorHandle
from pearson_chaos.pearson import beta_law, gamma_law, gaussian, moments, student_t
from pearson_chaos.polycalc import MPoly
from pearson_chaos.spectral import chaos_grade, positive_eigenvalue
from pearson_chaos.tensor import (
    TensorGenerator,
    apply_LN,
    first_chaos,
    gamma_N,
    gamma_N_by_definition,
    integrate_N,
    l_inverse_N,
    tensor_chaos_grade,
    tensor_eigenfunction,
    to_product_basis,
    weighted_average_grade,
)

Q = Fraction
GAUSS = GeneratorHandle(gaussian())
UNIF = GeneratorHandle(beta_law(1, 1))
GG = TensorGenerator((GAUSS, GAUSS))


def v(i, dim=2):
    return MPoly.var(i, dim)


def test_apply_LN_examples():
    assert apply_LN(GG, v(0) * v(1)) == -2 * v(0) * v(1)
    assert apply_LN(GG, MPoly.const(5, 2)).is_zero()


def test_gamma_N_examples():
    assert gamma_N(GG, v(0), v(0)) == MPoly.const(1, 2)
    assert gamma_N(GG, v(0) ** 2, v(1) ** 3).is_zero()
    mixed = TensorGenerator((GeneratorHandle(gamma_law(2)), UNIF))
    s = v(0) + v(1)
    want = mixed[0].b.to_mpoly(0, 2) * mixed[0].theta + mixed[1].b.to_mpoly(1, 2) * mixed[1].theta
    assert gamma_N(mixed, s, s) == want


def test_gamma_N_matches_definition():
    gen = TensorGenerator((GeneratorHandle(gamma_law(2, theta=3)), UNIF, GeneratorHandle(student_t(11))))
    f = v(0, 3) ** 2 * v(1, 3) + v(2, 3) * Q(1, 3)
    g = v(1, 3) * v(2, 3) ** 2 - v(0, 3)
    assert gamma_N(gen, f, g) == gamma_N_by_definition(gen, f, g)


def test_l_inverse_N_examples():
    assert l_inverse_N(GG, MPoly.const(3, 2)).is_zero()
    assert l_inverse_N(GG, v(0) * v(1)) == -v(0) * v(1) / 2
    G = tensor_eigenfunction(GG, [((2, 0), 1), ((0, 2), 1)])
    assert l_inverse_N(GG, G.F) == G.F / G.lam * -1


def test_integrate_N_examples():
    assert integrate_N(GG, MPoly.const(1, 2)) == 1
    assert integrate_N(GG, v(0) ** 2 * v(1) ** 2) == 1
    st = TensorGenerator((GeneratorHandle(student_t(9)),))
    assert integrate_N(st, v(0, 1) ** 4) == moments(student_t(9), 4)[4]


def test_product_moments_factorize():
    gen = TensorGenerator((GeneratorHandle(gamma_law(2)), UNIF, GeneratorHandle(student_t(11))))
    for p in [(1, 2, 3), (3, 0, 2), (2, 2, 2)]:
        f = MPoly(3, {p: 1})
        want = math.prod(moments(gen[i].params, p[i])[p[i]] for i in range(3))
        assert integrate_N(gen, f) == want


def test_eigenfunction_examples():
    F = tensor_eigenfunction(GG, [((1, 1), 1)])
    assert F.eigenvalue == -2 and F.grade == 2
    assert apply_LN(GG, F.F) == F.F * F.eigenvalue
    assert integrate_N(GG, F.F) == 0
    F = tensor_eigenfunction(GG, [((2, 0), 1), ((0, 2), 1)])
    assert F.eigenvalue == -2
    F = tensor_eigenfunction(TensorGenerator((UNIF, GAUSS)), [((1, 1), 1)])
    assert F.eigenvalue == -2


def test_eigenfunction_rejections():
    mixed = TensorGenerator((UNIF, GAUSS))
    with pytest.raises(MixedEigenvalues):
        tensor_eigenfunction(mixed, [((2, 0), 1), ((0, 2), 1)])  # uniform lambda_2 = 3
    st = TensorGenerator((GeneratorHandle(student_t(9)), GAUSS))
    with pytest.raises(NotChaotic):
        tensor_eigenfunction(st, [((3, 0), 1)])
    with pytest.raises(DomainError):
        tensor_eigenfunction(st, [((5, 0), 1)])


def test_grade_examples():
    F = tensor_eigenfunction(TensorGenerator((UNIF, GAUSS)), [((1, 1), 1)])
    assert F.grade == Q(5, 2)
    assert weighted_average_grade(F.gen, ((0, 1), (1, 1))) == Q(5, 2)
    single = TensorGenerator((GeneratorHandle(beta_law(2, 3)),))
    assert tensor_eigenfunction(single, [((2,), 1)]).grade == chaos_grade(single[0], 2)
    gauss4 = TensorGenerator((GAUSS,) * 4)
    F = tensor_eigenfunction(gauss4, [((1, 1, 0, 0), 1), ((0, 0, 2, 0), 3), ((0, 1, 0, 1), -2)])
    assert F.grade == 2


def _brute_grade(F):
    """Top eigenvalue magnitude in the expansion of F^2, over lambda."""
    expansion = to_product_basis(F.gen, F.F * F.F)
    top = max(sum((positive_eigenvalue(F.gen[i], k) for i, k in key), Q(0)) for key in expansion)
    return top / F.lam


@pytest.mark.parametrize(
    "coords, terms",
    [
        ((UNIF, GAUSS), [((1, 1), 1)]),
        ((GeneratorHandle(student_t(13)), GeneratorHandle(student_t(13))), [((2, 0), 1), ((0, 2), 1)]),
        ((GeneratorHandle(beta_law(2, 3)), GAUSS, GeneratorHandle(gamma_law(2))), [((1, 0, 1), 1), ((0, 1, 1), 2)]),
        ((GeneratorHandle(student_t(21)), GeneratorHandle(beta_law(1, 2))), [((2, 1), 1)]),
    ],
)
def test_grade_matches_full_expansion(coords, terms):
    F = tensor_eigenfunction(TensorGenerator(coords), terms)
    assert F.grade == _brute_grade(F)
    assert tensor_chaos_grade(F.gen, F) == F.grade


def test_sum_grade_can_exceed_weighted_average():
    st = GeneratorHandle(student_t(13))
    F = tensor_eigenfunction(TensorGenerator((st, st)), [((2, 0), 1), ((0, 2), 1)])
    assert F.grade == 2 > chaos_grade(st, 2)


def test_first_chaos():
    G = first_chaos(GeneratorHandle(student_t(9)))
    assert G.shift == 0 and G.grade == Q(7, 4)
    G = first_chaos(GeneratorHandle(gamma_law(3)))
    assert G.G == v(0, 1)


def test_chaos_sample_moments():
    gen = TensorGenerator((GeneratorHandle(gamma_law(2)), UNIF))
    F = tensor_eigenfunction(gen, [((1, 1), 1)])
    x = F.sample(5, 200_000)
    assert np.array_equal(x, F.sample(5, 200_000))
    exact = F.moments(4)
    for j in (2, 4):
        se = np.std(x**j) / math.sqrt(x.size)
        assert abs(np.mean(x**j) - float(exact[j])) < 4 * se
