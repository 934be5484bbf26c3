import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate, stats

from pearson_chaos.errors import InvalidParams, MomentError, Unclassifiable
from pearson_chaos.pearson import (
    PearsonParams,
    beta_law,
    cdf,
    classify,
    density,
    f_law,
    gamma_law,
    gaussian,
    inverse_gamma,
    linear_transform,
    max_moment_order,
    moments,
    params_from_dict,
    params_to_dict,
    sample,
    skew_t,
    student_t,
)

Q = Fraction

ZOO = {
    "gaussian": gaussian(1, 2),
    "gamma": gamma_law(3, 2),
    "beta": beta_law(2, 3),
    "skew_t": skew_t(6, 1, Q(1, 2), 2),
    "student_t": student_t(9),
    "inverse_gamma": inverse_gamma(7, 2),
    "f": f_law(5, 12),
}

# scipy counterparts with the same parametrization
SCIPY = {
    "gaussian": stats.norm(1, math.sqrt(2)),
    "gamma": stats.gamma(3, scale=1 / 2),
    "beta": stats.beta(2, 3),
    "student_t": stats.t(9),
    "inverse_gamma": stats.invgamma(7, scale=2),
    "f": stats.f(5, 12),
}


def test_coefficients_are_exact():
    p = PearsonParams(0.5, 0.1, 1, 0, 0)
    assert p.theta == Q(1, 2) and p.m == Q(1, 10)


@pytest.mark.parametrize(
    "kwargs",
    [dict(theta=0, m=0, b0=1, b1=0, b2=0), dict(theta=-1, m=0, b0=1, b1=0, b2=0)],
)
def test_rejects_nonpositive_theta(kwargs):
    with pytest.raises(InvalidParams):
        PearsonParams(**kwargs)


def test_rejects_mean_outside_support():
    with pytest.raises(Unclassifiable):
        PearsonParams(1, 2, 0, Q(1, 2), Q(-1, 2))  # b = x(1 - x)/2, m = 2
    with pytest.raises(Unclassifiable):
        PearsonParams(1, 0, 1, 0, 0, support=(0, "inf"))


@pytest.mark.parametrize("name", sorted(ZOO))
def test_support_contains_mean_and_b_positive(name):
    p = ZOO[name]
    lo, hi = p.support
    assert lo < float(p.m) < hi
    xs = np.linspace(max(lo, -50) + 1e-6, min(hi, 50) - 1e-6, 101)
    assert np.all(p.b(xs) > 0)
    for end in (lo, hi):
        if math.isfinite(end):
            assert abs(float(p.b(end))) < 1e-12


@pytest.mark.parametrize(
    "params, family, natural",
    [
        (PearsonParams(1, 0, 4, 0, 0), "gaussian", {"mu": 0, "sigma2": 4}),
        (PearsonParams(1, 3, 0, Q(1, 2), 0), "gamma", {"alpha": 6, "beta": 2}),
        (PearsonParams(1, Q(1, 2), 0, 0, Q(1, 4)), "inverse_gamma", {"alpha": 5, "beta": 2}),
        (beta_law(2, 3), "beta", {"alpha": 2, "beta": 3}),
        (f_law(5, 12), "f", {"d1": 5, "d2": 12}),
        (skew_t(6, 1, Q(1, 2), 2), "skew_t", {"shape": 6, "nu": 1, "lam": Q(1, 2), "a": 2}),
    ],
)
def test_classify(params, family, natural):
    c = classify(params)
    assert c.family == family
    assert c.natural == natural
    assert c.to_params() == params


def test_classify_affine_images():
    p = linear_transform(gamma_law(2), -2, 1)
    c = classify(p)
    assert c.family == "gamma" and c.scale == -1
    assert c.to_params() == p


@pytest.mark.parametrize("b2, want", [(0, math.inf), (Q(-1, 2), math.inf), (Q(1, 3), 3), (Q(1, 8), 8), (Q(2, 7), 4)])
def test_max_moment_order(b2, want):
    assert max_moment_order(PearsonParams(1, 0, 1, 0, b2)) == want


def test_moments_examples():
    assert moments(gaussian(), 4) == [1, 0, 1, 0, 3]
    a, b = Q(5, 2), Q(3, 2)
    assert moments(gamma_law(a, b), 2)[2] == a * (a + 1) / b**2
    for tau in (5, 7, 9):
        assert moments(student_t(tau), 2)[2] == Q(tau, tau - 2)
    assert moments(student_t(9), 4)[4] == 3 * Q(81, 7 * 5)


def test_moments_missing():
    with pytest.raises(MomentError, match="moment does not exist"):
        moments(student_t(3), 4)


@pytest.mark.parametrize("name", sorted(SCIPY))
def test_moments_against_scipy(name):
    p = ZOO[name]
    top = min(4, max_moment_order(p))
    for j, mj in enumerate(moments(p, top)):
        assert float(mj) == pytest.approx(SCIPY[name].moment(j), rel=1e-10)


@pytest.mark.parametrize("name", sorted(ZOO))
def test_density_normalized_with_mean_m(name):
    p = ZOO[name]
    lo, hi = p.support
    f = lambda x: float(density(p, x))  # noqa: E731
    assert integrate.quad(f, lo, hi, points=None if not (math.isfinite(lo) and math.isfinite(hi)) else [float(p.m)],
                          limit=200)[0] == pytest.approx(1, abs=1e-8)
    assert integrate.quad(lambda x: x * f(x), lo, hi, limit=200)[0] == pytest.approx(float(p.m), abs=1e-7)


@pytest.mark.parametrize("name", sorted(SCIPY))
def test_density_and_cdf_against_scipy(name):
    p, ref = ZOO[name], SCIPY[name]
    xs = ref.ppf(np.linspace(0.01, 0.99, 25))
    assert np.allclose(density(p, xs), ref.pdf(xs), rtol=1e-10)
    assert np.allclose(cdf(p, xs), ref.cdf(xs), rtol=1e-10, atol=1e-13)


def test_skew_t_cdf_against_quadrature():
    p = ZOO["skew_t"]
    for x in (-3.0, -0.5, 0.3, 2.0, 6.0):
        want = integrate.quad(lambda y: float(density(p, y)), -np.inf, x, epsabs=1e-13)[0]
        assert float(cdf(p, x)) == pytest.approx(want, abs=1e-9)


def test_point_examples():
    assert float(density(gaussian(), 0.0)) == pytest.approx(0.3989422804, abs=1e-9)
    assert float(density(beta_law(2, 2), 0.5)) == pytest.approx(1.5, abs=1e-9)
    assert float(cdf(gaussian(), 0.0)) == 0.5
    assert float(cdf(gamma_law(1), 1.0)) == pytest.approx(1 - math.exp(-1), abs=1e-9)
    assert float(density(gamma_law(2), -1.0)) == 0
    assert float(cdf(beta_law(2, 3), 0.0)) == 0 and float(cdf(beta_law(2, 3), 1.0)) == 1


def test_sample_reproducible_and_keyed():
    a = sample(student_t(9), 7, 1000)
    b = sample(student_t(9), 7, 1000)
    c = sample(student_t(9), 7, 1000, key=(1,))
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert not a.values.flags.writeable


def test_sample_gaussian_mean():
    x = sample(gaussian(), 1, 10**6).values
    assert abs(x.mean()) < 0.004


def test_sample_student_second_moment():
    b = sample(student_t(9), 2, 10**6)
    assert abs(b.moments(2)[1] - 9 / 7) < 3 * b.moment_se(2)


@pytest.mark.parametrize("name", sorted(ZOO))
def test_sample_matches_law(name):
    p = ZOO[name]
    x = sample(p, 3, 20000).values
    ks = stats.kstest(x, lambda v: cdf(p, v))
    assert ks.pvalue > 1e-3


def test_linear_transform():
    g = gaussian()
    assert linear_transform(g, 1, 0) == g
    t = linear_transform(g, 2, 3)
    assert t.m == 3 and t.b0 == 4
    assert moments(t, 2)[2] == 4 + 9
    rng = np.random.default_rng(0)
    for _ in range(10):
        gm, dl = Q(int(rng.integers(1, 9)), int(rng.integers(1, 5))), Q(int(rng.integers(-9, 9)), 2)
        for p in ZOO.values():
            assert linear_transform(p, gm, dl).b2 == p.b2
            assert linear_transform(p, -gm, dl).b2 == p.b2
    with pytest.raises(InvalidParams):
        linear_transform(g, 0, 1)


@pytest.mark.parametrize("name", sorted(ZOO))
def test_dict_roundtrip(name):
    p = ZOO[name]
    assert params_from_dict(params_to_dict(p)) == p
    assert params_from_dict(classify(p).to_dict() | {"family": classify(p).family}).b2 == p.b2


def test_dict_class_form():
    assert params_from_dict({"family": "student_t", "tau": 9}) == student_t(9)
    assert params_from_dict({"family": "gaussian", "sigma": 2}).b0 == 4
    with pytest.raises(InvalidParams):
        params_from_dict({"family": "cauchy"})
    with pytest.raises(InvalidParams):
        params_from_dict({"m": 0})
