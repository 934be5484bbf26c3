import math
from fractions import Fraction

import numpy as np
import pytest

from pearson_chaos.errors import InvalidParams
from pearson_chaos.generator import GeneratorHandle
from pearson_chaos.montecarlo import (
    ROW_COLUMNS,
    ExperimentDescriptor,
    bounded_lipschitz_distance,
    chaos_sample,
    euler_maruyama,
    kolmogorov_distance,
    rows_to_csv,
    run_convergence,
)
from pearson_chaos.pearson import PearsonParams, gamma_law, gaussian, params_to_dict, sample, student_t
from pearson_chaos.tensor import TensorGenerator, first_chaos, integrate_N, tensor_eigenfunction

GAUSS = params_to_dict(gaussian())


def chain_descriptor(k_grid=(10, 100, 1000), mc_n=100_000, seed=0):
    return ExperimentDescriptor.from_dict({
        "target": GAUSS,
        "chaos": {"kind": "homogeneous_sum", "base": GAUSS, "p": 2, "pattern": "chain"},
        "k_grid": list(k_grid), "mc_n": mc_n, "seed": seed,
    })


def test_em_gaussian_mean():
    b = euler_maruyama(gaussian(), 0.5, 0.01, 0, seed=3, n_paths=5000)
    assert b.provenance["kind"] == "sde"
    assert abs(b.moments(1)[0]) < 3 * b.moment_se(1)


def test_em_gamma_second_moment():
    b = euler_maruyama(gamma_law(2), 2.0, 0.002, 0, seed=4, n_paths=20000)
    assert abs(b.moments(2)[1] - 6) < 3 * b.moment_se(2)
    assert b.values.min() > 0


def test_em_zero_diffusion_is_ode():
    p = PearsonParams(1, 2, 0, 0, 0)
    b = euler_maruyama(p, 5.0, 0.1, 30, seed=0, burn_in=0)
    want = 2 + 3 * 0.9 ** np.arange(1, 31)
    assert np.allclose(b.values[:, 0], want)


def test_em_thinning_and_reproducibility():
    a = euler_maruyama(gaussian(), 0.0, 0.01, 100, seed=9, n_paths=3, thin=10, burn_in=50)
    b = euler_maruyama(gaussian(), 0.0, 0.01, 100, seed=9, n_paths=3, thin=10, burn_in=50)
    assert a.values.shape == (10, 3)
    assert np.array_equal(a.values, b.values)


@pytest.mark.parametrize("kwargs", [dict(dt=1.0), dict(dt=0.0), dict(x0=-1.0)])
def test_em_preconditions(kwargs):
    args = dict(x0=1.0, dt=0.01) | kwargs
    with pytest.raises(ValueError):
        euler_maruyama(gamma_law(2), args["x0"], args["dt"], 10, seed=0)


def test_kolmogorov_examples():
    x = sample(gaussian(), 1, 10**5)
    assert kolmogorov_distance(x, gaussian()) < 1.95 / math.sqrt(10**5)
    assert kolmogorov_distance(np.full(100, -50.0), gamma_law(2)) == 1.0
    assert kolmogorov_distance(x, x) == 0.0


def test_kolmogorov_cdf_callable():
    x = sample(gaussian(), 2, 1000).values
    from scipy.stats import norm

    assert kolmogorov_distance(x, norm.cdf) == pytest.approx(kolmogorov_distance(x, gaussian()), abs=1e-12)


def test_bounded_lipschitz_examples():
    a = sample(gaussian(), 1, 10**5).values
    assert bounded_lipschitz_distance(a, a) == 0.0
    d = []
    for seed in (1, 2):
        x = sample(gaussian(), seed, 10**5).values
        y = sample(gaussian(1), seed + 100, 10**5).values
        d.append(bounded_lipschitz_distance(x, y))
    assert all(0 < v <= 2 for v in d)
    assert abs(d[0] - d[1]) <= 0.1 * d[0]
    with pytest.raises(ValueError):
        bounded_lipschitz_distance([], a)


def test_chaos_sample():
    G = first_chaos(GeneratorHandle(gaussian()))
    b = chaos_sample(G, 3, 20000)
    assert b.provenance["kind"] == "chaos"
    assert np.array_equal(b.values, chaos_sample(G, 3, 20000).values)
    assert kolmogorov_distance(b, gaussian()) < 1.95 / math.sqrt(20000)
    gen = TensorGenerator((GeneratorHandle(gamma_law(2)), GeneratorHandle(student_t(11))))
    H = tensor_eigenfunction(gen, [((1, 1), 1)])
    x = chaos_sample(H, 5, 200_000).values
    m4 = integrate_N(gen, H.F**4)
    assert abs(np.mean(x**4) - float(m4)) < 3 * np.std(x**4) / math.sqrt(x.size)


def test_descriptor_validation():
    with pytest.raises(InvalidParams):
        chain_descriptor(k_grid=(10, 10))
    with pytest.raises(InvalidParams):
        chain_descriptor(mc_n=999)
    with pytest.raises(InvalidParams):
        ExperimentDescriptor.from_dict({"target": GAUSS, "chaos": {"kind": "nope"}, "k_grid": [1], "mc_n": 1000})
    d = chain_descriptor()
    assert ExperimentDescriptor.from_dict(d.to_dict()) == d


def test_empty_grid():
    assert run_convergence(chain_descriptor(k_grid=())) == []


def test_gaussian_chain_experiment():
    rows = run_convergence(chain_descriptor(), workers=3)
    assert [r.k for r in rows] == [10, 100, 1000]
    us = [r.U_value for r in rows]
    assert us[0] > us[1] > abs(us[2]) - 3 * rows[2].U_se
    ks = [r.kolmogorov for r in rows]
    assert ks[0] > ks[1] and ks[0] > ks[2]
    for r in rows:
        assert abs(r.U_value - float(r.U_int)) < 4 * r.U_se
        assert r.bound >= 0 and 0 <= r.kolmogorov <= 1


def test_parallel_rows_are_identical():
    d = chain_descriptor(k_grid=(5, 20), mc_n=2000)
    assert rows_to_csv(run_convergence(d)) == rows_to_csv(run_convergence(d, workers=2))


def test_student_self_chaos():
    st = params_to_dict(student_t(9))
    d = ExperimentDescriptor.from_dict({"target": st, "chaos": {"kind": "first_chaos", "base": st},
                                        "k_grid": [1], "mc_n": 100_000, "seed": 1})
    (row,) = run_convergence(d)
    assert abs(row.U_value) < 3 * row.U_se
    assert row.U_int == 0 and row.eta_k == Fraction(7, 4)


def test_csv_columns():
    text = rows_to_csv(run_convergence(chain_descriptor(k_grid=(4,), mc_n=1000)))
    header, line = text.splitlines()
    assert tuple(header.split(",")) == ROW_COLUMNS
    assert ROW_COLUMNS[:11] == ("k", "m1", "m2", "m3", "m4", "U_value", "Q2_value", "eta_k", "xi_k", "kolmogorov",
                                "bound")
    assert len(line.split(",")) == len(ROW_COLUMNS)
