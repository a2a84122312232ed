import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quenchlab import diffusion
from quenchlab.diffusion import (
    DiffusionPath,
    closed_form_mle,
    likelihood,
    likelihood_objective,
    log_likelihood,
    point_to_params,
    read_path_csv,
    simulate_path,
    write_path_csv,
)
from quenchlab.objectives import DomainError, fitness


def reference_path(seed=0):
    return diffusion.reference_path(np.random.default_rng(seed))


def test_zero_noise_zero_drift_is_constant():
    p = simulate_path(0.0, 0.0, np.arange(10.0), 2.5, np.random.default_rng(0))
    assert np.all(p.values == 2.5)


def test_zero_noise_log_increments_equal_m():
    p = simulate_path(0.1, 0.0, np.arange(20.0), 1.0, np.random.default_rng(0))
    assert np.allclose(np.diff(np.log(p.values)), 0.1, atol=1e-14)


def test_reference_configuration_length():
    p = reference_path()
    assert len(p) == 101
    assert p.values[0] == 1.0
    assert np.array_equal(p.times, np.arange(101.0))


@pytest.mark.parametrize("times", [[0, 1, 1], [0, 2, 1], [3]])
def test_bad_times_rejected(times):
    with pytest.raises(DomainError):
        simulate_path(0.0, 1e-5, np.array(times, float), 1.0, np.random.default_rng(0))


def test_path_validation():
    with pytest.raises(DomainError):
        DiffusionPath(np.array([0.0, 1.0]), np.array([1.0, -1.0]))
    with pytest.raises(DomainError):
        DiffusionPath(np.array([0.0]), np.array([1.0]))


def test_simulation_bit_reproducible():
    a, b = reference_path(42), reference_path(42)
    assert np.array_equal(a.values, b.values)


def test_two_point_likelihood_collapses():
    s2 = 3e-4
    p = DiffusionPath(np.array([0.0, 1.0]), np.array([1.0, 1.2]))
    a = math.log(1.2)
    assert log_likelihood(p, a, s2) == pytest.approx(-0.5 * math.log(2 * math.pi * s2), rel=1e-13)


def test_nonpositive_sigma2_rejected():
    with pytest.raises(DomainError):
        log_likelihood(reference_path(), 0.0, 0.0)


def test_mle_beats_random_probes():
    p = reference_path(1)
    a_hat, s2_hat = closed_form_mle(p)
    best = log_likelihood(p, a_hat, s2_hat)
    rng = np.random.default_rng(5)
    a = rng.uniform(-1, 1, 1000)
    s2 = 10.0 ** rng.uniform(-12, 0, 1000)
    assert np.all(log_likelihood(p, a, s2) <= best)
    # local probes too
    a = a_hat + rng.normal(0, 1e-4, 1000)
    s2 = s2_hat * np.exp(rng.normal(0, 0.1, 1000))
    assert np.all(log_likelihood(p, a, s2) <= best)


def test_likelihood_saturation():
    assert likelihood(DiffusionPath(np.array([0.0, 1.0]), np.array([1.0, 1.0])), 0.0,
                      1 / (2 * math.pi)) == (1.0, False)
    # sigma2 tiny on a nearly exact path drives log L past the float range
    p = simulate_path(0.0, 1e-12, np.arange(101.0), 1.0, np.random.default_rng(0))
    a_hat, s2_hat = closed_form_mle(p)
    v, flag = likelihood(p, a_hat, s2_hat)
    assert flag and v == np.finfo(float).max


@given(seed=st.integers(0, 2**32 - 1))
def test_likelihood_is_exp_of_log(seed):
    p = reference_path(seed)
    rng = np.random.default_rng(seed)
    a, s2 = rng.uniform(-1e-3, 1e-3), 10.0 ** rng.uniform(-6, -4)
    v, flag = likelihood(p, a, s2)
    if not flag:
        assert v == pytest.approx(math.exp(log_likelihood(p, a, s2)), rel=1e-12)


def test_mle_likelihood_magnitude():
    # order-of-magnitude sanity check against reported likelihood fitness of ~1e90
    for seed in range(5):
        v, flag = likelihood(reference_path(seed), *closed_form_mle(reference_path(seed)))
        assert not flag
        assert v >= 8.16e90


def test_mle_deterministic_path():
    p = DiffusionPath(np.arange(6.0), np.exp(0.1 * np.arange(6.0)))
    a_hat, s2_hat = closed_form_mle(p)
    assert a_hat == pytest.approx(0.1, rel=1e-13)
    assert s2_hat == pytest.approx(0.0, abs=1e-28)


def test_mle_constant_path():
    assert closed_form_mle(DiffusionPath(np.arange(4.0), np.full(4, 3.0))) == (0.0, 0.0)


@given(seed=st.integers(0, 2**32 - 1), c=st.floats(1e-3, 1e3))
def test_mle_scale_invariant(seed, c):
    p = reference_path(seed)
    q = DiffusionPath(p.times, p.values * c)
    assert closed_form_mle(q) == pytest.approx(closed_form_mle(p), rel=1e-6, abs=1e-15)


@given(seed=st.integers(0, 2**32 - 1))
def test_concave_in_a(seed):
    p = reference_path(seed)
    a_hat, s2_hat = closed_form_mle(p)
    grid = np.linspace(a_hat - 1e-3, a_hat + 1e-3, 2001)
    a_best = grid[np.argmax(log_likelihood(p, grid, s2_hat))]
    assert abs(a_best - a_hat) <= grid[1] - grid[0]


def test_sigma2_estimator_consistent():
    s2 = [closed_form_mle(reference_path(s))[1] for s in range(200)]
    assert abs(np.mean(s2) - 1e-5) <= 0.2e-5


@pytest.mark.parametrize("log_sigma2", [True, False])
def test_likelihood_objective(log_sigma2):
    p = reference_path(3)
    obj = likelihood_objective(p, log_sigma2=log_sigma2)
    assert obj.domain.dimension == 2
    assert fitness(obj, obj.optimum_point) == 0.0
    a_hat, s2_hat = closed_form_mle(p)
    assert point_to_params(obj, obj.optimum_point) == pytest.approx((a_hat, s2_hat), rel=1e-12)
    lo, hi = obj.domain.bounds()
    rng = np.random.default_rng(0)
    probes = rng.uniform(lo, hi, (2000, 2))
    assert np.all(fitness(obj, probes) >= 0.0)


def test_objective_box():
    obj = likelihood_objective(reference_path())
    lo, hi = obj.domain.bounds()
    assert lo.tolist() == [-1.0, -12.0] and hi.tolist() == [1.0, 0.0]
    lin = likelihood_objective(reference_path(), log_sigma2=False)
    lo, hi = lin.domain.bounds()
    assert lo.tolist() == [-1.0, 1e-12] and hi.tolist() == [1.0, 1.0]


def test_path_csv_roundtrip(tmp_path):
    p = reference_path(9)
    write_path_csv(p, tmp_path / "p.csv")
    q = read_path_csv(tmp_path / "p.csv")
    assert np.array_equal(p.times, q.times) and np.array_equal(p.values, q.values)


@pytest.mark.parametrize(
    "text, line",
    [("t,v\n0,1\n", 1), ("time,value\n0,1\n1,x\n", 3), ("time,value\n0,1\n1\n", 3)],
)
def test_path_csv_errors_name_line(tmp_path, text, line):
    f = tmp_path / "bad.csv"
    f.write_text(text)
    with pytest.raises(ValueError, match=f"line {line}"):
        read_path_csv(f)
