import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from quenchlab.objectives import (
    RANA_OPTIMUM_COORD,
    RANA_OPTIMUM_VALUE_100,
    DomainError,
    SearchDomain,
    builtin_suite,
    eval_ackley,
    eval_griewangk,
    eval_rana,
    eval_rastrigin,
    fitness,
    make_objective,
)

# frozen by 30-digit mpmath evaluation
GRIEWANGK_AT_100 = 2.637681127712316
ACKLEY_AT_ONE = 3.625384938440363
RANA_AT_ORIGIN_2 = 0.45464871341284085
RANA_OPT_2 = -512.7531617147544


@pytest.mark.parametrize("f", [eval_griewangk, eval_rastrigin, eval_ackley])
def test_zero_is_optimum(f):
    assert f(np.zeros(100)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize(
    "f, x, expected",
    [
        (eval_griewangk, [2 * math.pi], 4 * math.pi**2 / 4000),
        (eval_griewangk, [100.0], GRIEWANGK_AT_100),
        (eval_rastrigin, [0.5] + [0.0] * 9, 20.25),
        (eval_rastrigin, [0.5], 20.25),
        (eval_rastrigin, [1.0] * 100, 100.0),
        (eval_ackley, [1.0], ACKLEY_AT_ONE),
        (eval_ackley, [1.0] * 100, ACKLEY_AT_ONE),
        (eval_rana, [0.0, 0.0], RANA_AT_ORIGIN_2),
        (eval_rana, [RANA_OPTIMUM_COORD] * 2, RANA_OPT_2),
    ],
)
def test_reference_values(f, x, expected):
    assert f(np.array(x)) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_rana_frozen_optimum_is_99_pair_terms():
    # every consecutive pair is identical, so the sum is 99 copies of the n = 2 value
    assert eval_rana(np.full(100, RANA_OPTIMUM_COORD)) == pytest.approx(RANA_OPTIMUM_VALUE_100, abs=1e-9)
    assert 99 * RANA_OPT_2 == pytest.approx(RANA_OPTIMUM_VALUE_100, rel=1e-13)


@pytest.mark.parametrize("f", [eval_griewangk, eval_rastrigin, eval_ackley, eval_rana])
def test_empty_vector_rejected(f):
    with pytest.raises(DomainError):
        f(np.array([]))


def test_rana_needs_two_coordinates():
    with pytest.raises(DomainError):
        eval_rana(np.array([1.0]))


def test_batch_matches_rowwise():
    rng = np.random.default_rng(3)
    xs = rng.uniform(-50, 50, (7, 12))
    for f in (eval_griewangk, eval_rastrigin, eval_ackley, eval_rana):
        batch = f(xs)
        assert batch.shape == (7,)
        assert np.array_equal(batch, [f(x) for x in xs])


def test_builtin_suite():
    suite = builtin_suite()
    assert [s.name for s in suite] == ["griewangk", "rastrigin", "ackley", "rana"]
    expected = [512.0, 50.0, 100.0, 520.0]
    for spec, w in zip(suite, expected):
        assert spec.domain.dimension == 100
        lo, hi = spec.domain.bounds()
        assert np.all(lo == -w) and np.all(hi == w)
        assert spec.domain.contains(spec.optimum_point)
        assert abs(spec.evaluator(spec.optimum_point) - spec.optimum_value) <= 1e-9
        assert fitness(spec, spec.optimum_point) == pytest.approx(0.0, abs=1e-9)


def test_fitness_examples():
    r = make_objective("rastrigin")
    assert fitness(r, np.ones(100)) == pytest.approx(100.0)
    with pytest.raises(DomainError):
        fitness(r, np.ones(99))
    with pytest.raises(DomainError):
        fitness(r, np.full(100, 51.0))


def test_unknown_objective():
    with pytest.raises(KeyError):
        make_objective("sphere")


def test_search_domain_validation():
    with pytest.raises(DomainError):
        SearchDomain(0, -1.0, 1.0)
    with pytest.raises(DomainError):
        SearchDomain(2, (0.0, 1.0), (1.0, 1.0))
    d = SearchDomain(2, (-1.0, -12.0), (1.0, 0.0))
    assert np.array_equal(d.width(), [2.0, 12.0])


def _points(name, n=100):
    w = {"griewangk": 512.0, "rastrigin": 50.0, "ackley": 100.0, "rana": 520.0}[name]
    return arrays(np.float64, n, elements=st.floats(-w, w, allow_nan=False))


@pytest.mark.parametrize("name", ["griewangk", "rastrigin", "ackley"])
@given(data=st.data())
def test_fitness_nonnegative(name, data):
    spec = make_objective(name)
    x = data.draw(_points(name))
    assert fitness(spec, x) >= -1e-9


@given(x=_points("ackley"))
def test_ackley_upper_bound(x):
    assert fitness(make_objective("ackley"), x) <= 20 + math.e + 1e-9


@pytest.mark.parametrize("name", ["griewangk", "rastrigin", "ackley", "rana"])
@given(data=st.data())
def test_fitness_is_constant_shift(name, data):
    spec = make_objective(name)
    x, y = data.draw(_points(name)), data.draw(_points(name))
    assert spec.evaluator(x) - spec.evaluator(y) == pytest.approx(fitness(spec, x) - fitness(spec, y), abs=1e-6)
    assert spec.evaluator(x) - spec.optimum_value == fitness(spec, x)


@pytest.mark.parametrize("f", [eval_rastrigin, eval_ackley])
@given(x=_points("rastrigin", 20), seed=st.integers(0, 2**32 - 1))
def test_permutation_invariance(f, x, seed):
    perm = np.random.default_rng(seed).permutation(x.size)
    assert f(x[perm]) == pytest.approx(f(x), rel=1e-9, abs=1e-9)


@given(x=_points("griewangk", 20), seed=st.integers(0, 2**32 - 1))
def test_griewangk_quadratic_term_permutation_invariant(x, seed):
    # the product weights cos(x_i / sqrt(i)) by position, so only the quadratic part is symmetric
    perm = np.random.default_rng(seed).permutation(x.size)
    quad = lambda v: np.sum(v * v) / 4000.0  # noqa: E731
    assert quad(x[perm]) == pytest.approx(quad(x), rel=1e-9)


def test_griewangk_is_position_weighted():
    x = np.zeros(10)
    x[0] = 3.0
    assert eval_griewangk(x) != pytest.approx(eval_griewangk(x[::-1]), rel=1e-9)


@pytest.mark.parametrize("f", [eval_griewangk, eval_rastrigin, eval_ackley])
@given(x=_points("rastrigin", 20))
def test_sign_flip_invariance(f, x):
    assert f(-x) == pytest.approx(f(x), rel=1e-12, abs=1e-12)


@given(x=_points("griewangk"))
def test_griewangk_lower_bound(x):
    assert eval_griewangk(x) >= np.sum(x * x) / 4000.0 - 1.0
    assert eval_griewangk(x) >= np.sum(x * x) / 4000.0 - 1e-9


@pytest.mark.parametrize("f", [eval_griewangk, eval_rastrigin, eval_ackley, eval_rana])
@given(x=_points("rana", 10))
def test_pure(f, x):
    assert f(x.copy()) == f(x.copy())


def test_rana_frozen_optimum_is_not_the_minimum():
    # moving a single end coordinate away from -514.04 lowers the value
    spec = make_objective("rana")
    x = np.full(100, RANA_OPTIMUM_COORD)
    grid = np.linspace(-520, 520, 4161)
    xs = np.repeat(x[None], grid.size, axis=0)
    xs[:, 0] = grid
    assert fitness(spec, xs).min() < 0
