"""Benchmark objectives: Griewangk, Rastrigin, Ackley and Rana.

Every evaluator accepts a single point of shape ``(n,)`` or a batch of
points of shape ``(m, n)`` and returns a float or an array of ``m`` values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

DIMENSION = 100

# f_rana at x_i = -514.04 for n = 100, sum over i = 1..n-1.
# Generated once by direct evaluation (numpy and pure-math loops agree bit-for-bit).
RANA_OPTIMUM_COORD = -514.04
RANA_OPTIMUM_VALUE_100 = -50762.56300976067


class DomainError(ValueError):
    """Raised when an input violates an objective's domain contract."""


def _as_points(x, min_dim: int = 1) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] < min_dim:
        raise DomainError(f"expected at least {min_dim} coordinate(s), got shape {x.shape}")
    return x


def _result(v):
    return float(v) if np.ndim(v) == 0 else v


def eval_griewangk(x) -> float | np.ndarray:
    x = _as_points(x)
    idx = np.sqrt(np.arange(1, x.shape[-1] + 1, dtype=float))
    v = 1.0 + np.sum(x * x, axis=-1) / 4000.0 - np.prod(np.cos(x / idx), axis=-1)
    return _result(v)


def eval_rastrigin(x) -> float | np.ndarray:
    x = _as_points(x)
    n = x.shape[-1]
    v = 10.0 * n + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x), axis=-1)
    return _result(v)


def eval_ackley(x) -> float | np.ndarray:
    x = _as_points(x)
    n = x.shape[-1]
    rms = np.sqrt(np.sum(x * x, axis=-1) / n)
    mean_cos = np.sum(np.cos(2.0 * np.pi * x), axis=-1) / n
    v = 20.0 + np.e - 20.0 * np.exp(-0.2 * rms) - np.exp(mean_cos)
    return _result(v)


def eval_rana(x) -> float | np.ndarray:
    """Rana's function, summed over consecutive pairs (no wrap-around)."""
    x = _as_points(x, min_dim=2)
    cur, nxt = x[..., :-1], x[..., 1:]
    s_minus = np.sqrt(np.abs(nxt - cur + 1.0))
    s_plus = np.sqrt(np.abs(nxt + cur + 1.0))
    terms = (nxt + 1.0) * np.cos(s_minus) * np.sin(s_plus) + cur * np.cos(s_plus) * np.sin(s_minus)
    return _result(np.sum(terms, axis=-1))


@dataclass(frozen=True)
class SearchDomain:
    """Axis-aligned search box.

    ``lower``/``upper`` may be scalars (same interval on every coordinate)
    or per-coordinate sequences of length ``dimension``.
    """

    dimension: int
    lower: float | tuple[float, ...]
    upper: float | tuple[float, ...]

    def __post_init__(self):
        if self.dimension < 1:
            raise DomainError("dimension must be >= 1")
        lo, hi = self.bounds()
        if not np.all(lo < hi):
            raise DomainError("lower must be < upper on every coordinate")

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.dimension,))
        hi = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.dimension,))
        return lo, hi

    def width(self) -> np.ndarray:
        lo, hi = self.bounds()
        return hi - lo

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        lo, hi = self.bounds()
        return x.shape[-1] == self.dimension and bool(np.all((x >= lo) & (x <= hi)))


@dataclass(frozen=True)
class ObjectiveSpec:
    name: str
    domain: SearchDomain
    evaluator: Callable = field(repr=False)
    optimum_point: np.ndarray = field(repr=False)
    optimum_value: float
    direction: str = "minimize"
    # (kernel name, data array) for the compiled engine; None -> numpy fallback
    kernel: tuple | None = field(default=None, repr=False, compare=False)

    def __call__(self, x):
        return self.evaluator(x)


def fitness(spec: ObjectiveSpec, x) -> float | np.ndarray:
    """Distance to the known optimum value: ``evaluator(x) - optimum_value``."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != spec.domain.dimension:
        raise DomainError(
            f"{spec.name}: expected dimension {spec.domain.dimension}, got shape {x.shape}"
        )
    if not spec.domain.contains(x):
        raise DomainError(f"{spec.name}: point outside the search domain")
    return spec.evaluator(x) - spec.optimum_value


def make_objective(name: str, dimension: int = DIMENSION) -> ObjectiveSpec:
    if name == "griewangk":
        dom, f, xstar = SearchDomain(dimension, -512.0, 512.0), eval_griewangk, 0.0
    elif name == "rastrigin":
        dom, f, xstar = SearchDomain(dimension, -50.0, 50.0), eval_rastrigin, 0.0
    elif name == "ackley":
        dom, f, xstar = SearchDomain(dimension, -100.0, 100.0), eval_ackley, 0.0
    elif name == "rana":
        dom, f, xstar = SearchDomain(dimension, -520.0, 520.0), eval_rana, RANA_OPTIMUM_COORD
    else:
        raise KeyError(f"unknown objective {name!r}")
    point = np.full(dimension, xstar)
    if name == "rana" and dimension == DIMENSION:
        value = RANA_OPTIMUM_VALUE_100
    else:
        value = float(f(point))
    return ObjectiveSpec(name, dom, f, point, value, kernel=(name, None))


BENCHMARK_NAMES = ("griewangk", "rastrigin", "ackley", "rana")


def builtin_suite(dimension: int = DIMENSION) -> list[ObjectiveSpec]:
    return [make_objective(name, dimension) for name in BENCHMARK_NAMES]
