"""Lognormal diffusion: path simulation, likelihood of (a, sigma^2), closed-form MLE.

The process has infinitesimal moments ``m x`` and ``sigma^2 x^2``; its
log-increments over ``dt`` are Gaussian with mean ``a dt`` and variance
``sigma^2 dt``, where ``a = m - sigma^2 / 2``.
"""

from __future__ import annotations

import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .objectives import DomainError, ObjectiveSpec, SearchDomain

A_BOUNDS = (-1.0, 1.0)
SIGMA2_BOUNDS = (1e-12, 1.0)

# the configuration used to generate the studied path
REFERENCE_M = 0.0
REFERENCE_SIGMA2 = 1e-5
REFERENCE_TIMES = np.arange(101, dtype=float)  # t_i = i - 1, i = 1..101


@dataclass(frozen=True)
class DiffusionPath:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        x = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != x.shape:
            raise DomainError("times and values must be 1-d sequences of equal length")
        if t.size < 2:
            raise DomainError("a path needs at least two observations")
        if not np.all(np.diff(t) > 0):
            raise DomainError("times must be strictly increasing")
        if not np.all(x > 0):
            raise DomainError("values must be positive")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", x)

    def __len__(self):
        return self.times.size

    def increments(self) -> tuple[np.ndarray, np.ndarray]:
        """``(dt, dlog)``: time steps and log-increments."""
        return np.diff(self.times), np.diff(np.log(self.values))


def simulate_path(m: float, sigma2: float, times, x1: float = 1.0, rng=None) -> DiffusionPath:
    """Exact-transition simulation starting deterministically at ``x1``."""
    if sigma2 < 0:
        raise DomainError("sigma2 must be non-negative")
    if x1 <= 0:
        raise DomainError("x1 must be positive")
    times = np.asarray(times, dtype=float)
    dt = np.diff(times)
    if times.ndim != 1 or times.size < 2 or not np.all(dt > 0):
        raise DomainError("times must be a strictly increasing sequence of length >= 2")
    if rng is None:
        rng = np.random.default_rng()
    z = rng.standard_normal(dt.size)
    dlog = (m - sigma2 / 2.0) * dt + np.sqrt(sigma2 * dt) * z
    logx = math.log(x1) + np.concatenate(([0.0], np.cumsum(dlog)))
    values = np.exp(logx)
    values[0] = x1
    return DiffusionPath(times, values)


def _quadratic_sum(dt, dlog, a):
    # sum over i of dlog^2/dt + a^2 dt - 2 a dlog, broadcast over an array of a
    a = np.asarray(a, dtype=float)[..., None]
    return np.sum(dlog * dlog / dt + a * a * dt - 2.0 * a * dlog, axis=-1)


def log_likelihood(path: DiffusionPath, a, sigma2):
    """Log of L(a, sigma^2); vectorises over ``a`` and ``sigma2`` arrays."""
    sigma2 = np.asarray(sigma2, dtype=float)
    if np.any(sigma2 <= 0):
        raise DomainError("sigma2 must be positive")
    dt, dlog = path.increments()
    k = dt.size
    q = _quadratic_sum(dt, dlog, a)
    v = -0.5 * k * math.log(2.0 * math.pi) - 0.5 * k * np.log(sigma2) - q / (2.0 * sigma2)
    return float(v) if np.ndim(v) == 0 else v


class Likelihood(NamedTuple):
    value: float
    overflow: bool


_MAX_LOG = math.log(sys.float_info.max)


def likelihood(path: DiffusionPath, a: float, sigma2: float) -> Likelihood:
    """Raw L(a, sigma^2), saturating at the largest finite float on overflow."""
    ll = log_likelihood(path, a, sigma2)
    if ll > _MAX_LOG:
        return Likelihood(sys.float_info.max, True)
    return Likelihood(math.exp(ll), False)


def closed_form_mle(path: DiffusionPath) -> tuple[float, float]:
    dt, dlog = path.increments()
    a_hat = (math.log(path.values[-1]) - math.log(path.values[0])) / (path.times[-1] - path.times[0])
    resid = dlog - a_hat * dt
    sigma2_hat = float(np.sum(resid * resid / dt) / dt.size)
    return float(a_hat), sigma2_hat


def likelihood_objective(path: DiffusionPath, log_sigma2: bool = True) -> ObjectiveSpec:
    """Minimise ``-log L`` over ``a in [-1, 1]``, ``sigma^2 in [1e-12, 1]``.

    By default the second search coordinate is ``log10(sigma^2)`` (box
    ``[-12, 0]``), so a fixed-width uniform mutation can resolve sigma^2 at
    every scale. ``log_sigma2=False`` searches sigma^2 linearly. Use
    :func:`point_to_params` to map a search point back to ``(a, sigma^2)``.
    """
    a_hat, s2_hat = closed_form_mle(path)
    if not (A_BOUNDS[0] <= a_hat <= A_BOUNDS[1] and SIGMA2_BOUNDS[0] <= s2_hat <= SIGMA2_BOUNDS[1]):
        raise DomainError(f"MLE ({a_hat:g}, {s2_hat:g}) lies outside the search box")
    dt, dlog = path.increments()

    if log_sigma2:
        lo2, hi2 = math.log10(SIGMA2_BOUNDS[0]), math.log10(SIGMA2_BOUNDS[1])
        point = np.array([a_hat, math.log10(s2_hat)])
        name, kernel = "likelihood", "likelihood_log10"
    else:
        lo2, hi2 = SIGMA2_BOUNDS
        point = np.array([a_hat, s2_hat])
        name, kernel = "likelihood_linear", "likelihood"
    domain = SearchDomain(2, (A_BOUNDS[0], lo2), (A_BOUNDS[1], hi2))

    def neg_log_likelihood(x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != 2:
            raise DomainError(f"expected 2-d search points, got shape {x.shape}")
        s2 = 10.0 ** x[..., 1] if log_sigma2 else x[..., 1]
        return -log_likelihood(path, x[..., 0], s2)

    return ObjectiveSpec(
        name=name,
        domain=domain,
        evaluator=neg_log_likelihood,
        optimum_point=point,
        optimum_value=float(neg_log_likelihood(point)),
        kernel=(kernel, np.stack([dt, dlog])),
    )


def point_to_params(objective: ObjectiveSpec, x) -> tuple[float, float]:
    """``(a, sigma^2)`` for a search point of a likelihood objective."""
    a, s = float(x[0]), float(x[1])
    return (a, 10.0 ** s) if objective.name == "likelihood" else (a, s)


def reference_path(rng) -> DiffusionPath:
    return simulate_path(REFERENCE_M, REFERENCE_SIGMA2, REFERENCE_TIMES, 1.0, rng)


def write_path_csv(path: DiffusionPath, dest) -> None:
    with open(dest, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "value"])
        for t, x in zip(path.times, path.values):
            w.writerow([repr(float(t)), repr(float(x))])


def read_path_csv(src) -> DiffusionPath:
    with open(Path(src), newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["time", "value"]:
        raise ValueError(f"{src}: line 1: expected header 'time,value'")
    times, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ValueError(f"{src}: line {lineno}: expected 2 columns, got {len(row)}")
        try:
            times.append(float(row[0]))
            values.append(float(row[1]))
        except ValueError as exc:
            raise ValueError(f"{src}: line {lineno}: {exc}") from None
    return DiffusionPath(np.array(times), np.array(values))
