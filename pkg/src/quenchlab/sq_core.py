"""Population simulated quenching with Cauchy, modified Cauchy and exponential cooling.

Random streams for :func:`run`: ``SeedSequence(seed).spawn(2)`` gives two
PCG64 generators, a mutation stream and an acceptance stream. Every uniform
real comes from numpy's ``random()`` mapping ``(next_uint64 >> 11) * 2**-53``;
``uniform(lo, hi)`` is ``lo + (hi - lo) * u``, filled in C order.

* mutation stream: initial population ``uniform(lower, upper, (PS, n))``,
  then for each cooling step the noise block ``uniform(-b, b, (NI, PS, n))``.
* acceptance stream: for each cooling step ``random((NI, PS))``.

One acceptance draw is consumed per proposal even when the move improves,
so stream positions never depend on fitness values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .objectives import ObjectiveSpec, SearchDomain

SCHEDULES = ("C", "M", "E")
T_FINAL = 1e-6
ALPHA = 0.9
MUTATION_FRACTION = 0.1


@dataclass(frozen=True)
class SqParams:
    cs: str
    nc: int
    ni: int
    ps: int
    it: float
    t_final: float = T_FINAL
    alpha: float = ALPHA
    mutation_fraction: float = MUTATION_FRACTION

    def __post_init__(self):
        if self.cs not in SCHEDULES:
            raise ValueError(f"cooling schedule must be one of {SCHEDULES}, got {self.cs!r}")
        for name in ("nc", "ni", "ps"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not self.it > self.t_final > 0:
            raise ValueError("need it > t_final > 0")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0.0 < self.mutation_fraction <= 1.0:
            raise ValueError("mutation_fraction must lie in (0, 1]")

    @property
    def beta(self) -> float:
        """Modified Cauchy step, chosen so that NC applications land on ``t_final``."""
        return (self.it - self.t_final) / (self.nc * self.it * self.t_final)


@dataclass(frozen=True)
class ScheduleState:
    k: int
    temperature: float

    @classmethod
    def initial(cls, params: SqParams) -> "ScheduleState":
        return cls(0, float(params.it))


def schedule_next(params: SqParams, state: ScheduleState) -> ScheduleState:
    k = state.k + 1
    t = state.temperature
    if params.cs == "C":
        t = 1.0 / (1.0 + k)
    elif params.cs == "M":
        t = t / (1.0 + params.beta * t)
    else:
        t = params.alpha * t
    return ScheduleState(k, t)


def temperatures(params: SqParams) -> np.ndarray:
    """Temperatures ``T_0..T_NC`` produced by repeated :func:`schedule_next`."""
    state = ScheduleState.initial(params)
    out = [state.temperature]
    for _ in range(params.nc):
        state = schedule_next(params, state)
        out.append(state.temperature)
    return np.array(out)


def mutate(x, domain: SearchDomain, b, rng: np.random.Generator) -> np.ndarray:
    """Uniform mutation in the box ``x + U(-b, b)^n``, clamped to the domain."""
    x = np.asarray(x, dtype=float)
    lo, hi = domain.bounds()
    return np.clip(x + rng.uniform(-b, b, size=x.shape), lo, hi)


def acceptance_probability(delta_f, temperature):
    return np.exp(-np.maximum(delta_f, 0.0) / temperature)


def accept_draw(delta_f, temperature, u):
    """Metropolis test against a pre-drawn uniform ``u``; vectorises over arrays."""
    return (delta_f <= 0) | (u < acceptance_probability(delta_f, temperature))


def accept(delta_f: float, temperature: float, rng: np.random.Generator) -> bool:
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    return bool(accept_draw(delta_f, temperature, rng.random()))


@dataclass
class RunResult:
    best_fitness: float
    best_point: np.ndarray
    evaluations: int
    trace: np.ndarray | None = None
    # per cooling step: worsening proposals and how many of them were accepted
    worse_proposed: np.ndarray | None = None
    worse_accepted: np.ndarray | None = None


def streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """(mutation stream, acceptance stream) for a run seed."""
    mut, acc = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(mut)), np.random.Generator(np.random.PCG64(acc))


# doubles of mutation noise drawn per chunk in the compiled path
_CHUNK_DOUBLES = 1 << 18


def run(objective: ObjectiveSpec, params: SqParams, seed: int, trace: bool = False,
        compiled: bool | None = None) -> RunResult:
    """One simulated quenching run.

    ``PS`` states evolve independently. Within each temperature, each state gets
    ``NI`` proposals. The schedule is applied ``NC`` times. The result is the
    best point seen by any state at any step.

    Objectives carrying a ``kernel`` run through the compiled loop unless
    ``compiled=False``; both paths consume the random streams identically.
    """
    if compiled is None:
        compiled = objective.kernel is not None
    g_mut, g_acc = streams(seed)
    lo, hi = (np.ascontiguousarray(v) for v in objective.domain.bounds())
    n = objective.domain.dimension
    b = params.mutation_fraction * (hi - lo)
    ps, ni, nc = int(params.ps), int(params.ni), int(params.nc)

    states = g_mut.uniform(lo, hi, size=(ps, n))
    values = np.asarray(objective.evaluator(states), dtype=float)
    i_best = int(np.argmin(values))
    best_point = states[i_best].copy()
    temps = temperatures(params)[:-1]  # temperature in force during cooling step c

    best_trace = np.empty(nc) if trace else np.empty(0)
    w_prop = np.zeros(nc if trace else 0, dtype=np.int64)
    w_acc = np.zeros(nc if trace else 0, dtype=np.int64)

    if compiled:
        best_point = _run_compiled(objective, states, values, best_point, g_mut, g_acc, b,
                                   temps, lo, hi, ni, ps, best_trace, w_prop, w_acc, trace)
    else:
        best_point = _run_numpy(objective, states, values, best_point, g_mut, g_acc, b,
                                temps, lo, hi, ni, ps, best_trace, w_prop, w_acc, trace)

    best_fitness = float(objective.evaluator(best_point)) - objective.optimum_value
    if trace:
        best_trace -= objective.optimum_value
    return RunResult(
        best_fitness=best_fitness,
        best_point=best_point,
        evaluations=ps + nc * ni * ps,
        trace=best_trace if trace else None,
        worse_proposed=w_prop if trace else None,
        worse_accepted=w_acc if trace else None,
    )


def _run_compiled(objective, states, values, best_point, g_mut, g_acc, b, temps, lo, hi,
                  ni, ps, best_trace, w_prop, w_acc, record):
    from . import _kernels

    name, data = objective.kernel
    kind = _kernels.KERNEL_IDS[name]
    data = _kernels._NO_DATA if data is None else np.ascontiguousarray(data, dtype=float)
    n = states.shape[1]
    # re-evaluate with the kernel so acceptance deltas come from one implementation
    values = _kernels.eval_batch(kind, states, data)
    i_best = int(np.argmin(values))
    best_point = states[i_best].copy()
    best = np.array([values[i_best]])
    nc = temps.size
    step = max(1, _CHUNK_DOUBLES // (ni * ps * n))
    for c0 in range(0, nc, step):
        m = min(step, nc - c0)
        noise = g_mut.uniform(-b, b, size=(m, ni, ps, n))
        draws = g_acc.random((m, ni, ps))
        _kernels.run_chunk(kind, data, states, values, noise, draws, temps[c0:c0 + m], lo, hi,
                           best_point, best, best_trace, w_prop, w_acc, c0, record)
    return best_point


def _run_numpy(objective, states, values, best_point, g_mut, g_acc, b, temps, lo, hi,
               ni, ps, best_trace, w_prop, w_acc, record):
    f = objective.evaluator
    best_value = float(f(best_point))
    for c, temp in enumerate(temps):
        noise = g_mut.uniform(-b, b, size=(ni, ps, states.shape[1]))
        draws = g_acc.random((ni, ps))
        for i in range(ni):
            cand = np.clip(states + noise[i], lo, hi)
            cand_values = np.asarray(f(cand), dtype=float)
            delta = cand_values - values
            ok = accept_draw(delta, temp, draws[i])
            if record:
                worse = delta > 0
                w_prop[c] += int(worse.sum())
                w_acc[c] += int((worse & ok).sum())
            states[ok] = cand[ok]
            values[ok] = cand_values[ok]
            j = int(np.argmin(cand_values))
            if cand_values[j] < best_value:
                best_value = float(cand_values[j])
                best_point = cand[j].copy()
        if record:
            best_trace[c] = best_value
    return best_point


def expected_evaluations(params: SqParams) -> int:
    return params.ps + params.nc * params.ni * params.ps

