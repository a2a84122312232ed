"""Compiled inner loop of the quenching engine.

The numpy evaluators in ``objectives``/``diffusion`` stay the reference; these
row-wise versions must agree with them to rounding (see tests/test_kernels.py).
"""

import math

import numpy as np
from numba import njit

KERNEL_IDS = {"griewangk": 0, "rastrigin": 1, "ackley": 2, "rana": 3, "likelihood": 4, "likelihood_log10": 5}
_NO_DATA = np.zeros((2, 1))


@njit(cache=True)
def eval_row(kind, x, data):
    n = x.shape[0]
    if kind == 0:
        s = 0.0
        p = 1.0
        for i in range(n):
            s += x[i] * x[i]
            p *= math.cos(x[i] / math.sqrt(i + 1.0))
        return 1.0 + s / 4000.0 - p
    if kind == 1:
        s = 10.0 * n
        for i in range(n):
            s += x[i] * x[i] - 10.0 * math.cos(2.0 * math.pi * x[i])
        return s
    if kind == 2:
        sq = 0.0
        cs = 0.0
        for i in range(n):
            sq += x[i] * x[i]
            cs += math.cos(2.0 * math.pi * x[i])
        return 20.0 + math.e - 20.0 * math.exp(-0.2 * math.sqrt(sq / n)) - math.exp(cs / n)
    if kind == 3:
        s = 0.0
        for i in range(n - 1):
            a = x[i]
            b = x[i + 1]
            sm = math.sqrt(abs(b - a + 1.0))
            sp = math.sqrt(abs(b + a + 1.0))
            s += (b + 1.0) * math.cos(sm) * math.sin(sp) + a * math.cos(sp) * math.sin(sm)
        return s
    # negative log-likelihood of (a, sigma2) or (a, log10 sigma2); data rows are (dt, dlog)
    a = x[0]
    s2 = x[1] if kind == 4 else 10.0 ** x[1]
    k = data.shape[1]
    q = 0.0
    for i in range(k):
        dt = data[0, i]
        dl = data[1, i]
        q += dl * dl / dt + a * a * dt - 2.0 * a * dl
    return 0.5 * k * math.log(2.0 * math.pi) + 0.5 * k * math.log(s2) + q / (2.0 * s2)


@njit(cache=True)
def eval_batch(kind, xs, data):
    out = np.empty(xs.shape[0])
    for p in range(xs.shape[0]):
        out[p] = eval_row(kind, xs[p], data)
    return out


@njit(cache=True)
def run_chunk(kind, data, states, values, noise, draws, temps, lo, hi,
              best_point, best, trace, w_prop, w_acc, c0, record):
    m, ni, ps, n = noise.shape
    cand = np.empty(n)
    for c in range(m):
        temp = temps[c]
        for i in range(ni):
            for p in range(ps):
                for j in range(n):
                    v = states[p, j] + noise[c, i, p, j]
                    if v < lo[j]:
                        v = lo[j]
                    elif v > hi[j]:
                        v = hi[j]
                    cand[j] = v
                fc = eval_row(kind, cand, data)
                d = fc - values[p]
                ok = d <= 0.0 or draws[c, i, p] < math.exp(-d / temp)
                if record and d > 0.0:
                    w_prop[c0 + c] += 1
                    if ok:
                        w_acc[c0 + c] += 1
                if ok:
                    states[p, :] = cand
                    values[p] = fc
                if fc < best[0]:
                    best[0] = fc
                    best_point[:] = cand
        if record:
            trace[c0 + c] = best[0]
