"""One-way ANOVA, Tukey HSD, Levene's test, tables of means and boxplot summaries."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .stat_dist import f_sf, studentized_range_cdf, studentized_range_quantile

ALPHA = 0.05


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class GroupedSample:
    factor_name: str
    levels: tuple
    responses: tuple  # one 1-d float array per level

    def __init__(self, factor_name: str, levels: Sequence, responses: Sequence):
        if len(levels) != len(responses):
            raise AnalysisError("need one response list per level")
        object.__setattr__(self, "factor_name", factor_name)
        object.__setattr__(self, "levels", tuple(levels))
        object.__setattr__(self, "responses", tuple(np.asarray(r, dtype=float) for r in responses))

    @classmethod
    def from_pairs(cls, factor_name: str, labels, values, order: Sequence | None = None):
        """Group ``values`` by ``labels``; levels follow ``order`` or first appearance."""
        labels = list(labels)
        values = np.asarray(values, dtype=float)
        if order is None:
            order = list(dict.fromkeys(labels))
        groups = {lvl: [] for lvl in order}
        for lab, v in zip(labels, values):
            groups[lab].append(v)
        levels = [lvl for lvl in order if groups[lvl]]
        return cls(factor_name, levels, [groups[lvl] for lvl in levels])

    @property
    def k(self) -> int:
        return len(self.levels)

    @property
    def sizes(self) -> np.ndarray:
        return np.array([r.size for r in self.responses])

    @property
    def n_total(self) -> int:
        return int(self.sizes.sum())


@dataclass(frozen=True)
class AnovaTable:
    factor_name: str
    df_between: int
    df_within: int
    ss_between: float
    ss_within: float
    ms_between: float
    ms_within: float
    f_value: float
    p_value: float
    significant: bool
    degenerate: bool = False  # zero within-group variance: F is infinite


# responses beyond this magnitude are rescaled by a power of two before squaring
_BIG = 1e100


def _scaled(sample: GroupedSample) -> tuple[float, list[np.ndarray]]:
    """``(c, responses / c)`` with ``c`` an exact power of two, 1 for ordinary data."""
    top = max((float(np.max(np.abs(r))) for r in sample.responses if r.size), default=0.0)
    if not math.isfinite(top):
        raise AnalysisError(f"{sample.factor_name}: non-finite response")
    if top <= _BIG:
        return 1.0, list(sample.responses)
    c = 2.0 ** math.frexp(top)[1]
    return c, [r / c for r in sample.responses]


def _sums_of_squares(responses, sizes):
    means = np.array([r.mean() for r in responses])
    grand = np.concatenate(responses).mean()
    ss_between = float(np.sum(sizes * (means - grand) ** 2))
    ss_within = float(sum(np.sum((r - m) ** 2) for r, m in zip(responses, means)))
    return means, ss_between, ss_within


def one_way_anova(sample: GroupedSample, alpha: float = ALPHA) -> AnovaTable:
    """One-way ANOVA. Sums of squares are reported in the response units squared
    (``inf`` if that overflows); F and p are computed on rescaled data and stay exact."""
    k, n = sample.k, sample.n_total
    if k < 2:
        raise AnalysisError(f"{sample.factor_name}: need at least 2 levels")
    if np.any(sample.sizes < 2):
        raise AnalysisError(f"{sample.factor_name}: every level needs >= 2 observations")
    c, responses = _scaled(sample)
    _, ssb, ssw = _sums_of_squares(responses, sample.sizes)
    df_b, df_w = k - 1, n - k
    if ssw == 0.0 and ssb == 0.0:
        raise AnalysisError(f"{sample.factor_name}: no variance (all observations identical)")
    c2 = c * c
    ss_between, ss_within = ssb * c2, ssw * c2
    ms_b, ms_w = ss_between / df_b, ss_within / df_w
    if ssw == 0.0:
        return AnovaTable(sample.factor_name, df_b, df_w, ss_between, 0.0, ms_b, 0.0,
                          math.inf, 0.0, True, degenerate=True)
    f = (ssb / df_b) / (ssw / df_w)
    p = f_sf(f, df_b, df_w)
    return AnovaTable(sample.factor_name, df_b, df_w, ss_between, ss_within, ms_b, ms_w,
                      f, p, p < alpha)


@dataclass(frozen=True)
class TukeyComparison:
    level_a: object
    level_b: object
    mean_diff: float
    ci_low: float
    ci_high: float
    p_adj: float
    significant: bool
    warning: str = ""


def tukey_hsd(sample: GroupedSample, anova: AnovaTable, alpha: float = ALPHA) -> list[TukeyComparison]:
    """Pairwise Tukey-Kramer intervals, ``mean_b - mean_a`` for each pair ``(a, b)``.

    Pairs are emitted in level order, as R's TukeyHSD does: for levels
    ``L1..Lk`` the comparisons are ``L2-L1, L3-L1, ..., Lk-L(k-1)``.
    """
    if sample.k < 2:
        raise AnalysisError("need at least 2 levels")
    warning = "" if anova.significant else "ANOVA not significant"
    q = studentized_range_quantile(1.0 - alpha, sample.k, anova.df_within)
    # work in rescaled units so huge responses do not overflow ms_within
    c, responses = _scaled(sample)
    means, _, ssw = _sums_of_squares(responses, sample.sizes)
    ms_w = ssw / anova.df_within
    out = []
    for i, j in itertools.combinations(range(sample.k), 2):
        diff = float(means[j] - means[i])
        se = math.sqrt(0.5 * ms_w * (1.0 / sample.sizes[i] + 1.0 / sample.sizes[j]))
        half = q * se
        if se > 0:
            p_adj = 1.0 - studentized_range_cdf(abs(diff) / se, sample.k, anova.df_within)
        else:
            p_adj = 0.0 if diff != 0 else 1.0
        out.append(
            TukeyComparison(
                level_a=sample.levels[j],
                level_b=sample.levels[i],
                mean_diff=diff * c,
                ci_low=(diff - half) * c,
                ci_high=(diff + half) * c,
                p_adj=max(p_adj, 0.0),
                significant=abs(diff) > half,
                warning=warning,
            )
        )
    return out


def levene(sample: GroupedSample) -> tuple[float, float]:
    """Mean-centred Levene test: ANOVA on absolute deviations from the group means."""
    if np.any(sample.sizes < 2):
        raise AnalysisError("every level needs >= 2 observations")
    dev = [np.abs(r - r.mean()) for r in sample.responses]
    if all(np.all(d == 0) for d in dev):
        raise AnalysisError("degenerate spread: all absolute deviations are zero")
    t = one_way_anova(GroupedSample(sample.factor_name, sample.levels, dev))
    return t.f_value, t.p_value


def means_table(sample: GroupedSample) -> list[tuple[object, float]]:
    out = []
    for lvl, r in zip(sample.levels, sample.responses):
        if r.size == 0:
            raise AnalysisError(f"level {lvl!r} has no observations")
        out.append((lvl, float(r.mean())))
    return out


@dataclass(frozen=True)
class FiveNumberSummary:
    n: int
    min: float
    q1: float
    median: float
    q3: float
    max: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]


def quartiles(values) -> tuple[float, float, float]:
    """Quartiles by linear interpolation at order-statistic position 1 + (n - 1) p."""
    v = np.sort(np.asarray(values, dtype=float))
    q1, med, q3 = np.quantile(v, [0.25, 0.5, 0.75], method="linear")
    return float(q1), float(med), float(q3)


def five_number_summary(values) -> FiveNumberSummary:
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        raise AnalysisError("empty level")
    q1, med, q3 = quartiles(v)
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = v[(v >= lo_fence) & (v <= hi_fence)]
    outliers = tuple(float(x) for x in v[(v < lo_fence) | (v > hi_fence)])
    return FiveNumberSummary(int(v.size), float(v[0]), q1, med, q3, float(v[-1]),
                             float(inside[0]), float(inside[-1]), outliers)


def boxplot_summary(sample: GroupedSample) -> list[tuple[object, FiveNumberSummary]]:
    return [(lvl, five_number_summary(r)) for lvl, r in zip(sample.levels, sample.responses)]
