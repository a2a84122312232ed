"""Full-factorial experiments: design enumeration, seeding, execution, CSV and reports."""

from __future__ import annotations

import csv
import hashlib
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from . import diffusion
from .objectives import BENCHMARK_NAMES, make_objective
from .sq_core import SCHEDULES, SqParams, run
from .stat_analysis import (
    ALPHA,
    AnalysisError,
    GroupedSample,
    boxplot_summary,
    levene,
    means_table,
    one_way_anova,
    tukey_hsd,
)

PROBLEMS = BENCHMARK_NAMES + ("likelihood",)
FACTORS = ("cs", "nc", "ni", "ps", "it")
CSV_COLUMNS = ("problem", "cs", "nc", "ni", "ps", "it", "rep", "seed", "fitness", "evals", "wall_ms")


class ConfigError(ValueError):
    """Invalid design, unknown problem or similar user configuration mistake."""


class CsvFormatError(ValueError):
    def __init__(self, path, line: int, column: str | None, message: str):
        where = f"line {line}" + (f", column {column!r}" if column else "")
        super().__init__(f"{path}: {where}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Design:
    """Factor level grids plus replication; ``problem`` names the objective."""

    cs: tuple[str, ...]
    nc: tuple[int, ...]
    ni: tuple[int, ...]
    ps: tuple[int, ...]
    it: tuple[float, ...]
    reps: int = 30
    base_seed: int = 0
    problem: str = "griewangk"

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ConfigError(f"unknown problem {self.problem!r}; choose from {', '.join(PROBLEMS)}")
        for name in FACTORS:
            levels = tuple(getattr(self, name))
            if not levels:
                raise ConfigError(f"design: level list {name!r} is empty")
            object.__setattr__(self, name, levels)
        bad = [c for c in self.cs if c not in SCHEDULES]
        if bad:
            raise ConfigError(f"design: unknown cooling schedule(s) {bad}")
        for name in ("nc", "ni", "ps"):
            if any(int(v) != v or v < 1 for v in getattr(self, name)):
                raise ConfigError(f"design: {name} levels must be positive integers")
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))
        if any(not v > 0 for v in self.it):
            raise ConfigError("design: it levels must be positive")
        object.__setattr__(self, "it", tuple(float(v) for v in self.it))
        if int(self.reps) != self.reps or self.reps < 1:
            raise ConfigError("design: reps must be a positive integer")
        object.__setattr__(self, "reps", int(self.reps))
        object.__setattr__(self, "base_seed", int(self.base_seed))

    def replace(self, **changes) -> "Design":
        d = asdict(self)
        d.update({k: v for k, v in changes.items() if v is not None})
        return Design(**d)

    def to_json(self) -> str:
        return json.dumps(
            {"cs": list(self.cs), "nc": list(self.nc), "ni": list(self.ni), "ps": list(self.ps),
             "it": list(self.it), "reps": self.reps, "base_seed": self.base_seed},
            sort_keys=True,
        )

    @classmethod
    def from_dict(cls, d: dict) -> "Design":
        unknown = set(d) - {"cs", "nc", "ni", "ps", "it", "reps", "base_seed", "problem"}
        if unknown:
            raise ConfigError(f"design: unknown keys {sorted(unknown)}")
        missing = [k for k in FACTORS if k not in d]
        if missing:
            raise ConfigError(f"design: missing keys {missing}")
        for k in FACTORS:
            if not isinstance(d[k], list):
                raise ConfigError(f"design: {k!r} must be a list")
        return cls(d["cs"], d["nc"], d["ni"], d["ps"], d["it"], d.get("reps", 30),
                   d.get("base_seed", 0), d.get("problem", "griewangk"))

    def fingerprint(self) -> str:
        return hashlib.sha256((self.problem + "\n" + self.to_json()).encode()).hexdigest()[:16]


FULL = Design(("C", "M", "E"), (1000, 2000, 4000, 8000, 16000), (2, 4, 8, 16, 32),
              (1, 2, 4, 8, 16), (10.0, 50.0, 100.0), reps=30)
REDUCED = Design(("C", "M", "E"), (1000, 2000), (2, 4), (1, 2), (10.0, 100.0), reps=10)
NAMED_DESIGNS = {"full": FULL, "reduced": REDUCED}


def load_design(spec: str) -> Design:
    """A named design (``full``/``reduced``) or a path to a design JSON file."""
    if spec in NAMED_DESIGNS:
        return NAMED_DESIGNS[spec]
    try:
        with open(spec) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"design {spec!r} is neither 'full', 'reduced' nor an existing file") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"design file {spec}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"design file {spec}: expected a JSON object")
    return Design.from_dict(data)


class Config(NamedTuple):
    cs: str
    nc: int
    ni: int
    ps: int
    it: float

    def params(self) -> SqParams:
        return SqParams(self.cs, self.nc, self.ni, self.ps, self.it)


def enumerate_design(design: Design) -> list[Config]:
    """Cartesian product in (cs, nc, ni, ps, it) order, each list in declared order."""
    return [Config(*c) for c in itertools.product(design.cs, design.nc, design.ni, design.ps, design.it)]


def derive_seed(base_seed: int, problem: str, config_index: int, rep: int) -> int:
    """64-bit run seed: first 8 bytes (little endian) of BLAKE2b over ``"base|problem|index|rep"``."""
    msg = f"{int(base_seed)}|{problem}|{int(config_index)}|{int(rep)}".encode()
    return int.from_bytes(hashlib.blake2b(msg, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class RunRecord:
    problem: str
    cs: str
    nc: int
    ni: int
    ps: int
    it: float
    rep: int
    seed: int
    fitness: float
    evaluations: int
    wall_ms: int = 0

    def key(self):
        return (self.problem, self.cs, self.nc, self.ni, self.ps, self.it, self.rep)


@dataclass
class ResultSet:
    records: list[RunRecord]
    fingerprint: str | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.records)

    def problems(self) -> list[str]:
        return list(dict.fromkeys(r.problem for r in self.records))

    def for_problem(self, problem: str) -> "ResultSet":
        return ResultSet([r for r in self.records if r.problem == problem], self.fingerprint)

    def fitness(self) -> np.ndarray:
        return np.array([r.fitness for r in self.records])


# ---------------------------------------------------------------- execution

def likelihood_path(base_seed: int) -> diffusion.DiffusionPath:
    """The diffusion path studied for a given base seed."""
    seed = derive_seed(base_seed, "likelihood/path", 0, 0)
    return diffusion.reference_path(np.random.Generator(np.random.PCG64(seed)))


def build_objective(problem: str, path: diffusion.DiffusionPath | None = None):
    if problem in BENCHMARK_NAMES:
        return make_objective(problem)
    if problem == "likelihood":
        if path is None:
            raise ConfigError("likelihood problem needs a diffusion path")
        return diffusion.likelihood_objective(path)
    raise ConfigError(f"unknown problem {problem!r}; choose from {', '.join(PROBLEMS)}")


_WORKER: dict = {}


def _init_worker(problem, path_data):
    path = diffusion.DiffusionPath(*path_data) if path_data is not None else None
    _WORKER["problem"] = problem
    _WORKER["path"] = path
    _WORKER["objective"] = build_objective(problem, path)


def _run_unit(unit):
    idx, rep, config, seed = unit
    problem, objective, path = _WORKER["problem"], _WORKER["objective"], _WORKER["path"]
    t0 = time.perf_counter()
    res = run(objective, config.params(), seed)
    if problem == "likelihood":
        a, s2 = diffusion.point_to_params(objective, res.best_point)
        fit = diffusion.likelihood(path, a, s2).value
    else:
        fit = float(res.best_fitness)
    wall = int(round(1000 * (time.perf_counter() - t0)))
    return RunRecord(problem, config.cs, config.nc, config.ni, config.ps, config.it, rep, seed,
                     fit, res.evaluations, wall)


def run_design(design: Design, parallelism: int = 1,
               path: diffusion.DiffusionPath | None = None, progress=None) -> ResultSet:
    """Execute every (config, rep) with its derived seed; record order follows enumeration.

    Each unit seeds its own generators, so fitness values do not depend on
    ``parallelism``. The likelihood problem uses ``path`` or, when absent, the
    path simulated from :func:`likelihood_path` of the base seed.
    """
    problem = design.problem
    if parallelism < 1:
        raise ConfigError("parallelism must be >= 1")
    if problem == "likelihood" and path is None:
        path = likelihood_path(design.base_seed)
    path_data = (path.times, path.values) if path is not None else None
    configs = enumerate_design(design)
    units = [
        (i, rep, cfg, derive_seed(design.base_seed, problem, i, rep))
        for i, cfg in enumerate(configs)
        for rep in range(design.reps)
    ]
    if parallelism == 1:
        _init_worker(problem, path_data)
        records = []
        for n_done, u in enumerate(units, 1):
            records.append(_run_unit(u))
            if progress:
                progress(n_done, len(units))
    else:
        chunk = max(1, len(units) // (8 * parallelism))
        with ProcessPoolExecutor(parallelism, initializer=_init_worker,
                                 initargs=(problem, path_data)) as ex:
            records = list(ex.map(_run_unit, units, chunksize=chunk))
    meta = {"problem": problem, "design": design.to_json()}
    return ResultSet(records, design.fingerprint(), meta)


# ---------------------------------------------------------------- CSV

def _fmt_float(x: float) -> str:
    return repr(float(x))


def write_csv(rs: ResultSet, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rs.records:
            w.writerow([r.problem, r.cs, r.nc, r.ni, r.ps, _fmt_float(r.it), r.rep, r.seed,
                        _fmt_float(r.fitness), r.evaluations, r.wall_ms])


def _parse(value: str, kind, path, line, column):
    try:
        v = kind(value)
    except ValueError:
        raise CsvFormatError(path, line, column, f"cannot parse {value!r} as {kind.__name__}") from None
    if kind is float and column != "fitness" and not math.isfinite(v):
        raise CsvFormatError(path, line, column, f"non-finite value {value!r}")
    return v


def read_csv(path) -> ResultSet:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(path, 1, None, "empty file") from None
        header = [h.strip() for h in header]
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise CsvFormatError(path, 1, missing[0], "missing column")
        pos = {c: header.index(c) for c in CSV_COLUMNS}
        records, seen = [], set()
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise CsvFormatError(path, line, None, f"expected {len(header)} fields, got {len(row)}")
            get = lambda c, kind: _parse(row[pos[c]].strip(), kind, path, line, c)  # noqa: E731
            problem = row[pos["problem"]].strip()
            cs = row[pos["cs"]].strip()
            if cs not in SCHEDULES:
                raise CsvFormatError(path, line, "cs", f"unknown cooling schedule {cs!r}")
            rec = RunRecord(problem, cs, get("nc", int), get("ni", int), get("ps", int),
                            get("it", float), get("rep", int), get("seed", int),
                            get("fitness", float), get("evals", int), get("wall_ms", int))
            if rec.key() in seen:
                raise CsvFormatError(path, line, None, "duplicate (config, rep) record")
            seen.add(rec.key())
            records.append(rec)
    return ResultSet(records, None)


# ---------------------------------------------------------------- analysis

@dataclass
class FactorReport:
    factor: str
    levels: list
    anova: object = None
    levene: tuple | None = None
    means: list = field(default_factory=list)
    boxplot: list = field(default_factory=list)
    tukey: list = field(default_factory=list)
    notice: str = ""


@dataclass
class Report:
    problem: str
    direction: str
    alpha: float
    n_records: int
    factors: dict[str, FactorReport]


def default_direction(problem: str) -> str:
    return "maximize" if problem == "likelihood" else "minimize"


def _level_order(factor: str, values) -> list:
    present = set(values)
    if factor == "cs":
        return [c for c in SCHEDULES if c in present]
    return sorted(present)


def analyze(rs: ResultSet, alpha: float = ALPHA, direction: str | None = None,
            problem: str | None = None) -> Report:
    """Per-factor one-way ANOVA, Levene, means, boxplots and Tukey HSD for one problem."""
    problems = rs.problems()
    if problem is None:
        if len(problems) != 1:
            raise ConfigError(f"result set holds {len(problems)} problems; choose one of {problems}")
        problem = problems[0]
    records = [r for r in rs.records if r.problem == problem]
    if not records:
        raise ConfigError(f"no records for problem {problem!r}")
    direction = direction or default_direction(problem)
    if direction not in ("minimize", "maximize"):
        raise ConfigError(f"direction must be minimize or maximize, got {direction!r}")
    y = np.array([r.fitness for r in records])
    factors = {}
    for fac in FACTORS:
        labels = [getattr(r, fac) for r in records]
        order = _level_order(fac, labels)
        fr = FactorReport(fac.upper(), order)
        factors[fac.upper()] = fr
        if len(order) < 2:
            fr.notice = f"skipped: only one level ({order[0]!r}) present"
            continue
        sample = GroupedSample.from_pairs(fac.upper(), labels, y, order)
        fr.means = means_table(sample)
        fr.boxplot = boxplot_summary(sample)
        try:
            fr.anova = one_way_anova(sample, alpha)
        except AnalysisError as exc:
            fr.notice = str(exc)
            continue
        try:
            fr.levene = levene(sample)
        except AnalysisError as exc:
            fr.notice = f"levene: {exc}"
        fr.tukey = tukey_hsd(sample, fr.anova, alpha)
    return Report(problem, direction, alpha, len(records), factors)


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "TRUE" if x else "FALSE"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _tsv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(_fmt(v) for v in row) + "\n")


ANOVA_COLUMNS = ("factor", "direction", "alpha", "df_between", "df_within", "ss_between", "ss_within",
                 "ms_between", "ms_within", "f_value", "p_value", "significant", "levene_w", "levene_p")
MEANS_COLUMNS = ("level", "n", "mean", "best")
TUKEY_COLUMNS = ("comparison", "level_a", "level_b", "diff", "lwr", "upr", "p_adj", "significant", "warning")
BOXPLOT_COLUMNS = ("level", "n", "min", "whisker_low", "q1", "median", "q3", "whisker_high", "max", "outliers")


def write_report(report: Report, out_dir) -> list[Path]:
    """Write ``anova_F``, ``means_F``, ``tukey_F`` and ``boxplot_F`` TSVs per analysable factor."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    summary_lines = [f"problem\t{report.problem}", f"direction\t{report.direction}",
                     f"alpha\t{_fmt(float(report.alpha))}", f"records\t{report.n_records}"]
    for name, fr in report.factors.items():
        if fr.notice:
            summary_lines.append(f"notice\t{name}\t{fr.notice}")
        if fr.anova is None:
            continue
        a = fr.anova
        lw, lp = fr.levene if fr.levene else ("NA", "NA")
        p = out / f"anova_{name}.tsv"
        _tsv(p, ANOVA_COLUMNS, [(name, report.direction, float(report.alpha), a.df_between, a.df_within,
                                 a.ss_between, a.ss_within, a.ms_between, a.ms_within, a.f_value,
                                 a.p_value, a.significant, lw, lp)])
        written.append(p)

        pick = min if report.direction == "minimize" else max
        best_level = pick(fr.means, key=lambda lm: lm[1])[0]
        sizes = {lvl: s.n for lvl, s in fr.boxplot}
        p = out / f"means_{name}.tsv"
        _tsv(p, MEANS_COLUMNS, [(lvl, sizes[lvl], m, lvl == best_level) for lvl, m in fr.means])
        written.append(p)

        p = out / f"tukey_{name}.tsv"
        _tsv(p, TUKEY_COLUMNS, [(f"{c.level_a}-{c.level_b}", c.level_a, c.level_b, c.mean_diff,
                                 c.ci_low, c.ci_high, c.p_adj, c.significant, c.warning or "-")
                                for c in fr.tukey])
        written.append(p)

        p = out / f"boxplot_{name}.tsv"
        _tsv(p, BOXPLOT_COLUMNS, [(lvl, s.n, s.min, s.whisker_low, s.q1, s.median, s.q3, s.whisker_high,
                                   s.max, ",".join(repr(o) for o in s.outliers) or "-")
                                  for lvl, s in fr.boxplot])
        written.append(p)
    p = out / "summary.txt"
    p.write_text("\n".join(summary_lines) + "\n")
    written.append(p)
    return written
