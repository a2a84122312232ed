import csv

import numpy as np
import pytest

from quenchlab import harness
from quenchlab.cli import main
from quenchlab.sq_core import RunResult

TINY_JSON = '{"cs": ["C", "M"], "nc": [3, 5], "ni": [2], "ps": [1, 2], "it": [10], "reps": 2, "base_seed": 4}'


@pytest.fixture
def design_file(tmp_path):
    f = tmp_path / "tiny.json"
    f.write_text(TINY_JSON)
    return f


def rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_run_and_analyze(tmp_path, design_file, capsys):
    out = tmp_path / "r.csv"
    assert main(["run", "--problem", "ackley", "--design", str(design_file), "--seed", "9",
                 "--out", str(out)]) == 0
    recs = rows(out)
    assert len(recs) == 8 * 2
    assert recs[0]["seed"] == str(harness.derive_seed(9, "ackley", 0, 0))
    assert main(["analyze", "--in", str(out), "--alpha", "0.05", "--out", str(tmp_path / "rep")]) == 0
    names = {p.name for p in (tmp_path / "rep").iterdir()}
    for fac in ("CS", "NC", "PS"):
        assert {f"anova_{fac}.tsv", f"means_{fac}.tsv", f"tukey_{fac}.tsv", f"boxplot_{fac}.tsv"} <= names
    # NI and IT have a single level in this design
    assert "anova_NI.tsv" not in names
    assert "NI: skipped" in capsys.readouterr().err


def test_reps_override(tmp_path, design_file):
    out = tmp_path / "r.csv"
    assert main(["run", "--problem", "rana", "--design", str(design_file), "--reps", "1", "--out", str(out)]) == 0
    assert len(rows(out)) == 8


def test_full_design_row_count(tmp_path, monkeypatch):
    # row bookkeeping only: stub the engine so the full grid is instant
    def fake_run(objective, params, seed):
        return RunResult(float(seed % 97), np.zeros(1), params.ps + params.nc * params.ni * params.ps)

    monkeypatch.setattr(harness, "run", fake_run)
    out = tmp_path / "r.csv"
    assert main(["run", "--problem", "ackley", "--design", "full", "--reps", "2", "--seed", "7",
                 "--out", str(out)]) == 0
    assert len(rows(out)) == 2250


def test_likelihood_with_path(tmp_path):
    path = tmp_path / "path.csv"
    assert main(["simulate-path", "--seed", "3", "--out", str(path)]) == 0
    d = tmp_path / "d.json"
    d.write_text('{"cs": ["E"], "nc": [50], "ni": [4], "ps": [2], "it": [10, 100], "reps": 2}')
    out = tmp_path / "r.csv"
    assert main(["run", "--problem", "likelihood", "--design", str(d), "--path", str(path), "--out", str(out)]) == 0
    assert all(float(r["fitness"]) > 0 for r in rows(out))
    assert main(["analyze", "--in", str(out), "--out", str(tmp_path / "rep")]) == 0
    assert "\tmaximize\t" in (tmp_path / "rep" / "anova_IT.tsv").read_text()


def test_unknown_problem_exit_1(tmp_path, capsys):
    assert main(["run", "--problem", "sphere", "--design", "reduced", "--out", str(tmp_path / "r.csv")]) == 1
    assert "unknown problem" in capsys.readouterr().err


def test_bad_design_exit_1(tmp_path):
    assert main(["run", "--problem", "ackley", "--design", "nope", "--out", str(tmp_path / "r.csv")]) == 1


def test_path_for_benchmark_exit_1(tmp_path, design_file):
    assert main(["run", "--problem", "ackley", "--design", str(design_file), "--path", "p.csv",
                 "--out", str(tmp_path / "r.csv")]) == 1


def test_missing_input_exit_2(tmp_path):
    assert main(["analyze", "--in", str(tmp_path / "none.csv"), "--out", str(tmp_path)]) == 2


def test_malformed_csv_exit_2(tmp_path, capsys):
    f = tmp_path / "bad.csv"
    f.write_text("problem,cs\nackley,C\n")
    assert main(["analyze", "--in", str(f), "--out", str(tmp_path / "rep")]) == 2
    assert "line 1" in capsys.readouterr().err


def test_unwritable_output_exit_2(tmp_path, design_file):
    assert main(["run", "--problem", "ackley", "--design", str(design_file), "--reps", "1",
                 "--out", str(tmp_path / "missing" / "r.csv")]) == 2


def test_bad_alpha_exit_1(tmp_path):
    assert main(["analyze", "--in", "x.csv", "--alpha", "1.5", "--out", str(tmp_path)]) == 1
