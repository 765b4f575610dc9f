import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import dexpfam.mle
from dexpfam.cli import run
from dexpfam.errors import SolverDivergence

DATA = Path(__file__).parent / "data"
GOLDENS = Path(__file__).parent / "goldens"

SPACE = str(DATA / "two_state_space.json")
BASIS = str(DATA / "two_state_basis.json")
SAMPLE = str(DATA / "sample_001.json")


def run_to_file(tmp_path, args, name="out"):
    out = tmp_path / name
    code = run(args + ["--out", str(out)])
    return code, out.read_text()


@pytest.mark.parametrize(
    "args,golden",
    [
        (["fit", "--space", SPACE, "--basis", BASIS, "--sample", SAMPLE],
         "fit_two_state.json"),
        (["closure", "--space", SPACE, "--basis", BASIS,
          "--sample", str(DATA / "sample_1.json")],
         "closure_singleton.json"),
        (["check-uniqueness", "--space", SPACE, "--basis", BASIS,
          "--sample", SAMPLE],
         "uniqueness_full_support.json"),
        (["formulas", "rademacher-prob", "--k", "10", "--n", "6"],
         "formulas_rademacher.json"),
        (["formulas", "eisenberg", "--k", "4"], "formulas_eisenberg.json"),
        (["formulas", "walsh-dim", "--k", "4", "--q", "2"],
         "formulas_walsh_dim.json"),
        (["formulas", "graph-prob", "--nodes", "3", "--n", "3"],
         "formulas_graph.json"),
        (["family", "rademacher", "--k", "1"], "family_rademacher_k1.json"),
        (["family", "graph", "--nodes", "3"], "family_graph_n3.json"),
        (["simulate", "--family", "rademacher", "--k", "6", "--estimator",
          "existence", "--n", "5", "--replicates", "2000", "--seed", "42"],
         "simulate_rademacher.csv"),
        (["simulate", "--family", "full", "--states", "8", "--multipliers",
          "0.4,1.2", "--replicates", "400", "--seed", "7"],
         "sweep_full.csv"),
    ],
)
def test_golden_outputs(tmp_path, args, golden):
    code, text = run_to_file(tmp_path, args)
    assert code == 0
    assert text == (GOLDENS / golden).read_text()


def test_fit_values_match_example(tmp_path):
    code, text = run_to_file(tmp_path, ["fit", "--space", SPACE, "--basis", BASIS, "--sample", SAMPLE])
    assert code == 0
    doc = json.loads(text)
    assert doc["kind"] == "exists"
    np.testing.assert_allclose(doc["density"], [2 / 3, 1 / 3], atol=1e-8)
    np.testing.assert_allclose(
        doc["log_likelihood_sup"], np.log(4 / 27), atol=1e-8
    )


def test_formula_value():
    # stdout path
    code = run(["formulas", "rademacher-prob", "--k", "10", "--n", "6"])
    assert code == 0


def test_sample_as_label_lines(tmp_path):
    args = ["fit", "--space", SPACE, "--basis", BASIS,
            "--sample", str(DATA / "sample_001_labels.txt")]
    code, text = run_to_file(tmp_path, args)
    assert code == 0
    json_code, json_text = run_to_file(
        tmp_path, ["fit", "--space", SPACE, "--basis", BASIS, "--sample", SAMPLE],
        name="json_out",
    )
    assert text == json_text


def test_family_roundtrips_into_fit(tmp_path):
    space_path = tmp_path / "space.json"
    basis_path = tmp_path / "basis.json"
    code = run(["family", "rademacher", "--k", "2",
                "--out-space", str(space_path), "--out-basis", str(basis_path)])
    assert code == 0
    sample_path = tmp_path / "sample.json"
    sample_path.write_text("[0, 1, 2, 3]")
    code, text = run_to_file(
        tmp_path,
        ["fit", "--space", str(space_path), "--basis", str(basis_path),
         "--sample", str(sample_path)],
    )
    assert code == 0
    doc = json.loads(text)
    np.testing.assert_allclose(doc["density"], [1.0] * 4, atol=1e-8)


def test_validation_failures_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["fit", "--space", str(bad), "--basis", BASIS, "--sample", SAMPLE]) == 2
    missing = str(tmp_path / "does_not_exist.json")
    assert run(["fit", "--space", missing, "--basis", BASIS, "--sample", SAMPLE]) == 2
    # dimension clash between basis and space
    short_basis = tmp_path / "short.json"
    short_basis.write_text('{"rows": [[1.0]]}')
    assert run(["fit", "--space", SPACE, "--basis", str(short_basis), "--sample", SAMPLE]) == 2
    # missing required family option
    assert run(["family", "rademacher"]) == 2
    assert run(["formulas", "rademacher-prob", "--k", "3"]) == 2


def test_unknown_flag_exits_2():
    proc = subprocess.run(
        [sys.executable, "-m", "dexpfam.cli", "fit", "--bogus"],
        capture_output=True,
    )
    assert proc.returncode == 2


def test_solver_failure_exits_3(monkeypatch):
    def explode(*args, **kwargs):
        raise SolverDivergence("synthetic failure")

    monkeypatch.setattr(dexpfam.mle, "fit", explode)
    assert run(["fit", "--space", SPACE, "--basis", BASIS, "--sample", SAMPLE]) == 3


def test_verbose_goes_to_stderr_only(tmp_path, capsys):
    out = tmp_path / "out.json"
    code = run(["--verbose", "fit", "--space", SPACE, "--basis", BASIS,
                "--sample", SAMPLE, "--out", str(out)])
    assert code == 0
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "fitting" in captured.err


def test_byte_identical_reruns(tmp_path):
    args = ["simulate", "--family", "graph", "--nodes", "4", "--estimator",
            "existence", "--n", "5", "--replicates", "500", "--seed", "3"]
    _, first = run_to_file(tmp_path, args, name="a.csv")
    _, second = run_to_file(tmp_path, args, name="b.csv")
    assert first == second
