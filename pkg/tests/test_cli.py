import json
import subprocess
import sys

import pytest

from blochlip import NonConvergenceError, cli
from blochlip.paths import read_polyline_csv

FAST = ["--interior-samples", "256", "--pair-samples", "256", "--refine-rounds", "1"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_report_schema(capsys):
    code, out, err = run(capsys, "bloch", "--map", "identity_disk", *FAST)
    assert code == 0
    rep = json.loads(out)
    assert set(rep) == {"schema_version", "command", "seed", "inputs", "results", "timings", "warnings"}
    assert rep["schema_version"] == "1" and rep["command"] == "bloch" and rep["seed"] == 42
    assert rep["timings"] is None and rep["warnings"] == []
    assert rep["inputs"]["config"]["interior_samples"] == 256
    assert rep["results"]["estimate"]["value"] == pytest.approx(1.0, rel=1e-6)
    assert "Bloch estimate" in err


def test_timings_are_opt_in(capsys):
    _, out, _ = run(capsys, "corpus", "list", "--timings")
    assert json.loads(out)["timings"]["total_ms"] >= 0


def test_corpus_list(capsys):
    code, out, _ = run(capsys, "corpus", "list")
    entries = json.loads(out)["results"]["entries"]
    assert code == 0 and len(entries) == 6
    assert {e["label"] for e in entries} >= {"identity_disk", "log_bloch", "normal_pole"}


def test_distance_with_closed_form_and_export(capsys, tmp_path):
    csv = tmp_path / "path.csv"
    code, out, _ = run(
        capsys, "distance", "--weight", "hyperbolic", "--from", "0,0", "--to=-0.3,0.4", "--export-path", str(csv)
    )
    assert code == 0
    res = json.loads(out)["results"]
    assert res["closed_form"]["relative_difference"] < 1e-6
    poly = read_polyline_csv(csv)
    assert poly.points[0] == pytest.approx([0.0, 0.0])
    assert poly.points[-1] == pytest.approx([-0.3, 0.4])


def test_out_file(capsys, tmp_path):
    target = tmp_path / "rep.json"
    code, out, _ = run(capsys, "corpus", "list", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["command"] == "corpus"


def test_exit_one_on_failed_certificate(capsys):
    code, out, err = run(
        capsys, "certify", "--map", "log_bloch", "--tol", "1e-6", "--waive-admissibility", *FAST
    )
    assert code == 1
    assert json.loads(out)["results"]["certificate"]["pass"] is False
    assert "FAIL" in err


def test_exit_one_on_inadmissible_psi(capsys):
    code, out, _ = run(
        capsys, "admissible-check", "--map", "identity_disk", "--psi", "spherical_normal", "--pairs", "100",
        "--numerical-pairs", "0",
    )
    assert code == 1
    assert not json.loads(out)["results"]["report"]["passed"]


@pytest.mark.parametrize(
    "argv",
    [
        ["bloch", "--map", "no_such_map"],
        ["distance", "--weight", "hyperbolic", "--from", "0,0", "--to", "2,0"],
        ["distance", "--weight", "hyperbolic", "--from", "0,0", "--to", "a,b"],
        ["distance", "--weight", "nonsense", "--from", "0,0", "--to", "0.1,0"],
        ["om-check", "--om", "nev:phi0=0,dphi0=1,atoms=(0.5:-0.5)"],
        ["frobnicate"],
        ["bloch"],
    ],
    ids=["unknown-map", "outside-domain", "bad-point", "bad-weight", "negative-atom", "bad-command", "missing-arg"],
)
def test_exit_two_on_bad_input(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 2
    assert out == ""


def test_exit_three_on_numerical_failure(capsys, monkeypatch):
    def broken(*args, **kwargs):
        raise NonConvergenceError("power iteration stalled")

    monkeypatch.setattr(cli, "bloch_number", broken)
    code, out, err = run(capsys, "bloch", "--map", "identity_disk", *FAST)
    assert code == 3 and out == ""
    assert "numerical failure" in err


def test_om_check_and_monotone(capsys):
    code, out, _ = run(capsys, "om-check", "--om", "artanh", "--pairs", "200", "--monotone-hi", "0.9")
    rep = json.loads(out)["results"]
    assert code == 0 and rep["violations"] == 0 and rep["derivative_increasing"]["increasing"]


def test_lim_check(capsys):
    code, out, _ = run(capsys, "lim-check", "--weight", "hyperbolic", "--at", "0.3,0.2", "--directions", "4")
    assert code == 0
    assert json.loads(out)["results"]["table"]["shrinking"]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "blochlip.cli", "corpus", "list"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "corpus"
