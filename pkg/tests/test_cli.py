import json
import subprocess
import sys

import pytest

from weakcontact.cli import main
from weakcontact.errors import DegenerateStructure, InvalidConfig, UnknownManifold
from weakcontact.manifold import SamplePlan
from weakcontact.runner import RunConfig, SolitonSpec, load_config, run_suite


def residuals(report_dict):
    return [(c["check_name"], c["max_residual"], c["mean_residual"]) for c in report_dict["checks"]]


# -- runner ----------------------------------------------------------------

def test_config_validation():
    with pytest.raises(InvalidConfig):
        RunConfig(suites=()).validate()
    with pytest.raises(InvalidConfig):
        RunConfig(tolerance=0.0).validate()
    with pytest.raises(InvalidConfig):
        RunConfig(suites=("axioms", "bogus")).validate()
    with pytest.raises(InvalidConfig):
        RunConfig(jet_order=4).validate()
    with pytest.raises(InvalidConfig):
        load_config({"manifold": "ellipsoid", "colour": "red"})


def test_load_config_fields():
    cfg = load_config({
        "manifold": "ellipsoid", "params": {"a": 5}, "suites": ["axioms", "oracle"],
        "sampling": {"count": 7, "seed": 2}, "tolerance": 1e-6,
        "soliton": {"c1": 1, "c2": 0, "lambda": -1, "potential": "sin(rho)"},
    })
    assert cfg.params == {"a": 5} and cfg.suites == ("axioms", "oracle")
    assert cfg.sampling == SamplePlan(count=7, seed=2)
    assert cfg.soliton == SolitonSpec(1, 0, -1, "sin(rho)")
    assert load_config({"suites": "all"}).suites[0] == "axioms"


def test_unknown_and_degenerate():
    with pytest.raises(UnknownManifold):
        run_suite(RunConfig(manifold="moebius", suites=("axioms",)))
    with pytest.raises(DegenerateStructure) as info:
        run_suite(RunConfig(manifold="flat_torus", suites=("axioms",), sampling=SamplePlan(count=5)))
    assert info.value.reason == "DegenerateQ"


def test_low_jet_order_skips_suites():
    rep = run_suite(RunConfig(manifold="round_sphere", suites=("axioms", "einstein"), jet_order=2,
                              sampling=SamplePlan(count=5)))
    assert rep["einstein"].status == "skipped"
    assert rep["axioms.compatibility"].passed
    assert rep.meta["jet_order"] == 2


def test_soliton_suite_via_runner():
    cfg = RunConfig(manifold="round_sphere", suites=("soliton", "lemmas"), sampling=SamplePlan(count=8),
                    soliton=SolitonSpec(c1=1.0, c2=1.0, lam=-2.0, potential="1.5"))
    rep = run_suite(cfg)
    assert rep.all_passed
    assert rep["soliton.residual"].passed and rep["lemmas.L53"].passed
    assert rep["theorem51.grad_f_vanishes"].passed and rep["theorem51.einstein"].passed
    two = run_suite(RunConfig(manifold="round_sphere", suites=("soliton",), sampling=SamplePlan(count=4),
                              soliton=SolitonSpec(0.0, 1.0, -2.0, "1.5", "1.5")))
    assert two["soliton.residual"].passed and two["theorem51.einstein"].status == "skipped"


# -- CLI -------------------------------------------------------------------

def test_cli_exit_codes(capsys, tmp_path):
    assert main(["verify", "--manifold", "round_sphere", "--suite", "kcontact_identities", "--samples", "20"]) == 0
    assert main(["verify", "--manifold", "flat_torus", "--suite", "axioms"]) == 3
    assert "DegenerateQ" in capsys.readouterr().err
    assert main(["classify", "--manifold", "ellipsoid", "--param", "a=2"]) == 0
    assert capsys.readouterr().out.strip() == "weak K-contact (classical: no)"
    assert main(["classify", "--manifold", "nowhere"]) == 2
    assert main(["verify", "--manifold", "ellipsoid", "--suite", "bogus"]) == 2
    assert main(["verify", "--manifold", "ellipsoid", "--tol", "-1"]) == 2
    assert main(["verify"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["verify", "--manifold", "ellipsoid", "--config", str(tmp_path / "missing.json")]) == 2
    assert main(["soliton", "--manifold", "round_sphere", "--potential", "exp(rho)"]) == 2


def test_cli_failure_exit_code(capsys):
    # a non-constant potential does not solve the equation: one failing check
    code = main(["soliton", "--manifold", "round_sphere", "--c1", "1", "--c2", "1", "--lambda", "-2",
                 "--potential", "sin(rho)", "--samples", "5"])
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_cli_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ("ellipsoid", "round_sphere", "flat_torus"):
        assert name in out


def test_cli_json_output_and_config(tmp_path, monkeypatch):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"manifold": "ellipsoid", "params": {"a": 5},
                               "suites": ["axioms"], "sampling": {"count": 6, "seed": 4}}))
    out = tmp_path / "r.json"
    assert main(["verify", "--config", str(cfg), "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["meta"]["params"]["a"] == 5.0 and data["meta"]["seed"] == 4 and data["meta"]["count"] == 6
    # flags override file values
    assert main(["verify", "--config", str(cfg), "--seed", "9", "--samples", "3", "--format", "json",
                 "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["meta"]["seed"] == 9 and data["meta"]["count"] == 3


def test_seed_environment_fallback(tmp_path, monkeypatch):
    out = tmp_path / "r.json"
    monkeypatch.setenv("WEAKCONTACT_SEED", "11")
    args = ["verify", "--manifold", "round_sphere", "--suite", "axioms", "--samples", "3", "--format", "json", "--out", str(out)]
    assert main(args) == 0
    assert json.loads(out.read_text())["meta"]["seed"] == 11
    assert main(args + ["--seed", "2"]) == 0
    assert json.loads(out.read_text())["meta"]["seed"] == 2
    monkeypatch.setenv("WEAKCONTACT_SEED", "eleven")
    assert main(args) == 2


def test_cli_determinism(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["verify", "--manifold", "ellipsoid", "--suite", "axioms,kcontact_identities",
                     "--samples", "10", "--seed", "5", "--format", "json", "--out", str(p)]) == 0
    a, b = (json.loads(p.read_text()) for p in paths)
    assert residuals(a) == residuals(b)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "weakcontact", "list"], capture_output=True, text=True)
    assert proc.returncode == 0 and "ellipsoid" in proc.stdout
