import hashlib
import json

import pytest

from tauberlab import __version__
from tauberlab.cli import resolve_seed, run
from tauberlab.cones import DEFAULT_SEED
from tauberlab.errors import UsageError

from conftest import SCENARIOS

EXPECTED_EXIT = {
    "scenario_delta_mismatch.json": 1,
    "scenario_xplus_mismatch.json": 1,
    "ultrapoly_divergent.json": 1,
    "violator.json": 1,
}


def invoke(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = run([*argv, "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None), out


def command_of(path):
    return json.loads(path.read_text())["command"].split()


@pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.json")), ids=lambda p: p.stem)
def test_scenario_exit_codes(tmp_path, path):
    code, rep, _ = invoke(tmp_path, *command_of(path), str(path))
    assert code == EXPECTED_EXIT.get(path.name, 0)
    assert rep["passed"] == (code == 0)


def test_tauber_run_heaviside(tmp_path):
    code, rep, _ = invoke(tmp_path, "tauber", "run", str(SCENARIOS / "scenario_heaviside.json"))
    assert code == 0 and rep["result"]["g_label"] == "heaviside"


def test_verify_strong_delta_flags(tmp_path):
    code, rep, _ = invoke(tmp_path, "verify", "strong", "--f", "delta", "--M", "gevrey:2", "--N", "gevrey:2")
    assert code == 0 and rep["result"]["constant"] == pytest.approx(1.0, rel=1e-12)


def test_ultrapoly_build_divergent(tmp_path):
    code, rep, _ = invoke(tmp_path, "ultrapoly", "build", "--M", "gevrey:1")
    assert code == 1 and rep["error"]["type"] == "DivergentProductError"


def test_report_embeds_provenance(tmp_path):
    path = SCENARIOS / "scenario_heaviside.json"
    _, rep, _ = invoke(tmp_path, "tauber", "run", str(path))
    assert rep["schema"] == "tauberlab-report/1"
    assert rep["tool"] == {"name": "tauberlab", "version": __version__}
    assert rep["scenario_sha256"] == hashlib.sha256(path.read_bytes()).hexdigest()
    assert rep["seed"] == json.loads(path.read_text())["seed"]


def test_flag_override_changes_hash(tmp_path):
    path = SCENARIOS / "scenario_heaviside.json"
    _, a, _ = invoke(tmp_path, "tauber", "run", str(path), name="a.json")
    _, b, _ = invoke(tmp_path, "tauber", "run", str(path), "--rho", "0", name="b.json")
    assert a["scenario_sha256"] != b["scenario_sha256"]


def test_same_seed_is_byte_identical(tmp_path):
    path = str(SCENARIOS / "lemma53_lorentz3.json")
    _, _, a = invoke(tmp_path, "verify", "lemma53", path, "--jobs", "1", name="a.json")
    _, _, b = invoke(tmp_path, "verify", "lemma53", path, "--jobs", "3", name="b.json")
    assert a.read_bytes() == b.read_bytes()


def test_batch_report_independent_of_jobs(tmp_path):
    paths = [str(p) for p in sorted(SCENARIOS.glob("*.json"))]
    code1, _, a = invoke(tmp_path, "report", *paths, "--jobs", "1", name="a.json")
    code4, rep, b = invoke(tmp_path, "report", *paths, "--jobs", "4", name="b.json")
    assert code1 == code4 == 1
    assert a.read_bytes() == b.read_bytes()
    assert {r["scenario"]: r["passed"] for r in rep["runs"]} == {p.rsplit("/", 1)[-1]: p.rsplit("/", 1)[-1] not in EXPECTED_EXIT for p in paths}


def test_malformed_json_is_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"f": "delta",\n "M": }')
    code = run(["verify", "strong", str(bad)])
    assert code == 2
    assert f"{bad}:2:" in capsys.readouterr().err


def test_unknown_subcommand_is_usage_error():
    assert run(["verify", "everything"]) == 2


def test_scenario_command_mismatch(tmp_path):
    assert run(["verify", "strong", str(SCENARIOS / "scenario_heaviside.json")]) == 2


def test_seed_precedence(monkeypatch):
    monkeypatch.delenv("TAUBERLAB_SEED", raising=False)
    assert resolve_seed(None, {}) == DEFAULT_SEED
    assert resolve_seed(None, {"seed": 5}) == 5
    monkeypatch.setenv("TAUBERLAB_SEED", "9")
    assert resolve_seed(None, {"seed": 5}) == 9
    assert resolve_seed("12", {"seed": 5}) == 12
    with pytest.raises(UsageError):
        resolve_seed("twelve", {})


def test_env_seed_reaches_report(tmp_path, monkeypatch):
    monkeypatch.setenv("TAUBERLAB_SEED", "4242")
    _, rep, _ = invoke(tmp_path, "cone", "info", "--cone", "orthant:2")
    assert rep["seed"] == 4242


def test_csv_side_output(tmp_path):
    csv = tmp_path / "pts.csv"
    code = run(["laplace", "eval", "--f", "heaviside", "--out", str(tmp_path / "r.json"), "--csv", str(csv)])
    assert code == 0 and csv.read_text().count("\n") > 10


def test_set_override(tmp_path):
    code, rep, _ = invoke(tmp_path, "verify", "bound31i", "--f", "heaviside", "--set", "eps=0.25")
    assert code == 0 and rep["inputs"]["eps"] == 0.25


def test_bad_set_syntax():
    assert run(["verify", "bound31i", "--set", "eps"]) == 2
