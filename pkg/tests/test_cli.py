import json
import subprocess
import sys
from pathlib import Path

import pytest

from novistoke.cli import main
from novistoke.scenario import canonical_scenario, dumps, run_scenario_text

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = sorted((ROOT / "scenarios").glob("*.json"))
GOLDEN = Path(__file__).parent / "golden"
EXIT = {"stokes_diagrams": 1, "unresolved_reference": 2}


def run(tmp_path, *argv):
    out = tmp_path / "out.txt"
    code = main([*argv, "--out", str(out)])
    return code, out.read_text()


@pytest.mark.parametrize("path", SCENARIOS, ids=lambda p: p.stem)
def test_scenario_matches_golden(tmp_path, path):
    code, text = run(tmp_path, "run", "--scenario", str(path))
    assert code == EXIT.get(path.stem, 0)
    assert text == (GOLDEN / f"{path.stem}.json").read_text()
    code, text = run(tmp_path, "run", "--scenario", str(path), "--format", "text")
    assert text == (GOLDEN / f"{path.stem}.txt").read_text()


def test_ray_counterexample_values():
    report, code = run_scenario_text((ROOT / "scenarios" / "ray_counterexample.json").read_text())
    dims = {r["id"]: r["result"] for r in report["results"]}
    assert code == 0
    assert dims["full-ray"]["dimension"] == 0
    assert dims["full-ray-reversed"]["dimension"] == 1
    assert dims["truncated-1/10"]["dimension"] == 1
    assert dims["truncated-1/1000"]["dimension"] == 1
    assert dims["difference"]["verdict"] == "POS_DIVERGENT"


def test_empty_scenario():
    report, code = run_scenario_text("{}")
    assert code == 0 and report["results"] == []


def test_parse_error_reports_position(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "commands": [\n    {"op": "hom",}\n  ]\n}\n')
    code, text = run(tmp_path, "run", "--scenario", str(bad))
    err = json.loads(text)["error"]
    assert code == 2 and err["code"] == "PARSE_ERROR"
    assert "line 3" in err["message"]


def test_unknown_op_and_float_rejected():
    _, code = run_scenario_text('{"commands": [{"op": "frobnicate"}]}')
    assert code == 2
    report, code = run_scenario_text('{"commands": [{"op": "dominance", "args": {"factor": {"terms": [{"order": 0.5}]}, "arc": {"ray": 0}}}]}')
    assert code == 2 and report["results"][0]["error"]["code"] == "PARSE_ERROR"


def test_one_failure_does_not_abort_others():
    text = (ROOT / "scenarios" / "unresolved_reference.json").read_text()
    report, code = run_scenario_text(text)
    assert code == 2
    assert [r["status"] for r in report["results"]] == ["error", "ok"]


@pytest.mark.parametrize("path", SCENARIOS, ids=lambda p: p.stem)
def test_canonical_form_is_a_fixed_point(path):
    text = path.read_text()
    if path.stem == "unresolved_reference":
        return
    once = canonical_scenario(text)
    twice = canonical_scenario(dumps(once))
    assert twice == once
    a, _ = run_scenario_text(text)
    b, _ = run_scenario_text(dumps(once))
    assert [r.get("result") for r in a["results"]] == [r.get("result") for r in b["results"]]


def test_subcommands(tmp_path):
    inv_z = '{"terms":[{"order":1}]}'
    inv_z2 = '{"terms":[{"order":2}]}'
    code, text = run(tmp_path, "hom", inv_z2, inv_z, "--arc", '{"ray":0}')
    assert code == 0 and json.loads(text)["results"][0]["result"]["dimension"] == 0
    code, text = run(tmp_path, "hom", inv_z2, inv_z, "--arc", '{"ray":0}', "--inner-radius", "[1,10]")
    assert json.loads(text)["results"][0]["result"]["dimension"] == 1
    code, text = run(tmp_path, "stokes", inv_z, "{}")
    assert code == 0
    code, text = run(tmp_path, "stokes", inv_z, inv_z, "--format", "text")
    assert code == 0 and "no Stokes directions" in text
    code, text = run(tmp_path, "oracle", "--count", "30", "--seed", "7")
    assert code == 0 and json.loads(text)["oracle_sweep"]["disagreements"] == []
    code, text = run(tmp_path, "oracle", inv_z, '{"start":[1,4],"end":[3,4]}')
    assert code == 0
    decl = str(ROOT / "scenarios" / "complexes.json")
    code, text = run(tmp_path, "perverse", "shriek_unit", "--scenario", decl)
    assert code == 0 and json.loads(text)["results"][0]["result"]["label"] == "YES"
    code, text = run(tmp_path, "perverse", "shriek_unit_unshifted", "--scenario", decl)
    assert json.loads(text)["results"][0]["result"]["label"] == "NO(0)"
    code, text = run(tmp_path, "perverse", "nonexistent", "--scenario", decl)
    assert code == 2 and "REFERENCE_ERROR" in text
    code, text = run(tmp_path, "dual", "point", "--scenario", decl)
    assert code == 0
    code, text = run(tmp_path, "tensor", '{"intervals":[{"birth":1,"length":null}]}', '{"intervals":[{"birth":2,"length":1}]}')
    assert code == 0 and json.loads(text)["results"][0]["status"] == "ok"


def test_precision_flag(tmp_path):
    # a Stokes direction of (1+3i)/z sits about 1e-5 turns from the arc end
    sc = tmp_path / "close.json"
    sc.write_text(json.dumps({"commands": [{"op": "dominance", "args": {
        "factor": {"terms": [{"order": 1, "coeff": {"re": 1, "im": 3}}]},
        "arc": {"start": 0, "end": [4488, 10000]}}}]}))
    code, text = run(tmp_path, "run", "--scenario", str(sc), "--max-precision-bits", "8")
    assert code == 1 and "UNDECIDABLE_SIGN" in text
    code, text = run(tmp_path, "run", "--scenario", str(sc))
    assert code == 0 and "POS_DIVERGENT" in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "novistoke", "run", "--scenario", str(ROOT / "scenarios" / "empty.json")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"] == []
