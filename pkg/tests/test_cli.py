import json
import subprocess
import sys

import pytest

from oddlattice.bmw import BmwPresentation
from oddlattice.cli import run


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, _ = invoke(capsys, *argv)
    return code, json.loads(out)


def test_unknown_flag_is_usage_error(capsys):
    code, _, err = invoke(capsys, "scaffold", "--n", "5", "--bogus")
    assert code == 2 and "unrecognized" in err


def test_non_positive_parameter_is_usage_error(capsys):
    assert invoke(capsys, "odd", "--d", "0")[0] == 2


def test_scaffold_verify(capsys):
    code, rep = report(capsys, "scaffold", "--n", "5", "--verify")
    assert code == 0 and rep["ok"]
    assert rep["schema"] == 1 and rep["conditions"] == ["E1", "E2", "E3", "E4"]
    assert rep["result"]["scaffolding"]["d"] == 9
    assert rep["result"]["verification"]["E3"]["order"] == "177843714048000"


def test_scaffold_failure_exits_one_with_witness(capsys):
    code, rep = report(capsys, "scaffold", "--n", "5", "--d", "6", "--verify")
    assert code == 1 and not rep["ok"]
    assert rep["result"]["verification"]["E4"]["witness"]


def test_report_is_deterministic(capsys):
    a = invoke(capsys, "scaffold", "--n", "7", "--verify")[1]
    b = invoke(capsys, "scaffold", "--n", "7", "--verify")[1]
    assert a == b
    c = invoke(capsys, "bmw", "search", "--m", "5", "--n", "5", "--alt-x", "--alt-a", "--seed", "3", "--limit", "1")[1]
    d = invoke(capsys, "bmw", "search", "--m", "5", "--n", "5", "--alt-x", "--alt-a", "--seed", "3", "--limit", "1")[1]
    assert c == d


def test_odd_report(capsys):
    code, rep = report(capsys, "odd", "--d", "3", "--automorphisms", "--fixators", "--superstar")
    assert code == 0
    r = rep["result"]
    assert r["vertices"] == 10 and r["girth"] == 5
    assert r["aut_order_bruteforce"] == "120"
    assert r["fixators"] == {"vertex": "12", "edge": "4", "star": "2", "edge-star": "1"}


def test_odd_exports(capsys):
    code, out, _ = invoke(capsys, "odd", "--d", "3", "--format", "dot")
    assert code == 0 and out.count("--") == 15
    code, rep = report(capsys, "odd", "--d", "3", "--format", "graph-json")
    assert len(rep["result"]["edges"]) == 15


def test_odd_automorphism_cap(capsys):
    assert invoke(capsys, "odd", "--d", "5", "--automorphisms")[0] == 2


def test_ball(capsys):
    code, rep = report(capsys, "ball", "--d", "3", "--radius", "3", "--metric", "linf")
    assert code == 0
    assert rep["result"]["king_bfs_sphere_sizes"] == [1, 25, 390, 5940]


def test_ball_budget(capsys):
    code, _, err = invoke(capsys, "ball", "--d", "4", "--radius", "4", "--budget", "1000")
    assert code == 2 and "exceed" in err


def test_universal_large_needs_flag(capsys):
    code, _, err = invoke(capsys, "universal", "--d", "6")
    assert code == 2 and "--large" in err


def test_claims(capsys):
    code, rep = report(capsys, "claims", "--d", "3", "--radius", "2")
    assert code == 0 and rep["ok"]
    assert rep["result"]["spheres"]["1"]["structure"]["free"] == 15


def test_claims_inapplicable(capsys):
    # O_2 is a triangle: girth below 5
    assert invoke(capsys, "claims", "--d", "2", "--radius", "1")[0] == 2


def test_bmw_validate(capsys, tmp_path):
    good = BmwPresentation.direct_product(2, 2).to_json()
    path = tmp_path / "bmw.json"
    path.write_text(json.dumps([good]))
    code, rep = report(capsys, "bmw", "validate", "--input", str(path))
    assert code == 0 and rep["result"]["reports"][0]["valid"]
    bad = {"m": 2, "n": 2, "squares": [[1, 1, 1, 1]]}
    path.write_text(json.dumps(bad))
    code, rep = report(capsys, "bmw", "validate", "--input", str(path))
    assert code == 1 and rep["result"]["reports"][0]["errors"]


def test_bmw_validate_needs_input(capsys):
    assert invoke(capsys, "bmw", "validate")[0] == 2


def test_bmw_large_search_needs_seed(capsys):
    assert invoke(capsys, "bmw", "search", "--m", "5", "--n", "5")[0] == 2


def test_lattice_develop(capsys):
    code, rep = report(capsys, "lattice", "develop", "--pair", "hand", "--radius", "2")
    assert code == 0
    assert rep["result"]["counts"] == rep["result"]["oracle"]


def test_lattice_build_and_embed(capsys):
    code, rep = report(capsys, "lattice", "build")
    assert code == 0 and rep["config"]["seed"] == 1
    assert rep["result"]["presentation"]["squares"] == 22 * 24310
    code, rep = report(capsys, "lattice", "embed")
    assert code == 0 and rep["result"]["ok"]


def test_output_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, stdout, _ = invoke(capsys, "-o", str(out), "scaffold", "--n", "2")
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["result"]["scaffolding"]["n"] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "oddlattice.cli", "scaffold", "--n", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["scaffolding"]["n"] == 3


@pytest.mark.slow
def test_pipeline(capsys):
    code, rep = report(capsys, "pipeline", "--limit", "1")
    assert code == 0 and rep["ok"]
    assert rep["result"]["constructed"] == [[22, 9]]
