import json
import math

import pytest

from ksvi.cli import main
from ksvi.reck import matrix_to_json, ux_reference

SX_PLUS = "0.5,0.7071067811865476,0.5"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_verify_ks_table(capsys):
    code, out, _ = run(capsys, "verify-ks-table")
    assert code == 0
    assert out.splitlines()[-1] == "contradiction located in C24"
    code, doc = run_json(capsys, "verify-ks-table")
    assert doc["summary"] == "contradiction located in C24" and doc["passed"] and doc["exit_code"] == 0


def test_table1_exports(capsys, tmp_path):
    dot, js = tmp_path / "t.dot", tmp_path / "t.json"
    code, out, _ = run(capsys, "table1", "--export-dot", str(dot), "--export-json", str(js))
    assert code == 0 and "24 contexts" in out
    assert dot.read_text().startswith("digraph greechie")
    assert json.loads(js.read_text())["dimension"] == 3
    assert not list(tmp_path.glob(".*tmp"))
    code, out, _ = run(capsys, "validate", str(js))
    assert code == 0 and out.startswith("valid")


def test_validate_failure_and_io(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "observables": [{"id": "a", "ray": {"exact": [1, 0, 0]}}, {"id": "b", "ray": {"exact": [1, 1, 0]}},
                        {"id": "c", "ray": {"exact": [0, 0, 1]}}],
        "contexts": [{"id": "C", "members": ["a", "b", "c"]}],
    }))
    code, doc = run_json(capsys, "validate", str(bad))
    assert code == 1 and doc["violations"][0]["kind"] == "orthogonality"
    code, _, err = run(capsys, "validate", str(tmp_path / "missing.json"))
    assert code == 2 and "error" in err
    (tmp_path / "broken.json").write_text("{")
    assert run(capsys, "validate", str(tmp_path / "broken.json"))[0] == 2


@pytest.fixture
def table_file(tmp_path, capsys):
    path = tmp_path / "t1.json"
    main(["table1", "--export-json", str(path)])
    capsys.readouterr()
    return str(path)


def test_propagate(capsys, table_file):
    code, doc = run_json(capsys, "propagate", table_file, "--seed", "(1,0,0)@C1=1", "--seed", "(3,2,1)@C2=1")
    assert code == 1 and doc["trace"]["conflict_context"] == "C24"
    code, doc = run_json(capsys, "propagate", table_file, "--seed", "(1,0,0)@C1=1", "--seed", "(3,2,1)@C2=1",
                         "--contextual")
    assert code == 0 and doc["trace"]["status"] == "Fixpoint"
    code, _, _ = run(capsys, "propagate", table_file, "--seed", "bogus")
    assert code == 2


def test_search(capsys, table_file):
    code, doc = run_json(capsys, "search", table_file)
    assert code == 0 and len(doc["assignment"]["entries"]) == 72
    code, doc = run_json(capsys, "search", table_file, "--count", "--cap", "1000")
    assert code == 0 and doc["count"] == 99 and not doc["saturated"]
    code, doc = run_json(capsys, "search", table_file, "--contextual", "--count", "--cap", "50")
    assert doc["count"] == 50 and doc["saturated"]


def test_certify(capsys, tmp_path):
    inst, trace = tmp_path / "i.json", tmp_path / "c.json"
    code, out, _ = run(capsys, "certify", "--psi", "0,1,0", "--phi", SX_PLUS,
                       "--emit-instance", str(inst), "--emit-trace", str(trace))
    assert code == 0 and "ValueIndefinite" in out
    assert json.loads(trace.read_text())["outcome"] == "ValueIndefinite"
    assert len(json.loads(inst.read_text())["contexts"]) > 48
    code, doc = run_json(capsys, "certify", "--psi", "0,1,0", "--phi", "1,0,0")
    assert code == 1 and doc["outcome"] == "WindowViolated"


def test_reduce(capsys):
    code, doc = run_json(capsys, "reduce", "--a", "exact:1,0,0", "--b", "0.7,0.714142842854285,0")
    assert code == 0 and doc["x"] == pytest.approx(3 / math.sqrt(14))
    code, _ = run_json(capsys, "reduce", "--a", "1,0,0", "--b", "1,0,0")
    assert code == 1
    assert run(capsys, "reduce", "--a", "1,0", "--b", "1,0,0")[0] == 2


def test_qrng(capsys, tmp_path):
    out, rep = tmp_path / "bits.txt", tmp_path / "r.json"
    code, text, _ = run(capsys, "qrng", "--theta", "0.1", "--phi", "0", "--n", "500", "--seed", "42",
                        "--out", str(out), "--report", str(rep))
    assert code == 0 and "OUTSIDE certification window" in text
    bits = out.read_text()
    assert bits.endswith("\n") and len(bits) == 501 and set(bits[:-1]) <= {"0", "1"}
    doc = json.loads(rep.read_text())
    assert not doc["window"] and doc["counts"]["+1"] + doc["counts"]["-1"] == 500
    code, doc = run_json(capsys, "qrng", "--theta", str(math.pi / 2), "--n", "20000", "--seed", "1",
                         "--out", str(out), "--normality", "3", "--debias")
    assert code == 0 and doc["window"] and doc["normality"]["passed"] and doc["debiased"]
    code, _, _ = run(capsys, "qrng", "--theta", "1.5", "--n", "10", "--seed", "1", "--out", str(out),
                     "--normality", "4")
    assert code == 2


def test_decompose(capsys, tmp_path):
    code, out, _ = run(capsys, "decompose", "--check-ux")
    assert code == 0 and "U_x check: pass" in out and "(1,3)" in out
    m = tmp_path / "m.json"
    m.write_text(json.dumps(matrix_to_json(ux_reference())))
    code, doc = run_json(capsys, "decompose", "--matrix", str(m))
    assert code == 0 and doc["reconstruction_error"] < 1e-12
    m.write_text(json.dumps({"n": 2, "entries": [[[1, 0], [1, 0]], [[0, 0], [1, 0]]]}))
    code, doc = run_json(capsys, "decompose", "--matrix", str(m))
    assert code == 1 and doc["max_deviation"] > 0.5
    assert run(capsys, "decompose")[0] == 2


@pytest.mark.parametrize("argv", [[], ["bogus"], ["qrng", "--theta", "1"], ["verify-ks-table", "--nope"]])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "usage" in err
