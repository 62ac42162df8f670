import json
import os
import subprocess
import sys

import pytest

from qtfree.cli import main
from qtfree.report import jsonable, rational
from qtfree.scenarios import demo_corpus, run_scenario
from fractions import Fraction


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_rational_strings():
    assert rational(3) == "3/1" and rational(Fraction(-1, 2)) == "-1/2"
    assert jsonable({"a": (Fraction(1, 3), 2)}) == {"a": ["1/3", 2]}


def test_analyze_path_and_cycle(tmp_path, capsys):
    code, out, _ = run(["analyze", "--input", write(tmp_path, "p3.json", {"n": 3, "edges": [[0, 1], [1, 2]]})],
                       capsys)
    rep = json.loads(out)
    assert code == 0 and rep["data"]["delta_star"] == 0 and rep["summary"]["fail"] == 0
    c5 = {"n": 5, "edges": [[i, (i + 1) % 5] for i in range(5)]}
    code, out, _ = run(["analyze", "-i", write(tmp_path, "c5.json", c5)], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["data"]["delta_star"] == 2 and rep["data"]["four_point_defect"] <= 0
    assert {c["name"] for c in rep["checks"]} == {"pseudo-metric", "quotient-contracts", "four-point",
                                                  "branch-points"}


@pytest.mark.parametrize("content", ["{nope", '{"n": 2, "edges": [[0, 5]]}', '{"n": 3, "edges": [[0, 1]]}', "[]"])
def test_invalid_graph_exit_2(tmp_path, capsys, content):
    code, _, err = run(["analyze", "-i", write(tmp_path, "g.json", content)], capsys)
    assert code == 2 and "error" in err


def test_missing_file_exit_2(tmp_path, capsys):
    assert run(["analyze", "-i", str(tmp_path / "nope.json")], capsys)[0] == 2


def test_free_norm(tmp_path, capsys):
    g = write(tmp_path, "star.json", {"n": 4, "edges": [[0, 1], [0, 2], [0, 3]]})
    v = write(tmp_path, "v.json", {"coeffs": {"1": "1", "2": "1", "3": "-2"}})
    code, out, _ = run(["free-norm", "-i", g, "-v", v], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["data"]["norm"] == "4/1"
    assert rep["checks"][0]["witness"] == {"dual": "4/1", "flow": "4/1"}
    p3 = write(tmp_path, "p3.json", {"n": 3, "edges": [[0, 1], [1, 2]]})
    for x, expected in (("1", "1/1"), ("2", "2/1")):
        v = write(tmp_path, f"d{x}.json", {"coeffs": {x: "1"}})
        assert json.loads(run(["free-norm", "-i", p3, "-v", v], capsys)[1])["data"]["norm"] == expected
    v = write(tmp_path, "o.json", {"coeffs": {"0": "3", "1": "1"}})
    code, out, _ = run(["free-norm", "-i", p3, "-v", v], capsys)
    rep = json.loads(out)
    assert code == 0 and len(rep["warnings"]) == 1 and rep["data"]["norm"] == "1/1"
    v = write(tmp_path, "bad.json", {"coeffs": {"1": 0.5}})
    assert run(["free-norm", "-i", p3, "-v", v], capsys)[0] == 2


def test_verify_action_examples(capsys):
    code, out, _ = run(["verify-action", "lemma72", "--group", "product(cyclic:2,cyclic:3)", "--maxlen", "8",
                        "--p", "1"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["summary"]["fail"] == 0
    assert any(c["name"] == "norm-identity" and c["status"] == "pass" for c in rep["checks"])
    code, out, _ = run(["verify-action", "lemma61", "--group", "free:2", "--radius", "5"], capsys)
    rep = json.loads(out)
    assert code == 0
    for row in rep["data"]["orbit_norms"]:
        assert row["norm"] == f"{row['length']}/1"


def test_unknown_scenario_and_bad_args(capsys):
    assert run(["verify-action", "lemma99"], capsys)[0] == 2
    assert run(["verify-action", "lemma61", "--radius", "0"], capsys)[0] == 2
    assert run(["verify-action", "lemma61", "--group", "free:"], capsys)[0] == 2
    assert run(["verify-action", "lemma24", "--group", "free:2"], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2
    assert run(["verify-action", "lemma61", "--cap", "5"], capsys)[0] == 2


def test_aliases_match():
    assert run_scenario("free-product", maxlen=4).to_json().replace("free-product", "") == \
        run_scenario("lemma72", maxlen=4).to_json().replace("free-product", "")


def test_output_file_and_timing(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, stdout, _ = run(["verify-action", "cor13", "--radius", "4", "-o", str(out), "--timing"], capsys)
    assert code == 0 and stdout == ""
    rep = json.loads(out.read_text())
    assert "timing" in rep and rep["summary"]["fail"] == 0


def test_demo_writes_corpus(tmp_path, capsys):
    code, out, _ = run(["demo", "--outdir", str(tmp_path / "corpus")], capsys)
    assert code == 0
    rep = json.loads(out)
    files = sorted(str(p.relative_to(tmp_path / "corpus")) for p in (tmp_path / "corpus").rglob("*.json"))
    assert files == rep["data"]["files"] == sorted(demo_corpus(0))
    assert any(f.startswith("bass_serre/") for f in files) and any(f.startswith("cayley/") for f in files)


def test_byte_identical_across_processes(tmp_path):
    outs = []
    for hashseed in ("1", "2"):
        target = tmp_path / f"r{hashseed}.json"
        env = dict(os.environ, PYTHONHASHSEED=hashseed)
        subprocess.run([sys.executable, "-m", "qtfree", "verify-action", "theorem12", "--seed", "7",
                        "-o", str(target)], check=True, env=env)
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
