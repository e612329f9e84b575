import json

import numpy as np
import pytest

from ghzw_calculus import cfa
from ghzw_calculus.cli import main
from ghzw_calculus.slocc import state_to_json
from ghzw_calculus.tensor import effect


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, "--json", *argv)
    return code, json.loads(out)


@pytest.fixture
def lolli_file(tmp_path):
    p = tmp_path / "lolli.dsl"
    p.write_text("; one loop\n(seq (comult w) (mult w))\n")
    return str(p)


def test_eval_human_and_json(capsys, tmp_path):
    p = tmp_path / "d.dsl"
    p.write_text("(seq (unit ghz) (comult ghz))")
    code, out, _ = run(capsys, "eval", str(p))
    assert code == 0 and out.strip()
    code, rep = run_json(capsys, "eval", str(p))
    assert rep["verb"] == "eval" and rep["schema"] == 1 and rep["exit"] == 0


def test_json_flag_after_verb(capsys):
    code, out, _ = run(capsys, "check-cfa", "w", "--json")
    assert json.loads(out)["exit"] == 0


def test_check_cfa_broken_file(capsys, tmp_path):
    obj = cfa.GHZ.to_json()
    obj["counit"] = effect([1, 0]).to_json()
    p = tmp_path / "broken.json"
    p.write_text(json.dumps(obj))
    code, out, _ = run(capsys, "check-cfa", str(p))
    assert code == 1
    assert "counit" in out


def test_classify_and_superclass(capsys):
    assert run_json(capsys, "classify-cfa", "w")[1]["kind"] == "w"
    assert run_json(capsys, "classify-state", "ghz3")[1]["text"] == "ghz"
    assert run_json(capsys, "superclass", "w4")[1]["text"] == "{product, w}"


def test_state_file(capsys, tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(state_to_json(cfa.W3)))
    assert run_json(capsys, "classify-state", str(p))[1]["text"] == "w"


def test_frobenius_state(capsys):
    assert run(capsys, "frobenius-state", "w3")[0] == 0


def test_pair_check_and_partner(capsys):
    code, rep = run_json(capsys, "pair-check", "canonical")
    assert code == 0 and rep["failures"] == []
    assert run(capsys, "partner", "ghz")[0] == 0


def test_normalize(capsys, lolli_file):
    code, rep = run_json(capsys, "normalize", "--kind", "acfa", lolli_file)
    assert code == 0
    assert "lolli" in json.dumps(rep)


def test_qmux(capsys):
    code, rep = run_json(capsys, "qmux", "ghz2", "ghz2")
    assert code == 0
    assert run(capsys, "qmux", "w3", "ghz3")[0] == 2  # <111|W> vanishes


def test_pldu(capsys):
    code, out, _ = run(capsys, "pldu", "0,1,1,0")
    assert code == 0
    code, rep = run_json(capsys, "pldu", "[[1, 2], [3, 4]]")
    assert code == 0


def test_export_dot(capsys, lolli_file):
    code, out, _ = run(capsys, "export-dot", lolli_file)
    assert code == 0 and out.startswith("digraph")


def test_errors_exit_two(capsys, tmp_path):
    p = tmp_path / "bad.dsl"
    p.write_text("(seq (unit w) (mult w))")
    code, _, err = run(capsys, "eval", str(p))
    assert code == 2 and "arity" in err
    assert run(capsys, "check-cfa", "nonesuch")[0] == 2
    assert run(capsys, "pldu", "1,2,3")[0] == 2


def test_bad_tolerance(capsys):
    with pytest.raises(SystemExit):
        main(["--tol", "-1", "check-cfa", "ghz"])


def test_output_is_deterministic(capsys):
    first = run(capsys, "--json", "qmux", "ghz3", "ghz3")[1]
    second = run(capsys, "--json", "qmux", "ghz3", "ghz3")[1]
    assert first == second
