import json
from importlib import resources

import jsonschema
import pytest

from latticeva.cli import render_text, run

SCHEMA = json.loads((resources.files("latticeva") / "data" / "report.schema.json").read_text())


def _json(capsys, argv):
    code = run(argv + ["--format", "json"])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_compute(capsys):
    code, doc = _json(capsys, ["compute", "w[1] w[-1] vac", "--p", "sym"])
    assert code == 0
    assert doc["results"][0]["value"] == "1 * h(-1)h(-1)|q=0⟩"
    jsonschema.validate(doc, SCHEMA)


def test_verify_single(capsys):
    code, doc = _json(capsys, ["verify", "--only", "Q4", "--p", "sym"])
    assert code == 0 and doc["results"][0]["status"] == "pass"
    jsonschema.validate(doc, SCHEMA)


def test_verify_alias(capsys):
    code, doc = _json(capsys, ["verify", "--only", "P8J"])
    assert code == 0 and doc["results"][0]["name"] == "sv8J"


def test_twisted_eigen(capsys):
    code, doc = _json(capsys, ["twisted-eigen"])
    assert code == 0
    assert [r["value"] for r in doc["results"]] == ["(1/16, -1/128)", "(9/16, 15/128)"]


def test_table_failure_exit(capsys):
    code, doc = _json(capsys, ["table", "A3"])
    assert code == 1
    jsonschema.validate(doc, SCHEMA)
    code, _ = _json(capsys, ["table", "A1"])
    assert code == 0


def test_epsilon(capsys):
    code, doc = _json(capsys, ["epsilon", "E", "e[1/2]", "--p", "2"])
    assert code == 0 and doc["results"][0]["value"] == "0"
    code, doc = _json(capsys, ["epsilon", "E", "vac"])
    assert doc["results"][0]["value"] == "-1"


def test_zhu(capsys):
    code, doc = _json(capsys, ["zhu", "member", "w[-2] vac + 2 w[-1] vac", "--cutoff", "4"])
    assert code == 0 and doc["results"][0]["status"] == "certified_in_O"
    code, doc = _json(capsys, ["zhu", "star", "vac", "H[-1] vac"])
    assert code == 0


@pytest.mark.parametrize("argv,code", [
    (["compute", "w[1 vac"], 2),
    (["compute", "w[1] vac", "--p", "abc"], 2),
    (["verify", "--only", "nope"], 2),
    (["frob"], 2),
    (["compute", "E[0] e[1/3]"], 3),
    (["compute", "H[0] E[-1] vac", "--p", "2"], 0),
    (["compute", "2/(p-2) vac", "--p", "2"], 3),
])
def test_exit_codes(argv, code, capsys):
    assert run(argv) == code
    capsys.readouterr()


def test_parse_error_caret(capsys):
    run(["compute", "w[1 vac"])
    err = capsys.readouterr().err
    assert "^" in err and "column" in err


def test_text_is_function_of_json(capsys):
    code, doc = _json(capsys, ["verify", "--domain", "p=2", "--no-timing"])
    run(["verify", "--domain", "p=2", "--no-timing"])
    text = capsys.readouterr().out
    assert text == render_text(doc) + "\n"


def test_full_verify_deterministic(capsys):
    c1, d1 = _json(capsys, ["verify", "--no-timing"])
    c2, d2 = _json(capsys, ["verify", "--no-timing"])
    assert c1 == c2 == 0
    assert json.dumps(d1) == json.dumps(d2)
    jsonschema.validate(d1, SCHEMA)
