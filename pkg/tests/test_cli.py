from __future__ import annotations

import json
import os
from collections import Counter
from fractions import Fraction
from pathlib import Path

import jsonschema
import pytest

from conftest import line
from finmetric import OPERATIONS
from finmetric.cli import COMMANDS, execute, main, run_command, sample_inputs
from finmetric.core import identity, two_point
from finmetric.documents import KINDS, SCHEMAS, Document, from_json, parse_document, serialize, to_json
from finmetric.errors import ParseError
from finmetric.values import INF

GOLDEN = Path(__file__).parent / "golden"
GOLDEN_SEED = 7


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(serialize(doc) if isinstance(doc, Document) else json.dumps(doc))
    return str(path)


# --- parsing -----------------------------------------------------------------

def test_parse_space_document():
    doc = parse_document('{"kind":"space","points":["a","b"],"d":[["0","1"],["1","0"]]}')
    assert doc.kind == "space"
    assert doc.payload.points == ("a", "b")
    assert doc.payload.dist("a", "b") == 1


def test_parse_infinite_cell():
    doc = parse_document('{"kind":"space","points":["a","b"],"d":[["0","inf"],["inf","0"]]}')
    assert doc.payload.dist("a", "b") is INF


@pytest.mark.parametrize("cell", ['"1/0"', '"-1"', '"0.5"', "0.5", "true"])
def test_parse_bad_rational(cell):
    with pytest.raises(ParseError) as exc:
        parse_document('{"kind":"space","points":["a","b"],"d":[["0",%s],["1","0"]]}' % cell)
    assert exc.value.code == "E_BAD_RATIONAL"


def test_parse_unknown_kind():
    with pytest.raises(ParseError) as exc:
        parse_document('{"kind":"banana"}')
    assert exc.value.code == "E_UNKNOWN_KIND"


def test_parse_syntax_error_has_position():
    with pytest.raises(ParseError) as exc:
        parse_document('{"kind": "space",')
    assert exc.value.code == "E_PARSE"
    assert exc.value.position == 17
    with pytest.raises(ParseError) as exc:
        parse_document(b'\xff\xfe')
    assert (exc.value.code, exc.value.position) == ("E_PARSE", 0)


@pytest.mark.parametrize(
    "text",
    [
        '{"kind":"space","points":["a","a"],"d":[["0","0"],["0","0"]]}',
        '{"kind":"space","points":["a","b"],"d":[["0","1"]]}',
        '{"kind":"space","points":["a"],"d":[["0","1"]]}',
        '[1, 2]',
    ],
)
def test_parse_structural_errors(text):
    with pytest.raises(ParseError) as exc:
        parse_document(text)
    assert exc.value.code == "E_PARSE"


def test_parse_morphism_map_must_be_total():
    sp = to_json(Document("space", two_point(1)))
    raw = {"kind": "morphism", "dom": sp, "cod": sp, "map": {"0": "0"}}
    with pytest.raises(ParseError):
        from_json(raw)


def test_points_are_canonically_sorted():
    doc = parse_document('{"kind":"space","points":["b","a"],"d":[["0","2/4"],["1/2","0"]]}')
    assert serialize(doc) == '{"d":[["0","1/2"],["1/2","0"]],"kind":"space","points":["a","b"]}\n'


# --- round trips and schemas -------------------------------------------------

def _generated_documents(seeds=range(3)):
    for name in COMMANDS:
        for seed in seeds:
            docs, opts = sample_inputs(name, seed)
            yield from docs
            out, _ = execute(name, docs, opts)
            yield out


def test_every_kind_is_generated():
    assert {doc.kind for doc in _generated_documents()} == set(KINDS)


def test_documents_roundtrip_byte_identically():
    for doc in _generated_documents():
        text = serialize(doc)
        assert serialize(parse_document(text)) == text


def test_documents_match_schemas():
    for doc in _generated_documents():
        jsonschema.validate(json.loads(serialize(doc)), SCHEMAS[doc.kind])


def test_schemas_are_valid():
    for kind in KINDS:
        jsonschema.Draft202012Validator.check_schema(SCHEMAS[kind])


def test_schema_flag():
    text, code = run_command(["--schema", "space"])
    assert code == 0
    assert json.loads(text) == SCHEMAS["space"]
    _, code = run_command(["--schema", "banana"])
    assert code == 2


# --- command examples ----------------------------------------------------------

def test_gh_command(tmp_path):
    x = _write(tmp_path, "x.json", Document("space", two_point(1)))
    y = _write(tmp_path, "y.json", Document("space", two_point(2)))
    text, code = run_command(["gh", "--in", x, "--in", y])
    assert code == 0
    out = json.loads(text)
    assert out["value"] == "1/2"
    oracle, _ = run_command(["gh-oracle", "--in", x, "--in", y])
    assert json.loads(oracle)["value"] == "1/2"


def test_validate_command_reports_violation(tmp_path):
    bad = {"kind": "space", "points": ["a", "b", "c"], "d": [["0", "1", "5"], ["1", "0", "1"], ["5", "1", "0"]]}
    text, code = run_command(["validate", "--in", _write(tmp_path, "bad.json", bad)])
    assert code == 1
    out = json.loads(text)
    assert out["error"] == "E_TRIANGLE"
    assert out["violations"]


def test_submetry_command_on_identity(tmp_path):
    f = _write(tmp_path, "f.json", Document("morphism", identity(line(0, 1, 3))))
    text, code = run_command(["submetry", "--in", f])
    assert code == 0
    assert json.loads(text)["verdict"] is True


def test_usage_errors_exit_2(tmp_path):
    x = _write(tmp_path, "x.json", Document("space", two_point(1)))
    assert run_command(["frobnicate", "--in", x])[1] == 2
    assert json.loads(run_command(["frobnicate", "--in", x])[0])["error"] == "E_UNKNOWN_COMMAND"
    text, code = run_command(["gh", "--in", x])
    assert (json.loads(text)["error"], code) == ("E_ARITY", 2)
    assert run_command([])[1] == 2
    assert run_command(["gh", "--bogus"])[1] == 2
    assert run_command(["gh", "--in", str(tmp_path / "missing.json")])[1] == 2
    (tmp_path / "junk.json").write_text("{not json")
    assert run_command(["validate", "--in", str(tmp_path / "junk.json")])[1] == 2


def test_out_flag_writes_file(tmp_path, capsys):
    x = _write(tmp_path, "x.json", Document("space", two_point(1)))
    target = tmp_path / "result.json"
    assert main(["validate", "--in", x, "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["kind"] == "result"


def test_radius_and_subset_flags(tmp_path):
    x = _write(tmp_path, "x.json", Document("space", line(0, 1, 3)))
    text, code = run_command(["hausdorff", "--in", x, "--subset", "0", "--subset", "1,3"])
    assert (json.loads(text)["value"], code) == ("3", 0)


# --- dispatch table ------------------------------------------------------------

def test_dispatch_is_bijective_with_registry():
    ops = [c.operation for c in COMMANDS.values()]
    assert len(COMMANDS) == len(OPERATIONS) == 27
    assert set(ops) == set(OPERATIONS)
    assert all(n == 1 for n in Counter(ops).values())


@pytest.mark.parametrize("name", sorted(COMMANDS))
def test_seeded_runs_respect_exit_codes(name):
    codes = set()
    for seed in range(8):
        text, code = run_command([name, "--seed", str(seed)])
        out = json.loads(text)
        assert code in (0, 1), out
        assert (code == 1) == ("error" in out and out.get("kind") == "result")
        codes.add(code)
    assert codes


# --- golden outputs ------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(COMMANDS))
def test_golden_output(name):
    text, code = run_command([name, "--seed", str(GOLDEN_SEED)])
    path = GOLDEN / f"{name}.json"
    if os.environ.get("FINMETRIC_UPDATE_GOLDEN"):
        GOLDEN.mkdir(exist_ok=True)
        path.write_text(json.dumps({"exit": code, "output": json.loads(text)}, indent=1, sort_keys=True) + "\n")
    expected = json.loads(path.read_text())
    assert code == expected["exit"]
    assert json.loads(text) == expected["output"]


def test_runs_are_deterministic():
    for name in COMMANDS:
        assert run_command([name, "--seed", "3"]) == run_command([name, "--seed", "3"])


def test_radius_literal_is_exact(tmp_path):
    f = _write(tmp_path, "f.json", Document("morphism", identity(two_point(Fraction(1)))))
    text, code = run_command(["covering-from-submetry", "--in", f, "--radius", "0.5"])
    assert code == 2
    text, code = run_command(["covering-from-submetry", "--in", f, "--radius", "1/2"])
    assert code == 0
    assert json.loads(text)["kind"] == "covering"
