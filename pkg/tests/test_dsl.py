from __future__ import annotations

import json

import pytest

from sullivan.cli import fixture_names, load_document, read_input
from sullivan.dsl import (DocumentError, document_to_dict, dumps, filtered_model_to_dict, from_json, load,
                          parse, to_json)
from sullivan.formality import model_source


def test_parse_cdga():
    doc = parse("# comment\nname t\ngenerator a : degree 2\ngenerator s : degree 3\nd s = a^2\n")
    assert doc.kind == "cdga" and doc.name == "t"
    c = doc.cdga(8)
    assert c.algebra.format(c.d.values[1]) == "a^2"


def test_coefficients_and_signs_normalize():
    doc = parse("generator x : degree 3\ngenerator y : degree 3\ngenerator z : degree 5\n"
                "d z = y*x + x*x + 1/2*x*y\n")
    c = doc.cdga(8)
    assert c.algebra.format(c.d.values[2]) == "-1/2*x*y"
    assert any("vanishes" in w for w in doc.warnings)


@pytest.mark.parametrize("text,line,column,fragment", [
    ("generator a : degree 2\nd a = a\n", 2, 3, "degree mismatch"),
    ("generator a : degree 2\ngenerator b : degree 3\nd b = q\n", 3, None, "unknown generator q"),
    ("generator a : degree 2\ngenerator b : degree 3\nd b = (a\n", 3, None, "expected ')'"),
])
def test_error_positions(text, line, column, fragment):
    with pytest.raises(DocumentError) as info:
        parse(text)
    err = info.value
    assert err.line == line
    if column is not None:
        assert err.column == column
    assert fragment in str(err)


def test_d_squared_rejected():
    text = "generator a : degree 2\ngenerator b : degree 3\ngenerator c : degree 4\nd b = a^2\nd c = a*b\n"
    with pytest.raises(DocumentError) as info:
        parse(text)
    assert "d^2 != 0 on c" in str(info.value)


def test_odd_power_rejected():
    with pytest.raises(DocumentError, match="odd-degree"):
        parse("generator x : degree 3\ngenerator z : degree 7\nd z = x^2\n")


@pytest.mark.parametrize("name", fixture_names())
def test_round_trip(name):
    doc = load_document(f"fixtures/{name}")
    again = parse(doc.to_dsl())
    assert document_to_dict(again) == document_to_dict(doc)
    j = to_json(doc)
    assert document_to_dict(from_json(j)) == document_to_dict(doc)
    assert load(j).name == doc.name
    assert to_json(from_json(j)) == j


def test_json_schema_error_path():
    data = json.loads(to_json(load_document("fixtures/s2")))
    data["generators"][0]["degree"] = "3"
    with pytest.raises(DocumentError) as info:
        from_json(json.dumps(data))
    assert "$.generators[0].degree" in str(info.value)


def test_fixture_corpus():
    names = fixture_names()
    assert len(names) >= 10
    for n in ["example31", "heisenberg_shifted", "base_bcn", "base_bcn_total", "wedge_s2_s2_s2",
              "lupton_total", "s2", "s3", "s6", "twistor_toy"]:
        assert n in names
    assert read_input("fixtures/s2").lstrip().startswith("#")


def test_filtered_model_json_lists_deformation():
    f = model_source(load_document("fixtures/heisenberg_shifted").cdga(10))(8)
    data = filtered_model_to_dict(f)
    assert data["deformation"][0]["stage"] == 2
    assert dumps(data) == dumps(filtered_model_to_dict(f))


def test_fibration_document():
    doc = load_document("fixtures/lupton_total")
    assert doc.kind == "fibration"
    assert "theta v : w = c" in doc.to_dsl()
