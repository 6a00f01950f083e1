from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from sullivan.cli import EXIT_EXPECT, EXIT_OK, EXIT_PARSE, EXIT_USAGE, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_fixture_listing():
    code, out, _ = call("fixtures", "--json")
    assert code == EXIT_OK
    assert len(json.loads(out)["fixtures"]) >= 10


def test_cohomology_text():
    code, out, _ = call("cohomology", "fixtures/s2", "--cap", "8")
    assert code == EXIT_OK and "1" in out


def test_expect_exit_codes():
    assert call("formality", "fixtures/example31", "--cap", "13", "--expect", "formal")[0] == EXIT_OK
    code, out, err = call("formality", "fixtures/heisenberg_shifted", "--cap", "9", "--expect", "formal")
    assert code == EXIT_EXPECT and "NonFormal(stage=2)" in out


def test_parse_error_exit(tmp_path):
    p = tmp_path / "bad.cdga"
    p.write_text("generator a : degree 2\nd a = a\n")
    code, _, err = call("cohomology", str(p), "--cap", "6")
    assert code == EXIT_PARSE and "line 2, column 3" in err


@pytest.mark.parametrize("argv", [
    ["cohomology", "fixtures/example31"],
    ["cohomology", "fixtures/example31", "--cap", "5"],
    ["cohomology", "fixtures/s2", "--cap", "8", "--expect", "formal"],
    ["cohomology", "fixtures/nope", "--cap", "8"],
    ["cohomology", "fixtures/s2", "--cap", "8", "--json", "--text"],
])
def test_usage_errors(argv):
    code, _, err = call(*argv)
    assert code == EXIT_USAGE


def test_cap_guard_message():
    _, _, err = call("cohomology", "fixtures/example31", "--cap", "5")
    assert "--cap 12" in err


def test_json_is_deterministic():
    a = call("formality", "fixtures/lupton_total", "--cap", "8", "--json")[1]
    b = call("formality", "fixtures/lupton_total", "--cap", "8", "--json")[1]
    assert a == b and json.loads(a)["verdict"] == "NonFormal"


@pytest.mark.parametrize("name,cap,verdict", [("example31", 14, "FormalUpTo"), ("lupton_total", 8, "NonFormal")])
def test_verdict_invariant_under_generator_order(name, cap, verdict):
    for seed in range(1, 11):
        code, out, _ = call("formality", f"fixtures/{name}", "--cap", str(cap), "--json", "--seed", str(seed))
        assert code == EXIT_OK
        assert json.loads(out)["verdict"] == verdict, seed


def test_other_commands():
    assert "no negative-degree derivations" in call("halperin", "fixtures/wedge_s2_s2_s2", "--cap", "10")[1]
    assert call("tncz", "fixtures/lupton_total", "--cap", "8")[1].startswith("TNCZ")
    assert call("map-formality", "fixtures/twistor_toy", "--cap", "10", "--expect", "formal")[0] == EXIT_OK
    assert call("tncz", "fixtures/s2", "--cap", "8")[0] == EXIT_USAGE
    for cmd in ["presentation", "minimal-model", "bigraded-model", "filtered-model"]:
        code, out, _ = call(cmd, "fixtures/heisenberg_shifted", "--cap", "7", "--json")
        assert code == EXIT_OK and json.loads(out)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "sullivan", "cohomology", "fixtures/s3", "--cap", "6"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout
