from __future__ import annotations

from fractions import Fraction

import pytest

from oracles import from_package
from sullivan.algebra import Derivation
from sullivan.cli import load_document
from sullivan.formality import (PreconditionError, bracket_with_d, map_formality_certificate,
                                module_derivation_replay, tncz_analyze)

F = Fraction


def fibration(name, cap):
    return load_document(f"fixtures/{name}").fibration().prepare(cap)


def test_lupton_tncz_and_total_betti_against_dense():
    fm = fibration("lupton_total", 8)
    r = fm.total(8)
    rep = tncz_analyze(r, 8)
    assert rep.surjective
    assert rep.total_betti == [1, 0, 3, 1, 0, 3, 0, 0, 0]
    t = r.total()
    dense = from_package(t.algebra, t.d.values)
    assert dense.betti(6) == rep.total_betti[:7]


def test_transgressive_fibration_is_not_tncz():
    rep = tncz_analyze(fibration("transgressive", 9).total(9), 9)
    assert not rep.surjective and rep.failing_degree == 3


def test_twistor_and_product_tncz():
    assert tncz_analyze(fibration("twistor_toy", 10).total(10), 10).surjective
    rep = tncz_analyze(fibration("product_s2_s3", 9).total(9), 9)
    assert rep.surjective and rep.ranks == rep.fiber_betti


def test_lupton_total_differential_and_fiber():
    r = fibration("lupton_total", 8).total(8)
    alg = r.algebra
    assert alg.format(r.total().d.values[alg.index["w"]]) == "v*c - a*beta + b*alpha"
    fiber = r.fiber()
    assert fiber.algebra.format(fiber.d.values[fiber.algebra.index["w"]]) == "-a*beta + b*alpha"


def test_lupton_theta_is_closed():
    fm = fibration("lupton_total", 8)
    fiber = fm.fiber_cdga(7)
    alg = fiber.algebra
    d = Derivation(alg, 1, fiber.d.values)
    bare = Derivation(alg, -2, {alg.index["w"]: alg.gen("c")}, 2)
    assert bracket_with_d(d, bare, 4) == {}
    values = fm._theta(fiber, "v")
    assert values[alg.index["w"]] == alg.gen("c")
    assert bracket_with_d(d, Derivation(alg, -2, values, 2), 6) == {}


def test_certificates():
    assert map_formality_certificate(fibration("product_s2_s3", 9).total(9, check=True)).certified
    assert map_formality_certificate(fibration("twistor_toy", 10).total(10, check=True)).certified
    cert = map_formality_certificate(fibration("lupton_total", 8).total(8, check=True))
    assert not cert.certified and "total space is not formal" in cert.reason


def test_replay_twistor_consistent():
    fm = fibration("twistor_toy", 10)
    rep = module_derivation_replay(fm.total(10, check=True), 2, 10, fiber_H=fm.fiber_H0(10),
                                   total_models=lambda n: fm.total(n).total_filtered())
    assert rep.consistent and rep.restriction_agrees


def test_replay_precondition_reported():
    fm = fibration("transgressive", 9)
    with pytest.raises(PreconditionError):
        module_derivation_replay(fm.total(9), 2, 9)
