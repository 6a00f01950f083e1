from __future__ import annotations

import random
from fractions import Fraction

import pytest

from oracles import DenseCGA, dense_witness_exists
from sullivan.algebra import CDGA, Derivation, FreeCGA, Generator
from sullivan.cli import load_document
from sullivan.cohomology import CohomologyEngine, is_exact, presentation
from sullivan.formality import (FormalUpTo, NonFormal, bracket_with_d, decide, decide_formality,
                                derivation_slice, lowest_perturbation, model_source, negative_derivations,
                                obstruction_loop, solve_witness)
from sullivan.linalg import NO_SOLUTION
from sullivan.models import bigraded_model

F = Fraction


def fixture(name):
    return load_document(f"fixtures/{name}")


def lupton_models(cap):
    fm = fixture("lupton_total").fibration().prepare(cap)
    return lambda n: fm.total(n, check=True).total_filtered()


def test_example31_formal():
    v = decide_formality(fixture("example31").cdga(18), 16)
    assert isinstance(v, FormalUpTo) and v.cap == 16


def test_heisenberg_nonformal_at_stage_two():
    v = decide_formality(fixture("heisenberg_shifted").cdga(12), 10)
    assert isinstance(v, NonFormal)
    assert v.stage == 2 and v.truncation <= 10


def test_lupton_total_nonformal_and_fiber_formal():
    v = decide(lupton_models(10), 10)
    assert isinstance(v, NonFormal) and v.stage == 2
    assert "w" in v.obstruction
    bg = bigraded_model(fixture("wedge_h").graded_algebra(8), 7)
    assert decide_formality(bg.cdga, 7, use_bigrading=True).formal


def test_base_bcn_total_formal():
    assert decide_formality(fixture("base_bcn_total").cdga(14), 12).formal


def test_early_exit_agrees_with_single_run():
    for name, cap in [("heisenberg_shifted", 9), ("example31", 13), ("s2", 8)]:
        c = fixture(name).cdga(cap + 2)
        a = decide_formality(c, cap)
        b = decide_formality(c, cap, early_exit=False)
        assert a.formal == b.formal, name


def test_obstruction_rechecked_by_dense_solver():
    for f in [model_source(fixture("heisenberg_shifted").cdga(10))(8), lupton_models(5)(5)]:
        i, di = lowest_perturbation(f, below_top=True)
        assert solve_witness(f, i, di) is NO_SOLUTION
        assert not dense_witness_exists(f.algebra, f.d, di.values, i, f.cap)


def test_dense_solver_finds_planted_witness():
    f = model_source(fixture("heisenberg_shifted").cdga(10))(8)
    alg = f.algebra
    rng = random.Random(3)
    d = Derivation(alg, 1, f.d)
    for _ in range(5):
        g = rng.choice([k for k, x in enumerate(alg.generators) if x.lower >= 1 and x.degree <= 7])
        basis = alg.monomial_basis(alg.degrees[g], lower=alg.lowers[g] - 1)
        if not basis:
            continue
        mu = Derivation(alg, 0, {g: {rng.choice(basis): F(rng.randint(1, 4))}})
        target = {}
        for (h, t), c in bracket_with_d(d, mu, 7).items():
            target.setdefault(h, {})[t] = c
        assert dense_witness_exists(alg, f.d, target, 2, 8)


def test_formal_transcript_gauges_to_bigraded():
    f = model_source(fixture("heisenberg_shifted").cdga(10))(6)
    verdict, _, g = obstruction_loop(f)
    assert verdict is None
    i, _ = lowest_perturbation(g, below_top=True)
    assert i is None


def test_negative_derivations():
    H = presentation(fixture("heisenberg_shifted").cdga(14), 13)
    res = negative_derivations(H, down_to=6)
    assert res.dims[-5] > 0
    H31 = presentation(fixture("example31").cdga(25), 24)
    assert negative_derivations(H31, down_to=11).none_found


def test_bracket_with_d_squares_to_zero():
    rng = random.Random(11)
    f = model_source(fixture("heisenberg_shifted").cdga(12))(10)
    alg = f.algebra
    d = Derivation(alg, 1, f.d)
    checked = 0
    for _ in range(400):
        p, q = rng.randint(0, 3), rng.randint(-6, 3)
        top = alg.degree_cap - q - 2
        s = derivation_slice(alg, f.d, p, q, top)
        if not s.basis:
            continue
        coeffs = {k: F(rng.randint(-3, 3)) for k in rng.sample(range(len(s.basis)), min(3, len(s.basis)))}
        theta = s.derivation(coeffs)
        once = bracket_with_d(d, theta, top - 1)
        vals = {}
        for (h, t), c in once.items():
            vals.setdefault(h, {})[t] = c
        psi = Derivation(alg, q + 1, vals, p + 1)
        assert bracket_with_d(d, psi, top - 2) == {}
        checked += 1
        if checked == 20:
            break
    assert checked == 20


def test_base_bcn_triple_product_is_essential():
    # independent check: <b, c, b> is represented by n b, and H^6 = 0 kills the indeterminacy
    dense = DenseCGA([3, 4, 6], {2: {(1, 1, 0): F(1)}})
    betti = dense.betti(10)
    assert betti[6] == 0
    nb = {(1, 0, 1): F(1)}
    M = dense.d_matrix(8)
    tgt = dense.basis(9)
    import sympy
    col = sympy.zeros(len(tgt), 1)
    for m, c in nb.items():
        col[tgt.index(m), 0] = c
    assert M.rank() < M.row_join(col).rank()
    c = fixture("base_bcn").cdga(12)
    alg = c.algebra
    prod = alg.multiply(alg.gen("n"), alg.gen("b"))
    assert is_exact(c, prod) is not True and not isinstance(is_exact(c, prod), dict)
    assert CohomologyEngine(c).betti(10)[6] == 0
