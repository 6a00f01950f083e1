from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import DenseCGA, all_monomial_words
from sullivan.algebra import (CDGA, AlgebraError, AlgebraMap, Derivation, FreeCGA, Generator, check_differential,
                              derivation_bracket, translate)

DEGREES = [2, 3, 3, 4, 5]
ALG = FreeCGA([Generator(f"g{i}", d) for i, d in enumerate(DEGREES)], 16)


@st.composite
def homogeneous(draw, max_degree=8):
    deg = draw(st.integers(2, max_degree))
    basis = ALG.monomial_basis(deg)
    if not basis:
        return deg, {}
    picks = draw(st.lists(st.sampled_from(basis), min_size=1, max_size=3, unique=True))
    return deg, {m: Fraction(draw(st.integers(-3, 3))) for m in picks if True}


def clean(p):
    return {m: c for m, c in p.items() if c}


@settings(max_examples=1000, deadline=None, derandomize=True)
@given(homogeneous(), homogeneous())
def test_koszul_commutativity(x, y):
    (a, p), (b, q) = x, y
    p, q = clean(p), clean(q)
    sign = -1 if (a * b) % 2 else 1
    assert ALG.multiply(p, q) == {m: sign * c for m, c in ALG.multiply(q, p).items()}


@st.composite
def derivation(draw):
    vals = {}
    for i, g in enumerate(ALG.generators):
        basis = ALG.monomial_basis(g.degree + 1)
        if basis and draw(st.booleans()):
            m = draw(st.sampled_from(basis))
            vals[i] = {m: Fraction(draw(st.integers(-2, 2)) or 1)}
    return Derivation(ALG, 1, vals)


@settings(max_examples=1000, deadline=None, derandomize=True)
@given(derivation(), homogeneous(6), homogeneous(6))
def test_leibniz(d, x, y):
    (a, p), (b, q) = x, y
    p, q = clean(p), clean(q)
    lhs = d.apply(ALG.multiply(p, q))
    rhs = ALG.multiply(d.apply(p), q)
    sign = -1 if a % 2 else 1
    for m, c in ALG.multiply(p, d.apply(q)).items():
        rhs[m] = rhs.get(m, 0) + sign * c
    assert lhs == clean(rhs)


@settings(max_examples=300, deadline=None, derandomize=True)
@given(homogeneous(5), homogeneous(5), homogeneous(5))
def test_associativity(x, y, z):
    p, q, r = clean(x[1]), clean(y[1]), clean(z[1])
    assert ALG.multiply(ALG.multiply(p, q), r) == ALG.multiply(p, ALG.multiply(q, r))


def test_signs_agree_with_dense_oracle():
    dense = DenseCGA(DEGREES, {})
    for da in range(2, 9):
        for db in range(2, 9):
            for ma in ALG.monomial_basis(da):
                for mb in ALG.monomial_basis(db):
                    ea = [0] * len(DEGREES)
                    eb = [0] * len(DEGREES)
                    for k, e in ma:
                        ea[k] = e
                    for k, e in mb:
                        eb[k] = e
                    s, prod = dense.mono_mul(tuple(ea), tuple(eb))
                    got = ALG.multiply({ma: Fraction(1)}, {mb: Fraction(1)})
                    if s == 0:
                        assert got == {}
                    else:
                        (m, c), = got.items()
                        assert c == s
                        assert tuple(dict(m).get(k, 0) for k in range(len(DEGREES))) == prod


def test_basis_counts_match_brute_force():
    for n in range(0, 15):
        assert len(ALG.monomial_basis(n)) == all_monomial_words(DEGREES, n)


def test_odd_square_vanishes_and_even_square_does_not():
    x = ALG.gen("g1")
    a = ALG.gen("g0")
    assert ALG.multiply(x, x) == {}
    assert ALG.multiply(a, a) == {((0, 2),): Fraction(1)}


def test_lower_degrees_and_basis_filter():
    alg = FreeCGA([Generator("a", 2, 0), Generator("s", 3, 1)], 10)
    assert alg.monomial_basis(5, lower=1) == [((0, 1), (1, 1))]
    assert alg.monomial_basis(5, lower=0) == []


def test_generator_validation():
    with pytest.raises(AlgebraError):
        Generator("a", 1)
    with pytest.raises(AlgebraError):
        FreeCGA([Generator("a", 2), Generator("a", 3)], 5)


def test_check_differential_flags_bad_square():
    alg = FreeCGA([Generator("a", 2), Generator("b", 3), Generator("c", 4)], 8)
    ok = CDGA.from_values(alg, {1: {((0, 2),): Fraction(1)}})
    assert check_differential(ok)
    bad = CDGA.from_values(alg, {1: {((0, 2),): Fraction(1)}, 2: {((0, 1), (1, 1)): Fraction(1)}})
    v = check_differential(bad)
    assert not v and v.generator == "c"


def test_bracket_of_d_with_itself_vanishes_when_d_squares_to_zero():
    alg = FreeCGA([Generator("a", 2), Generator("b", 3), Generator("z", 5)], 12)
    d = Derivation(alg, 1, {1: {((0, 2),): Fraction(1)}, 2: {((0, 3),): Fraction(1)}})
    assert all(not v for v in derivation_bracket(d, d).values.values())


def test_algebra_map_is_multiplicative():
    alg = FreeCGA([Generator("a", 2), Generator("x", 3)], 12)
    phi = AlgebraMap(alg, alg, {0: {((0, 1),): Fraction(2)}, 1: {((1, 1),): Fraction(1), ((0, 1), (1, 1)): Fraction(0)}})
    p = {((0, 2), (1, 1)): Fraction(1)}
    assert phi.apply(p) == {((0, 2), (1, 1)): Fraction(4)}


def test_translate_reindexes():
    assert translate({((0, 1), (1, 2)): Fraction(3)}, {0: 1, 1: 4}) == {((1, 1), (4, 2)): Fraction(3)}
