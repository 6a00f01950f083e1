"""Independent dense oracles (sympy) used to cross-check the sparse engines.

Nothing here imports the package's algebra code: monomials are exponent
vectors, signs come from counting transpositions of odd letters, and ranks
come from sympy matrices.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import sympy


class DenseCGA:
    """Free graded-commutative algebra on ``degrees`` with a differential.

    ``d`` maps a generator index to ``{exponent_tuple: Fraction}``.
    """

    def __init__(self, degrees, d):
        self.degrees = list(degrees)
        self.n = len(self.degrees)
        self.d = {i: dict(v) for i, v in d.items()}

    def odd(self, i):
        return self.degrees[i] % 2 == 1

    def basis(self, deg):
        out = []

        def rec(i, left, cur):
            if i == self.n:
                if left == 0:
                    out.append(tuple(cur))
                return
            top = 1 if self.odd(i) else left // self.degrees[i]
            for e in range(0, top + 1):
                if e * self.degrees[i] > left:
                    break
                rec(i + 1, left - e * self.degrees[i], cur + [e])

        if deg >= 0:
            rec(0, deg, [])
        return out

    def mono_mul(self, a, b):
        """(sign, product) of two exponent vectors; sign 0 if an odd letter repeats."""
        for i in range(self.n):
            if self.odd(i) and a[i] and b[i]:
                return 0, None
        # letters of a are written before letters of b; sort b's odd letters past a's
        sign = 1
        for j in range(self.n):
            if b[j] and self.odd(j):
                passed = sum(a[i] for i in range(j + 1, self.n) if self.odd(i))
                if passed % 2:
                    sign = -sign
        return sign, tuple(x + y for x, y in zip(a, b))

    def mul(self, p, q):
        out = {}
        for a, x in p.items():
            for b, y in q.items():
                s, m = self.mono_mul(a, b)
                if s:
                    out[m] = out.get(m, 0) + s * x * y
        return {m: c for m, c in out.items() if c}

    def letters(self, m):
        """The monomial as an ordered word of generator indices."""
        return [i for i in range(self.n) for _ in range(m[i])]

    def unit(self, i):
        return tuple(1 if k == i else 0 for k in range(self.n))

    def apply_d(self, m):
        """d on a monomial by the Leibniz rule over its word."""
        word = self.letters(m)
        out = {}
        for pos, i in enumerate(word):
            before = {tuple(0 for _ in range(self.n)): Fraction(1)}
            for k in word[:pos]:
                before = self.mul(before, {self.unit(k): Fraction(1)})
            after = {tuple(0 for _ in range(self.n)): Fraction(1)}
            for k in word[pos + 1:]:
                after = self.mul(after, {self.unit(k): Fraction(1)})
            sign = -1 if sum(self.degrees[k] for k in word[:pos]) % 2 else 1
            term = self.mul(self.mul(before, self.d.get(i, {})), after)
            for t, c in term.items():
                out[t] = out.get(t, 0) + sign * c
        return {t: c for t, c in out.items() if c}

    def d_matrix(self, deg):
        src, tgt = self.basis(deg), self.basis(deg + 1)
        idx = {m: k for k, m in enumerate(tgt)}
        M = sympy.zeros(len(tgt), len(src))
        for j, m in enumerate(src):
            for t, c in self.apply_d(m).items():
                M[idx[t], j] = sympy.Rational(c.numerator, c.denominator)
        return M

    def betti(self, top):
        out = []
        for n in range(top + 1):
            dim = len(self.basis(n))
            r_out = self.d_matrix(n).rank() if dim and self.basis(n + 1) else 0
            r_in = self.d_matrix(n - 1).rank() if n >= 1 and self.basis(n - 1) and dim else 0
            out.append(dim - r_out - r_in)
        return out


def from_package(alg, values) -> DenseCGA:
    """Translate generator degrees and ``d`` values (package monomials) into a dense oracle."""
    n = len(alg.generators)
    d = {}
    for i, v in values.items():
        dv = {}
        for m, c in v.items():
            e = [0] * n
            for k, x in m:
                e[k] = x
            dv[tuple(e)] = Fraction(c)
        d[i] = dv
    return DenseCGA([g.degree for g in alg.generators], d)


def free_lie_dims(num_generators: int, top: int) -> list:
    """Dimensions of the free graded Lie algebra on odd degree-1 generators, degrees 1..top.

    Uses PBW: the enveloping algebra is the tensor algebra with Hilbert series
    ``1/(1 - k t)``, and equals the product of ``(1 + t^n)^{l_n}`` (n odd) and
    ``(1 - t^n)^{-l_n}`` (n even).
    """
    t = sympy.symbols("t")
    target = sympy.series(1 / (1 - num_generators * t), t, 0, top + 1).removeO()
    dims = []
    prod = sympy.Integer(1)
    for n in range(1, top + 1):
        cur = sympy.expand(sympy.series(prod, t, 0, top + 1).removeO())
        ln = int(target.coeff(t, n) - cur.coeff(t, n))
        dims.append(ln)
        factor = (1 + t ** n) ** ln if n % 2 else (1 - t ** n) ** (-ln)
        prod = sympy.expand(sympy.series(prod * factor, t, 0, top + 1).removeO())
    return dims


def dense_witness_exists(alg, d_values, target_values, i, top) -> bool:
    """Is there a degree-0 derivation mu lowering lower degree by ``i - 1`` with
    ``d mu - mu d = target`` on generators of degree ``<= top``?  Dense sympy solve.
    """
    dense = from_package(alg, d_values)
    n = len(alg.generators)
    lowers = [g.lower for g in alg.generators]

    def lower_of(m):
        return sum(lowers[k] * m[k] for k in range(n))

    unknowns = []
    for g in range(n):
        if alg.generators[g].degree > top - 1:
            continue
        low = lowers[g] - (i - 1)
        if low < 0:
            continue
        for m in dense.basis(alg.generators[g].degree):
            if lower_of(m) == low:
                unknowns.append((g, m))
    cols = []

    def to_dense(p):
        out = {}
        for m, c in p.items():
            e = [0] * n
            for k, x in m:
                e[k] = x
            out[tuple(e)] = Fraction(c)
        return out

    def apply_mu(mu, mono):
        word = dense.letters(mono)
        out = {}
        for pos, k in enumerate(word):
            if k not in mu:
                continue
            before = {tuple([0] * n): Fraction(1)}
            for a in word[:pos]:
                before = dense.mul(before, {dense.unit(a): Fraction(1)})
            after = {tuple([0] * n): Fraction(1)}
            for a in word[pos + 1:]:
                after = dense.mul(after, {dense.unit(a): Fraction(1)})
            for t, c in dense.mul(dense.mul(before, mu[k]), after).items():
                out[t] = out.get(t, 0) + c
        return {t: c for t, c in out.items() if c}

    for g, m in unknowns:
        mu = {g: {m: Fraction(1)}}
        col = {}
        for h in range(n):
            if alg.generators[h].degree > top - 1:
                continue
            v = {}
            if h == g:
                v = dense.apply_d(m)
            for mono, c in dense.d.get(h, {}).items():
                for t, x in apply_mu(mu, mono).items():
                    v[t] = v.get(t, 0) - c * x
            for t, c in v.items():
                if c:
                    col[(h, t)] = c
        cols.append(col)
    rhs = {}
    for h, v in target_values.items():
        if alg.generators[h].degree > top - 1:
            continue
        for t, c in to_dense(v).items():
            rhs[(h, t)] = c
    keys = sorted({k for c in cols for k in c} | set(rhs), key=repr)
    row = {k: r for r, k in enumerate(keys)}
    A = sympy.zeros(len(keys), len(cols))
    for j, c in enumerate(cols):
        for k, x in c.items():
            A[row[k], j] = sympy.Rational(x.numerator, x.denominator)
    b = sympy.zeros(len(keys), 1)
    for k, x in rhs.items():
        b[row[k], 0] = sympy.Rational(x.numerator, x.denominator)
    if not cols:
        return not any(rhs.values())
    return A.rank() == A.row_join(b).rank()


def all_monomial_words(degrees, deg):
    """Brute-force count of graded-commutative monomials of a degree (for basis checks)."""
    n = len(degrees)
    count = 0
    bounds = [(1 if d % 2 else deg // d) for d in degrees]
    for e in itertools.product(*[range(b + 1) for b in bounds]):
        if sum(x * d for x, d in zip(e, degrees)) == deg:
            count += 1
    return count
