"""Free graded-commutative algebras over Q, derivations and differentials.

A monomial is a tuple of ``(generator_index, exponent)`` pairs sorted by
index; odd generators appear with exponent 1 at most.  A polynomial is a dict
``monomial -> Fraction``.  Signs follow the Koszul rule: moving ``a`` past
``b`` costs ``(-1)^(|a||b|)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .linalg import add_scaled

ONE: tuple = ()


class AlgebraError(ValueError):
    pass


class DegreeOverflow(AlgebraError):
    """An operation would produce a degree beyond the algebra's cap."""


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    lower: int = 0

    def __post_init__(self):
        if self.degree < 2:
            raise AlgebraError(f"generator {self.name!r} has degree {self.degree}; need >= 2")
        if self.lower < 0:
            raise AlgebraError(f"generator {self.name!r} has negative lower degree")

    @property
    def parity(self) -> int:
        return self.degree % 2


def mono_key(m):
    return tuple((i, -e) for i, e in m)


class FreeCGA:
    """The free graded-commutative algebra on ``generators``, truncated at ``degree_cap``.

    Generator order is declaration order; monomials of one degree are listed
    lexicographically in that order (``a^2 < a*b < b^2``).
    """

    def __init__(self, generators: Sequence[Generator], degree_cap: int):
        self.generators = tuple(generators)
        self.degree_cap = degree_cap
        self.index = {}
        for i, g in enumerate(self.generators):
            if g.name in self.index:
                raise AlgebraError(f"duplicate generator name {g.name!r}")
            self.index[g.name] = i
        self.degrees = [g.degree for g in self.generators]
        self.lowers = [g.lower for g in self.generators]
        self.parities = [g.degree % 2 for g in self.generators]
        self._buckets = None
        self._products: dict = {}

    def __repr__(self):
        gens = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"FreeCGA([{gens}], cap={self.degree_cap})"

    def __len__(self):
        return len(self.generators)

    # ---------- construction helpers ----------

    def extended(self, new_generators: Iterable[Generator], degree_cap: int | None = None) -> "FreeCGA":
        alg = FreeCGA(self.generators + tuple(new_generators),
                      self.degree_cap if degree_cap is None else degree_cap)
        if alg.degree_cap == self.degree_cap and len(alg) == len(self):
            alg._buckets = self._buckets
        alg._products = self._products
        return alg

    def with_cap(self, degree_cap: int) -> "FreeCGA":
        return self.extended((), degree_cap)

    def gen(self, name: str) -> dict:
        return {((self.index[name], 1),): Fraction(1)}

    def generator_poly(self, i: int) -> dict:
        return {((i, 1),): Fraction(1)}

    def one(self) -> dict:
        return {ONE: Fraction(1)}

    # ---------- gradings ----------

    def mono_degree(self, m) -> int:
        return sum(self.degrees[i] * e for i, e in m)

    def mono_lower(self, m) -> int:
        return sum(self.lowers[i] * e for i, e in m)

    def mono_parity(self, m) -> int:
        return sum(self.parities[i] * e for i, e in m) % 2

    def degree_of(self, p: Mapping):
        """Total degree of a homogeneous nonzero polynomial (None for zero)."""
        degs = {self.mono_degree(m) for m in p}
        if len(degs) > 1:
            raise AlgebraError("polynomial is not homogeneous")
        return degs.pop() if degs else None

    def lower_degrees(self, p: Mapping) -> set:
        return {self.mono_lower(m) for m in p}

    # ---------- bases ----------

    def _enumerate(self):
        cap = self.degree_cap
        monos = [((), 0, 0)]
        for i, g in enumerate(self.generators):
            if g.degree > cap:
                continue
            grown = []
            for m, deg, low in monos:
                e = 1
                while deg + e * g.degree <= cap:
                    grown.append((m + ((i, e),), deg + e * g.degree, low + e * g.lower))
                    if g.parity:
                        break
                    e += 1
            monos.extend(grown)
        buckets: dict = {}
        for m, deg, low in monos:
            buckets.setdefault(deg, {}).setdefault(low, []).append(m)
        for by_low in buckets.values():
            for ms in by_low.values():
                ms.sort(key=mono_key)
        self._buckets = buckets

    def monomial_basis(self, degree: int, lower: int | None = None, max_lower: int | None = None) -> list:
        """Monomials of total degree ``degree`` in lexicographic order.

        ``lower`` selects an exact lower degree, ``max_lower`` an upper bound.
        """
        if degree > self.degree_cap:
            raise DegreeOverflow(f"degree {degree} exceeds cap {self.degree_cap}")
        if degree < 0:
            return []
        if self._buckets is None:
            self._enumerate()
        by_low = self._buckets.get(degree, {})
        if lower is not None:
            return list(by_low.get(lower, []))
        out = []
        for low in sorted(by_low):
            if max_lower is None or low <= max_lower:
                out.extend(by_low[low])
        out.sort(key=mono_key)
        return out

    def lower_range(self, degree: int) -> list:
        if degree > self.degree_cap:
            raise DegreeOverflow(f"degree {degree} exceeds cap {self.degree_cap}")
        if self._buckets is None:
            self._enumerate()
        return sorted(self._buckets.get(degree, {}))

    # ---------- products ----------

    def mul_mono(self, m1, m2):
        """Return ``(sign, monomial)``; sign 0 when an odd square appears."""
        if not m1:
            return 1, m2
        if not m2:
            return 1, m1
        key = (m1, m2)
        hit = self._products.get(key)
        if hit is not None:
            return hit
        par = self.parities
        sign = 1
        out = []
        i = j = 0
        # odd factors of m1 not yet passed, counted from the right
        odd_left = sum(1 for k, _ in m1 if par[k])
        while i < len(m1) or j < len(m2):
            if j == len(m2) or (i < len(m1) and m1[i][0] < m2[j][0]):
                if par[m1[i][0]]:
                    odd_left -= 1
                out.append(m1[i])
                i += 1
            elif i == len(m1) or m2[j][0] < m1[i][0]:
                if par[m2[j][0]] and odd_left % 2:
                    sign = -sign
                out.append(m2[j])
                j += 1
            else:
                k = m1[i][0]
                if par[k]:
                    result = (0, None)
                    self._products[key] = result
                    return result
                out.append((k, m1[i][1] + m2[j][1]))
                i += 1
                j += 1
        result = (sign, tuple(out))
        self._products[key] = result
        return result

    def multiply(self, p: Mapping, q: Mapping) -> dict:
        out: dict = {}
        cap = self.degree_cap
        for m1, c1 in p.items():
            d1 = self.mono_degree(m1)
            for m2, c2 in q.items():
                if d1 + self.mono_degree(m2) > cap:
                    raise DegreeOverflow(f"product degree exceeds cap {cap}")
                s, m = self.mul_mono(m1, m2)
                if s:
                    v = out.get(m, 0) + s * c1 * c2
                    if v:
                        out[m] = v
                    else:
                        out.pop(m, None)
        return out

    def mul_many(self, *polys) -> dict:
        out = self.one()
        for p in polys:
            out = self.multiply(out, p)
        return out

    def power(self, p: Mapping, e: int) -> dict:
        out = self.one()
        for _ in range(e):
            out = self.multiply(out, p)
        return out

    # ---------- formatting ----------

    def format_monomial(self, m) -> str:
        if not m:
            return "1"
        parts = []
        for i, e in m:
            name = self.generators[i].name
            parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts)

    def format(self, p: Mapping) -> str:
        if not p:
            return "0"
        out = []
        for m in sorted(p, key=lambda m: (self.mono_degree(m), mono_key(m))):
            c = Fraction(p[m])
            sign = "-" if c < 0 else "+"
            c = abs(c)
            body = self.format_monomial(m)
            if not m:
                term = str(c)
            elif c == 1:
                term = body
            else:
                term = f"{c}*{body}"
            out.append((sign, term))
        first_sign, first = out[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, term in out[1:]:
            text += f" {sign} {term}"
        return text


def restrict_polynomial(p: Mapping, keep: set) -> dict:
    """Drop every term that involves a generator index outside ``keep``."""
    return {m: c for m, c in p.items() if all(i in keep for i, _ in m)}


def translate(p: Mapping, index_map: Mapping) -> dict:
    """Re-index a polynomial between algebras; index_map must be order preserving."""
    return {tuple((index_map[i], e) for i, e in m): c for m, c in p.items()}


class Derivation:
    """A derivation of degree ``degree`` given by its values on generators.

    ``values`` maps generator indices to polynomials; missing generators map
    to zero.  ``lower_shift`` is the amount by which the lower degree drops,
    or None when the derivation is not homogeneous for the lower grading.
    Applying to a product uses ``theta(ab) = theta(a) b + (-1)^(q|a|) a theta(b)``.
    """

    def __init__(self, algebra: FreeCGA, degree: int, values: Mapping, lower_shift: int | None = None):
        self.algebra = algebra
        self.degree = degree
        self.lower_shift = lower_shift
        self.values = {i: dict(v) for i, v in values.items() if v}
        self._memo: dict = {}

    def __repr__(self):
        alg = self.algebra
        body = ", ".join(f"{alg.generators[i].name} -> {alg.format(v)}" for i, v in sorted(self.values.items()))
        return f"Derivation(deg={self.degree}, {{{body}}})"

    def on(self, name: str) -> dict:
        return self.values.get(self.algebra.index[name], {})

    def is_zero(self) -> bool:
        return not self.values

    def rebased(self, algebra: FreeCGA) -> "Derivation":
        """Same values viewed in an algebra that extends this one."""
        d = Derivation(algebra, self.degree, self.values, self.lower_shift)
        d._memo = self._memo
        return d

    def apply_monomial(self, m) -> dict:
        hit = self._memo.get(m)
        if hit is not None:
            return hit
        alg = self.algebra
        out: dict = {}
        if m:
            if alg.mono_degree(m) + self.degree > alg.degree_cap:
                raise DegreeOverflow(
                    f"applying a degree {self.degree} derivation to {alg.format_monomial(m)} exceeds cap"
                )
            odd_q = self.degree % 2
            prefix_parity = 0
            for pos, (i, e) in enumerate(m):
                val = self.values.get(i)
                if val:
                    left = m[:pos] + (((i, e - 1),) if e > 1 else ())
                    right = m[pos + 1:]
                    coef = e * (-1 if (odd_q and prefix_parity) else 1)
                    for vm, vc in val.items():
                        s1, t = alg.mul_mono(left, vm)
                        if not s1:
                            continue
                        s2, t = alg.mul_mono(t, right)
                        if not s2:
                            continue
                        v = out.get(t, 0) + coef * s1 * s2 * vc
                        if v:
                            out[t] = v
                        else:
                            out.pop(t, None)
                prefix_parity ^= (alg.parities[i] * e) & 1
        self._memo[m] = out
        return out

    def apply(self, p: Mapping) -> dict:
        out: dict = {}
        for m, c in p.items():
            add_scaled(out, self.apply_monomial(m), c)
        return out

    __call__ = apply


def apply_derivation(theta: Derivation, p: Mapping) -> dict:
    return theta.apply(p)


def derivation_bracket(a: Derivation, b: Derivation) -> Derivation:
    """Graded commutator ``[a, b] = a b - (-1)^(|a||b|) b a`` as a derivation."""
    if a.algebra.generators[: len(b.algebra)] != b.algebra.generators[: len(a.algebra)]:
        raise AlgebraError("derivations live on different algebras")
    alg = a.algebra if len(a.algebra) >= len(b.algebra) else b.algebra
    a2, b2 = a.rebased(alg), b.rebased(alg)
    sign = -1 if (a.degree * b.degree) % 2 else 1
    values = {}
    for i, g in enumerate(alg.generators):
        if g.degree + a.degree + b.degree > alg.degree_cap:
            continue
        x = a2.apply(b2.values.get(i, {}))
        add_scaled(x, b2.apply(a2.values.get(i, {})), -sign)
        if x:
            values[i] = x
    shift = None
    if a.lower_shift is not None and b.lower_shift is not None:
        shift = a.lower_shift + b.lower_shift
    return Derivation(alg, a.degree + b.degree, values, shift)


class AlgebraMap:
    """Multiplicative map from a free algebra, given by generator images."""

    def __init__(self, source: FreeCGA, target: FreeCGA, images: Mapping):
        self.source = source
        self.target = target
        self.images = {i: dict(v) for i, v in images.items()}
        self._memo: dict = {}

    def apply_monomial(self, m) -> dict:
        hit = self._memo.get(m)
        if hit is not None:
            return hit
        tgt = self.target
        out = tgt.one()
        for i, e in m:
            img = self.images.get(i, {})
            for _ in range(e):
                out = tgt.multiply(out, img)
                if not out:
                    break
            if not out:
                break
        self._memo[m] = out
        return out

    def apply(self, p: Mapping) -> dict:
        out: dict = {}
        for m, c in p.items():
            add_scaled(out, self.apply_monomial(m), c)
        return out

    __call__ = apply


@dataclass
class Violation:
    generator: str
    residue: dict
    kind: str = "d^2"

    def __bool__(self):
        return False


class WellFormed:
    def __bool__(self):
        return True

    def __repr__(self):
        return "WellFormed"


class CDGA:
    """A free CDGA ``(Lambda V, d)`` truncated at the algebra's degree cap."""

    def __init__(self, algebra: FreeCGA, differential: Derivation, name: str = ""):
        if differential.degree != 1:
            raise AlgebraError("a differential has degree +1")
        self.algebra = algebra
        self.d = differential if differential.algebra is algebra else differential.rebased(algebra)
        self.name = name

    @classmethod
    def from_values(cls, algebra: FreeCGA, values: Mapping, name: str = "") -> "CDGA":
        return cls(algebra, Derivation(algebra, 1, values), name)

    def __repr__(self):
        return f"CDGA({self.name or '?'}, {self.algebra!r})"

    def with_cap(self, degree_cap: int) -> "CDGA":
        alg = self.algebra.with_cap(degree_cap)
        return CDGA(alg, Derivation(alg, 1, self.d.values), self.name)

    def describe(self) -> list:
        alg = self.algebra
        return [f"d {g.name} = {alg.format(self.d.values.get(i, {}))}" for i, g in enumerate(alg.generators)]


def check_differential(c: CDGA, check_lower: bool = False):
    """Verify ``d^2 = 0`` on generators (within cap) and, optionally, lower homogeneity."""
    alg = c.algebra
    for i, g in enumerate(alg.generators):
        dv = c.d.values.get(i, {})
        for m in dv:
            if alg.mono_degree(m) != g.degree + 1:
                return Violation(g.name, dv, kind="degree")
        if check_lower and dv and alg.lower_degrees(dv) != {g.lower - 1}:
            return Violation(g.name, dv, kind="lower")
        if g.degree + 2 > alg.degree_cap:
            continue
        dd = c.d.apply(dv)
        if dd:
            return Violation(g.name, dd)
    return WellFormed()
