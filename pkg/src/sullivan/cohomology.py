"""Degreewise cohomology of free CDGAs and finite graded algebras.

Cohomology is materialized per degree: a basis of representative cocycles
(the lexicographically first complement of the coboundaries inside the
cocycles), plus structure constants for the cup product.  Truncated graded
algebras given by generators and relations use the same machinery with the
ideal playing the role of the coboundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .algebra import CDGA, AlgebraError, AlgebraMap, FreeCGA
from .linalg import EchelonSpace, add_scaled, column_kernel


class NotExact:
    def __repr__(self):
        return "NotExact"

    def __bool__(self):
        return False


NOT_EXACT = NotExact()


class CohomologyError(AlgebraError):
    pass


@dataclass
class CohomologyClass:
    degree: int
    coordinates: dict
    representative: dict


class DegreeSlice:
    """Cocycles, coboundaries and a chosen basis of classes in one degree.

    Coboundaries are tagged ``('B', k)`` with ``k`` the index of the source
    monomial one degree down, so reductions also produce primitives.
    """

    def __init__(self, algebra: FreeCGA, degree: int, basis: list, space: EchelonSpace,
                 reps: list, below: list):
        self.algebra = algebra
        self.degree = degree
        self.basis = basis
        self.index = {m: k for k, m in enumerate(basis)}
        self.space = space
        self.reps = reps
        self.below = below

    @property
    def dim(self) -> int:
        return len(self.reps)

    def vec(self, p: Mapping) -> dict:
        try:
            return {self.index[m]: Fraction(c) for m, c in p.items()}
        except KeyError as exc:
            raise CohomologyError(f"element is not of degree {self.degree}") from exc

    def poly(self, v: Mapping) -> dict:
        return {self.basis[k]: c for k, c in v.items()}

    def split(self, p: Mapping):
        residual, comb = self.space.reduce(self.vec(p))
        if residual:
            raise CohomologyError("element is not closed")
        coords = {t[1]: c for t, c in comb.items() if t[0] == "H"}
        prim = {self.below[t[1]]: c for t, c in comb.items() if t[0] == "B"}
        return coords, prim

    def coordinates(self, p: Mapping) -> dict:
        return self.split(p)[0]

    def representative(self, coords: Mapping) -> dict:
        out: dict = {}
        for j, c in coords.items():
            add_scaled(out, self.reps[j], c)
        return out

    def label(self, j: int) -> str:
        rep = self.reps[j]
        if len(rep) == 1:
            (m, c), = rep.items()
            if c == 1:
                return self.algebra.format_monomial(m)
        return f"h{self.degree}_{j}"


def _slice_from_cdga(c: CDGA, n: int) -> DegreeSlice:
    alg = c.algebra
    if n + 1 > alg.degree_cap:
        raise CohomologyError(f"degree {n} needs cap >= {n + 1}")
    basis = alg.monomial_basis(n)
    index = {m: k for k, m in enumerate(basis)}
    below = alg.monomial_basis(n - 1) if n >= 1 else []
    space = EchelonSpace()
    for k, m in enumerate(below):
        img = c.d.apply_monomial(m)
        if img:
            space.add({index[t]: x for t, x in img.items()}, ("B", k))
    above = {m: k for k, m in enumerate(alg.monomial_basis(n + 1))}
    cols = [{above[t]: x for t, x in c.d.apply_monomial(m).items()} for m in basis]
    reps = []
    for z in column_kernel(cols):
        independent, _, _ = space.add(z, ("H", len(reps)))
        if independent:
            reps.append({basis[k]: x for k, x in z.items()})
    return DegreeSlice(alg, n, basis, space, reps, below)


class CohomologyEngine:
    """Caches degree slices of one CDGA."""

    def __init__(self, c: CDGA):
        self.cdga = c
        self._slices: dict = {}

    def slice(self, n: int) -> DegreeSlice:
        s = self._slices.get(n)
        if s is None:
            s = self._slices[n] = _slice_from_cdga(self.cdga, n)
        return s

    def betti(self, top: int) -> list:
        return [self.slice(n).dim for n in range(top + 1)]


def cocycles(c: CDGA, n: int) -> list:
    alg = c.algebra
    basis = alg.monomial_basis(n)
    above = {m: k for k, m in enumerate(alg.monomial_basis(n + 1))}
    cols = [{above[t]: x for t, x in c.d.apply_monomial(m).items()} for m in basis]
    return [{basis[k]: x for k, x in z.items()} for z in column_kernel(cols)]


def cohomology(c: CDGA, n: int):
    s = _slice_from_cdga(c, n)
    classes = [CohomologyClass(n, {j: Fraction(1)}, rep) for j, rep in enumerate(s.reps)]
    return s.dim, classes


def is_exact(c: CDGA, z: Mapping, engine: CohomologyEngine | None = None):
    """A primitive ``x`` with ``d x = z``, or ``NOT_EXACT``."""
    if not z:
        return {}
    alg = c.algebra
    n = alg.degree_of(z)
    if c.d.apply(z):
        raise CohomologyError("is_exact needs a closed element")
    s = (engine or CohomologyEngine(c)).slice(n)
    coords, prim = s.split(z)
    if coords:
        return NOT_EXACT
    return prim


class FiniteGradedAlgebra:
    """A connected graded-commutative algebra truncated at degree ``cap``.

    ``basis[n]`` lists class labels; ``products[(a, i, b, j)]`` is the
    coordinate dict (degree ``a + b``) of the product of basis element ``i``
    of degree ``a`` with basis element ``j`` of degree ``b``.
    """

    def __init__(self, cap: int, basis: Mapping, products: Mapping, reps: Mapping | None = None,
                 source: FreeCGA | None = None):
        self.cap = cap
        self.basis = {n: list(basis.get(n, [])) for n in range(cap + 1)}
        self.products = dict(products)
        self.reps = dict(reps or {})
        self.source = source
        if len(self.basis[0]) != 1:
            raise CohomologyError("graded algebra must be connected (dim 0 = 1)")
        self._indec = None
        self.slices: dict = {}

    def coordinates(self, n: int, p: Mapping) -> dict:
        """Coordinates of a closed element of ``source`` in degree ``n``."""
        if n not in self.slices:
            raise CohomologyError("no source slices attached to this algebra")
        return self.slices[n].coordinates(p) if p else {}

    def __repr__(self):
        dims = [self.dim(n) for n in range(self.cap + 1)]
        return f"FiniteGradedAlgebra(cap={self.cap}, dims={dims})"

    def dim(self, n: int) -> int:
        if n < 0 or n > self.cap:
            return 0
        return len(self.basis[n])

    def dims(self) -> list:
        return [self.dim(n) for n in range(self.cap + 1)]

    def top_degree(self) -> int:
        return max((n for n in range(self.cap + 1) if self.dim(n)), default=0)

    def mul(self, a: int, x: Mapping, b: int, y: Mapping) -> dict:
        if a + b > self.cap or not x or not y:
            return {}
        if a == 0:
            return {k: x.get(0, 0) * v for k, v in y.items() if x.get(0, 0) * v}
        if b == 0:
            return {k: y.get(0, 0) * v for k, v in x.items() if y.get(0, 0) * v}
        out: dict = {}
        for i, xi in x.items():
            for j, yj in y.items():
                add_scaled(out, self.products.get((a, i, b, j), {}), xi * yj)
        return out

    def indecomposables(self) -> dict:
        """Per degree, the basis indices chosen as algebra generators."""
        if self._indec is None:
            out = {}
            for n in range(1, self.cap + 1):
                space = EchelonSpace(track=False)
                for a in range(1, n):
                    for i in range(self.dim(a)):
                        for j in range(self.dim(n - a)):
                            space.add(self.products.get((a, i, n - a, j), {}))
                chosen = []
                for k in range(self.dim(n)):
                    if space.add({k: Fraction(1)})[0]:
                        chosen.append(k)
                if chosen:
                    out[n] = chosen
            self._indec = out
        return self._indec

    def generator_degrees(self) -> list:
        return sorted(n for n, ks in self.indecomposables().items() for _ in ks)

    def check_axioms(self) -> list:
        """Graded commutativity and associativity violations (empty when sound)."""
        bad = []
        for (a, i, b, j), v in self.products.items():
            w = self.products.get((b, j, a, i), {})
            s = -1 if (a * b) % 2 else 1
            if {k: s * x for k, x in w.items()} != v:
                bad.append(("commutativity", a, i, b, j))
        for a in range(1, self.cap + 1):
            for b in range(1, self.cap + 1 - a):
                for c in range(1, self.cap + 1 - a - b):
                    for i in range(self.dim(a)):
                        for j in range(self.dim(b)):
                            for k in range(self.dim(c)):
                                left = self.mul(a + b, self.mul(a, {i: 1}, b, {j: 1}), c, {k: 1})
                                right = self.mul(a, {i: 1}, b + c, self.mul(b, {j: 1}, c, {k: 1}))
                                if left != right:
                                    bad.append(("associativity", a, i, b, j, c, k))
        return bad


def _quotient(alg: FreeCGA, cap: int, slice_of: Callable[[int], DegreeSlice]) -> FiniteGradedAlgebra:
    slices = {n: slice_of(n) for n in range(cap + 1)}
    basis = {n: [s.label(j) for j in range(s.dim)] for n, s in slices.items()}
    reps = {n: list(s.reps) for n, s in slices.items()}
    products = {}
    for a in range(1, cap + 1):
        for b in range(1, cap + 1 - a):
            target = slices[a + b]
            for i, ri in enumerate(reps[a]):
                for j, rj in enumerate(reps[b]):
                    prod = alg.multiply(ri, rj)
                    coords = target.coordinates(prod) if prod else {}
                    if coords:
                        products[(a, i, b, j)] = coords
    out = FiniteGradedAlgebra(cap, basis, products, reps, source=alg)
    out.slices = slices
    return out


def presentation(c: CDGA, cap: int | None = None, engine: CohomologyEngine | None = None) -> FiniteGradedAlgebra:
    """The cohomology algebra ``H(c)`` through degree ``cap`` (default: algebra cap - 1)."""
    if cap is None:
        cap = c.algebra.degree_cap - 1
    engine = engine or CohomologyEngine(c)
    return _quotient(c.algebra, cap, engine.slice)


def quotient_algebra(alg: FreeCGA, relations: Sequence[Mapping], cap: int) -> FiniteGradedAlgebra:
    """``Lambda V / (relations)`` through degree ``cap``; relations must be homogeneous."""
    rels = []
    for r in relations:
        if r:
            rels.append((alg.degree_of(r), r))

    def slice_of(n):
        basis = alg.monomial_basis(n)
        index = {m: k for k, m in enumerate(basis)}
        space = EchelonSpace()
        for rdeg, r in rels:
            if rdeg > n:
                continue
            for m in alg.monomial_basis(n - rdeg):
                prod = alg.multiply(r, {m: Fraction(1)})
                if prod:
                    space.add({index[t]: x for t, x in prod.items()}, ("I", 0))
        reps = []
        for k, m in enumerate(basis):
            if space.add({k: Fraction(1)}, ("H", len(reps)))[0]:
                reps.append({m: Fraction(1)})
        return DegreeSlice(alg, n, basis, space, reps, [])

    return _quotient(alg.with_cap(max(cap, alg.degree_cap)), cap, slice_of)


@dataclass
class AlgebraMorphismOnCohomology:
    source: FiniteGradedAlgebra
    target: FiniteGradedAlgebra
    matrices: dict = field(default_factory=dict)  # degree -> list of target coordinate dicts

    def apply(self, n: int, x: Mapping) -> dict:
        out: dict = {}
        cols = self.matrices.get(n, [])
        for i, c in x.items():
            add_scaled(out, cols[i], c)
        return out

    def rank(self, n: int) -> int:
        space = EchelonSpace(track=False)
        for col in self.matrices.get(n, []):
            space.add(col)
        return len(space)


class ChainMapError(CohomologyError):
    def __init__(self, generator: str, residue: dict):
        super().__init__(f"not a chain map at generator {generator}")
        self.generator = generator
        self.residue = residue


def check_chain_map(phi: AlgebraMap, source: CDGA, target: CDGA):
    alg = source.algebra
    for i, g in enumerate(alg.generators):
        if g.degree + 1 > min(alg.degree_cap, target.algebra.degree_cap):
            continue
        lhs = phi.apply(source.d.values.get(i, {}))
        rhs = target.d.apply(phi.images.get(i, {}))
        add_scaled(lhs, rhs, -1)
        if lhs:
            raise ChainMapError(g.name, lhs)
    return True


def induced_map(phi: AlgebraMap, source: CDGA, target: CDGA, cap: int,
                source_engine: CohomologyEngine | None = None,
                target_engine: CohomologyEngine | None = None) -> AlgebraMorphismOnCohomology:
    """Matrices of ``phi*`` on the chosen cohomology bases, degrees 0..cap."""
    check_chain_map(phi, source, target)
    se = source_engine or CohomologyEngine(source)
    te = target_engine or CohomologyEngine(target)
    hs = presentation(source, cap, se)
    ht = presentation(target, cap, te)
    mats = {}
    for n in range(cap + 1):
        tslice = te.slice(n)
        mats[n] = [tslice.coordinates(phi.apply(rep)) for rep in se.slice(n).reps]
    return AlgebraMorphismOnCohomology(hs, ht, mats)


def surjective_up_to(m: AlgebraMorphismOnCohomology, cap: int):
    """True, or the first degree where the map misses part of the target."""
    for n in range(cap + 1):
        if m.rank(n) < m.target.dim(n):
            return n
    return True
