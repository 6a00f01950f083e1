"""Bigraded, filtered and minimal models, built degree by degree up to a cap.

Conventions for a model truncated at ``cap = N``: generators live in degrees
``<= N``, the underlying free algebra is enumerated through degree ``N + 1``,
and every property (quasi-isomorphism, vanishing of positive lower homology)
is asserted in degrees ``<= N``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import CDGA, AlgebraError, AlgebraMap, Derivation, FreeCGA, Generator, mono_key
from .cohomology import (
    CohomologyEngine,
    FiniteGradedAlgebra,
    induced_map,
    presentation,
)
from .linalg import NO_SOLUTION, EchelonSpace, add_scaled, column_kernel, solve_columns

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")


class ModelError(AlgebraError):
    pass


class LiftError(ModelError):
    """No admissible perturbation/lift exists for a generator."""

    def __init__(self, generator: str, detail: str = ""):
        super().__init__(f"cannot extend the filtered model at generator {generator} {detail}".strip())
        self.generator = generator


def _unique_name(wanted: str, taken: set, fallback: str) -> str:
    name = wanted if wanted and _IDENT.match(wanted) and wanted not in taken else fallback
    while name in taken:
        name += "'"
    taken.add(name)
    return name


@dataclass
class BigradedModel:
    """A multiplicative resolution ``rho: (Lambda V, d) -> (H, 0)`` valid through ``cap``."""

    algebra: FreeCGA
    d: Derivation
    H: FiniteGradedAlgebra
    rho: dict  # generator index -> coordinates in H (lower-degree-0 generators only)
    cap: int

    @property
    def cdga(self) -> CDGA:
        return CDGA(self.algebra, self.d)

    def generators_by_lower(self) -> dict:
        out: dict = {}
        for g in self.algebra.generators:
            out.setdefault(g.lower, {}).setdefault(g.degree, []).append(g.name)
        return out

    def dims(self) -> dict:
        """``(degree, lower) -> number of generators``."""
        out: dict = {}
        for g in self.algebra.generators:
            out[(g.degree, g.lower)] = out.get((g.degree, g.lower), 0) + 1
        return out


class Resolver:
    """Inductive construction of a bigraded model (multiplicative resolution).

    Generators may be supplied up front (a partial model, or the base of a
    relative model); the resolver then only adds what is missing.  Work is
    done degree by degree: in degree ``n`` it first adds lower-degree-0
    generators for the indecomposables of ``H^n`` not yet hit, then for
    ``p = 1, 2, ...`` adds generators of lower degree ``p`` killing the
    homology ``H_{p-1}`` in degree ``n + 1``.
    """

    def __init__(self, H: FiniteGradedAlgebra, generators: Sequence[Generator] = (),
                 d_values: Mapping | None = None, rho: Mapping | None = None,
                 prefix: str = "v"):
        self.H = H
        self.gens = list(generators)
        self.dvals = {i: dict(v) for i, v in (d_values or {}).items() if v}
        self.rho = {i: dict(v) for i, v in (rho or {}).items()}
        self.prefix = prefix
        self.names = {g.name for g in self.gens}
        self.a_done = 1
        self.b_done = 1
        self._rho_memo: dict = {}
        for i, g in enumerate(self.gens):
            dv = self.dvals.get(i)
            if g.lower == 0 and dv:
                raise ModelError(f"generator {g.name} has lower degree 0 but nonzero differential")

    # ----- helpers -----

    def algebra(self, cap: int) -> FreeCGA:
        return FreeCGA(self.gens, cap)

    def _rho_mono(self, alg: FreeCGA, m) -> dict:
        hit = self._rho_memo.get(m)
        if hit is not None:
            return hit
        H = self.H
        deg, out = 0, {0: Fraction(1)}
        for i, e in m:
            img = self.rho.get(i, {})
            for _ in range(e):
                out = H.mul(deg, out, alg.degrees[i], img)
                deg += alg.degrees[i]
                if not out:
                    break
            if not out:
                break
        self._rho_memo[m] = out
        return out

    def _add(self, name_hint: str, degree: int, lower: int, k: int, dval: dict | None, rho: dict | None):
        name = _unique_name(name_hint, self.names, f"{self.prefix}{lower}_{degree}_{k}")
        self.gens.append(Generator(name, degree, lower))
        i = len(self.gens) - 1
        if dval:
            self.dvals[i] = dval
        if rho is not None:
            self.rho[i] = rho

    # ----- the two steps -----

    def _step_generators(self, n: int):
        if n > self.H.cap:
            raise ModelError(f"target algebra known only through degree {self.H.cap}")
        alg = self.algebra(max(n, 2))
        space = EchelonSpace(track=False)
        for m in alg.monomial_basis(n, lower=0):
            space.add(self._rho_mono(alg, m))
        k = 0
        for j in range(self.H.dim(n)):
            if space.add({j: Fraction(1)})[0]:
                self._add(self.H.basis[n][j], n, 0, k, None, {j: Fraction(1)})
                k += 1

    def _step_relations(self, n: int):
        if n + 1 > self.H.cap:
            raise ModelError(f"target algebra known only through degree {self.H.cap}")
        alg = self.algebra(n + 2)
        d = Derivation(alg, 1, self.dvals)
        new = []
        # p = 1: kernel of rho on lower degree 0, modulo d of lower degree 1
        basis0 = alg.monomial_basis(n + 1, lower=0)
        idx0 = {m: k for k, m in enumerate(basis0)}
        cols = [self._rho_mono(alg, m) for m in basis0]
        space = EchelonSpace(track=False)
        for m in alg.monomial_basis(n, lower=1):
            img = d.apply_monomial(m)
            if img:
                space.add({idx0[t]: c for t, c in img.items()})
        for z in column_kernel(cols):
            if space.add(z)[0]:
                new.append((1, {basis0[k]: c for k, c in z.items()}))
        # p >= 2: kill positive lower homology in degree n + 1
        lows = alg.lower_range(n + 1)
        for p in range(2, (max(lows) if lows else 0) + 2):
            cyc_basis = alg.monomial_basis(n + 1, lower=p - 1)
            if not cyc_basis:
                continue
            idx = {m: k for k, m in enumerate(cyc_basis)}
            below = {m: k for k, m in enumerate(alg.monomial_basis(n + 2, lower=p - 2))}
            cols = [{below[t]: c for t, c in d.apply_monomial(m).items()} for m in cyc_basis]
            space = EchelonSpace(track=False)
            for m in alg.monomial_basis(n, lower=p):
                img = d.apply_monomial(m)
                if img:
                    space.add({idx[t]: c for t, c in img.items()})
            for z in column_kernel(cols):
                if space.add(z)[0]:
                    new.append((p, {cyc_basis[k]: c for k, c in z.items()}))
        counters: dict = {}
        for p, z in new:
            k = counters.get(p, 0)
            counters[p] = k + 1
            self._add("", n, p, k, z, None)

    def extend_to(self, cap: int) -> "Resolver":
        for n in range(2, cap + 1):
            if n > self.a_done:
                self._step_generators(n)
                self.a_done = n
            if n < cap and n > self.b_done:
                self._step_relations(n)
                self.b_done = n
        return self

    def model(self, cap: int, collar: bool = False) -> BigradedModel:
        """Snapshot: all generators of degree ``<= cap`` (extending first if needed).

        With ``collar`` the snapshot also holds the generators of degree
        ``cap`` killing positive lower homology in degree ``cap + 1`` and the
        closed generators of degree ``cap + 1``.  Filtered models need them
        as linear perturbation terms for generators just below the cap.
        """
        if collar:
            self.extend_to(cap + 1)
            keep = [i for i, g in enumerate(self.gens)
                    if g.degree <= cap or (g.degree == cap + 1 and g.lower == 0)]
        else:
            self.extend_to(cap)
            keep = [i for i, g in enumerate(self.gens) if g.degree <= cap]
        if keep != list(range(len(keep))):
            # generators are appended in degree order except for supplied ones
            order = {i: k for k, i in enumerate(keep)}
            gens = [self.gens[i] for i in keep]
            from .algebra import translate
            dvals = {order[i]: translate(self.dvals[i], order) for i in keep if i in self.dvals}
            rho = {order[i]: self.rho[i] for i in keep if i in self.rho}
        else:
            gens = self.gens[: len(keep)]
            dvals = {i: v for i, v in self.dvals.items() if i < len(keep)}
            rho = {i: v for i, v in self.rho.items() if i < len(keep)}
        alg = FreeCGA(gens, cap + 1)
        return BigradedModel(alg, Derivation(alg, 1, dvals, 1), self.H, rho, cap)


def bigraded_model(H: FiniteGradedAlgebra, cap: int | None = None, complete: bool = False) -> BigradedModel:
    """Halperin-Stasheff bigraded model of ``H`` valid through ``cap``.

    With ``complete`` every generator of degree ``<= cap`` of the full model
    is present, including those killing lower homology in degree ``cap + 1``
    (needs ``H`` through ``cap + 1``).
    """
    cap = H.cap if cap is None else cap
    if cap + (1 if complete else 0) > H.cap:
        raise ModelError(f"cap {cap} exceeds the degrees known for H ({H.cap})")
    res = Resolver(H)
    if complete:
        res.extend_to(cap + 1)
    return res.model(cap)


def lower_homology(model: BigradedModel, n: int, p: int) -> int:
    """``dim H_p^n (Lambda V, d)``."""
    alg, d = model.algebra, model.d
    basis = alg.monomial_basis(n, lower=p)
    if not basis:
        return 0
    above = {m: k for k, m in enumerate(alg.monomial_basis(n + 1, lower=p - 1))} if p >= 1 else {}
    cols = [{above[t]: c for t, c in d.apply_monomial(m).items()} for m in basis] if p >= 1 else [{} for _ in basis]
    z = column_kernel(cols)
    idx = {m: k for k, m in enumerate(basis)}
    space = EchelonSpace(track=False)
    for m in alg.monomial_basis(n - 1, lower=p + 1):
        img = d.apply_monomial(m)
        if img:
            space.add({idx[t]: c for t, c in img.items()})
    b = len(space)
    return len(z) - b


def verify_bigraded(model: BigradedModel) -> list:
    """Problems found (empty when the model is a resolution through its cap)."""
    problems = []
    alg, d = model.algebra, model.d
    for i, g in enumerate(alg.generators):
        dv = d.values.get(i, {})
        if dv and alg.lower_degrees(dv) != {g.lower - 1}:
            problems.append(f"d({g.name}) is not of lower degree {g.lower - 1}")
        if g.lower > 0 and model.rho.get(i):
            problems.append(f"rho({g.name}) should vanish")
    for n in range(model.cap + 1):
        for p in alg.lower_range(n) if n <= alg.degree_cap else []:
            if p > 0 and lower_homology(model, n, p):
                problems.append(f"H_{p}^{n} != 0")
    # rho_* on lower degree 0 is an isomorphism
    res = Resolver(model.H, model.algebra.generators, model.d.values, model.rho)
    for n in range(model.cap + 1):
        basis0 = alg.monomial_basis(n, lower=0)
        idx0 = {m: k for k, m in enumerate(basis0)}
        space = EchelonSpace(track=False)
        for m in alg.monomial_basis(n - 1, lower=1) if n >= 1 else []:
            img = d.apply_monomial(m)
            if img:
                space.add({idx0[t]: c for t, c in img.items()})
        image = EchelonSpace(track=False)
        for m in basis0:
            image.add(res._rho_mono(alg, m))
        kernel = column_kernel([res._rho_mono(alg, m) for m in basis0])
        if len(image) != model.H.dim(n):
            problems.append(f"rho_* not onto in degree {n}")
        if any(space.add(z)[0] for z in kernel):
            problems.append(f"rho_* not injective in degree {n}")
    return problems


# ---------------------------------------------------------------- filtered models


def split_by_shift(alg: FreeCGA, gen_index: int, value: Mapping) -> dict:
    """Group the terms of a generator's value by how much they lower the lower degree."""
    low = alg.lowers[gen_index]
    out: dict = {}
    for m, c in value.items():
        out.setdefault(low - alg.mono_lower(m), {})[m] = c
    return out


@dataclass
class FilteredModel:
    """``(Lambda V, D) -> A`` with ``D = d + d_2 + d_3 + ...`` over a bigraded ``(Lambda V, d)``."""

    algebra: FreeCGA
    d: dict            # generator index -> value of the bigraded differential
    D: dict            # generator index -> value of the full differential
    pi: dict           # generator index -> image polynomial in the target
    target: CDGA
    cap: int
    H: FiniteGradedAlgebra | None = None
    transcript: list = field(default_factory=list)

    @property
    def cdga(self) -> CDGA:
        return CDGA(self.algebra, Derivation(self.algebra, 1, self.D))

    @property
    def bigraded_cdga(self) -> CDGA:
        return CDGA(self.algebra, Derivation(self.algebra, 1, self.d, 1))

    def pi_map(self) -> AlgebraMap:
        return AlgebraMap(self.algebra, self.target.algebra, self.pi)

    def deformation(self) -> dict:
        """``i -> Derivation d_i`` for every ``i >= 2`` with ``d_i != 0``."""
        parts: dict = {}
        for i in range(len(self.algebra)):
            for s, v in split_by_shift(self.algebra, i, self.D.get(i, {})).items():
                if s == 1:
                    continue
                if s < 1:
                    raise ModelError(
                        f"D({self.algebra.generators[i].name}) has a term lowering the lower degree by {s}")
                parts.setdefault(s, {})[i] = v
        return {s: Derivation(self.algebra, 1, vals, s) for s, vals in sorted(parts.items())}

    def check_shift_one(self) -> bool:
        for i in range(len(self.algebra)):
            if split_by_shift(self.algebra, i, self.D.get(i, {})).get(1, {}) != self.d.get(i, {}):
                return False
        return True


class FilteredExtender:
    """Extends ``D`` and ``pi`` over the generators of a bigraded model.

    For a generator ``v`` of lower degree ``p >= 1`` it solves, as one linear
    system, for ``xi`` in ``(Lambda V)_{<= p-2}`` and
    ``a = pi(v)`` in the target with ``D(dv + xi) = 0`` and
    ``pi(dv + xi) = d_A a``.  Unknowns for ``a`` are ordered first, so a
    deformation term is only introduced when the lift alone fails.  Linear
    terms in ``xi`` can be forced (a product with a generator of positive
    lower degree may represent an indecomposable class), so filtered models
    need not be minimal.  Generators are handled by increasing lower degree.
    """

    def __init__(self, target: CDGA, H: FiniteGradedAlgebra, reps: Mapping,
                 preset_D: Mapping | None = None, preset_pi: Mapping | None = None,
                 lenient_above: int | None = None):
        self.target = target
        # generators above this degree keep D = d (and no pi) when no lift exists
        self.lenient_above = lenient_above
        self.unlifted: list = []
        self.H = H
        self.reps = reps  # degree -> representative cocycles of H's basis in the target
        self.D = {i: dict(v) for i, v in (preset_D or {}).items()}
        self.pi = {i: dict(v) for i, v in (preset_pi or {}).items()}
        self.done = set(i for i in set(self.D) | set(self.pi))
        self._tslices: dict = {}

    def extend(self, model: BigradedModel, preset: Sequence[int] = ()) -> FilteredModel:
        alg = model.algebra
        self.done |= set(preset)
        Dder = Derivation(alg, 1, self.D)
        pimap = AlgebraMap(alg, self.target.algebra, self.pi)
        # D and pi on lower degree p only involve lower degrees < p
        order = sorted(range(len(alg)), key=lambda i: (alg.lowers[i], alg.degrees[i], i))
        tgt = self.target
        for i in order:
            if i in self.done:
                continue
            g = alg.generators[i]
            dv = model.d.values.get(i, {})
            if g.lower == 0:
                coords = model.rho.get(i, {})
                a: dict = {}
                for j, c in coords.items():
                    add_scaled(a, self.reps[g.degree][j], c)
                D_v, pi_v = dict(dv), a
            else:
                try:
                    D_v, pi_v = self._lift(alg, Dder, pimap, i, dv)
                except LiftError:
                    if self.lenient_above is None or g.degree <= self.lenient_above:
                        raise
                    D_v, pi_v = dict(dv), {}
                    self.unlifted.append(i)
            self.D[i] = D_v
            self.pi[i] = pi_v
            if D_v:
                Dder.values[i] = D_v
            if pi_v:
                pimap.images[i] = pi_v
            self.done.add(i)
        H = model.H
        return FilteredModel(alg, dict(model.d.values), {i: v for i, v in self.D.items() if v},
                             {i: v for i, v in self.pi.items() if v}, tgt, model.cap, H)

    def _lift(self, alg, Dder, pimap, i, dv):
        g = alg.generators[i]
        n, p = g.degree, g.lower
        tgt = self.target
        talg = tgt.algebra
        a_basis = talg.monomial_basis(n)
        columns = []
        for k, t in enumerate(a_basis):
            img = tgt.d.apply_monomial(t)
            columns.append((("a", k), {("A", s): -c for s, c in img.items()}))
        xi_basis = alg.monomial_basis(n + 1, max_lower=p - 2)
        # at the top degree D^2 lands beyond the cap; only the lift is imposed
        top = n + 2 > alg.degree_cap
        for k, m in enumerate(xi_basis):
            col = {} if top else {("Y", s): c for s, c in Dder.apply_monomial(m).items()}
            for s, c in pimap.apply_monomial(m).items():
                col[("A", s)] = c
            columns.append((("x", k), col))
        rhs = {} if top else {("Y", s): -c for s, c in Dder.apply(dv).items()}
        for s, c in pimap.apply(dv).items():
            rhs[("A", s)] = -c
        sol = solve_columns(columns, rhs)
        if sol is NO_SOLUTION:
            raise LiftError(g.name, f"(degree {n}, lower {p})")
        a = {a_basis[k]: c for (kind, k), c in sol.items() if kind == "a"}
        xi = {xi_basis[k]: c for (kind, k), c in sol.items() if kind == "x"}
        D_v = dict(dv)
        add_scaled(D_v, xi, 1)
        return D_v, a


def filtered_model(c: CDGA, cap: int, bg: BigradedModel | None = None,
                   engine: CohomologyEngine | None = None) -> FilteredModel:
    """A filtered model of ``c`` over a bigraded model of ``H(c)`` (built if not given).

    The result carries auxiliary generators of degree ``cap + 1`` (see
    :meth:`Resolver.model`); ``c`` must be enumerated through ``cap + 2``.
    """
    if bg is not None:
        if c.algebra.degree_cap < cap + 2:
            c = c.with_cap(cap + 2)
        return FilteredExtender(c, bg.H, bg.H.reps).extend(bg)
    # Built one degree further, so every generator of degree <= cap satisfies
    # all identities (its correction terms may need generators of degree
    # cap + 1 of any lower degree), then cut back.
    if c.algebra.degree_cap < cap + 3:
        c = c.with_cap(cap + 3)
    engine = engine or CohomologyEngine(c)
    H = presentation(c, cap + 2, engine)
    bg = Resolver(H).model(cap + 1, collar=True)
    full = FilteredExtender(c, H, H.reps, lenient_above=cap).extend(bg)
    return _cut(full, cap)


def _cut(f: FilteredModel, cap: int) -> FilteredModel:
    """Generators of degree ``<= cap + 1``; differentials kept on degrees ``<= cap``."""
    from .algebra import translate

    old = f.algebra
    keep = [i for i, g in enumerate(old.generators) if g.degree <= cap + 1]
    order = {i: k for k, i in enumerate(keep)}
    alg = FreeCGA([old.generators[i] for i in keep], cap + 1)

    def move(vals):
        out = {}
        for i in keep:
            v = vals.get(i)
            if v and old.degrees[i] <= cap:
                out[order[i]] = translate(v, order)
        return out

    pi = {order[i]: dict(f.pi[i]) for i in keep if f.pi.get(i)}
    return FilteredModel(alg, move(f.d), move(f.D), pi, f.target, cap, f.H)


def filtered_from_bigrading(c: CDGA, cap: int, check: bool = True) -> FilteredModel:
    """Read a CDGA whose generators carry lower degrees as a filtered model of itself.

    The bigraded differential is the part of ``D`` lowering the lower degree
    by exactly one; ``pi`` is the identity.  With ``check`` the positive lower
    homology of ``(Lambda V, d)`` is verified to vanish through ``cap``.
    """
    alg = c.algebra
    dvals, Dvals = {}, {}
    for i in range(len(alg)):
        v = c.d.values.get(i, {})
        parts = split_by_shift(alg, i, v)
        if any(s < 1 for s in parts):
            raise ModelError(f"D({alg.generators[i].name}) does not lower the lower degree")
        if parts.get(1):
            dvals[i] = parts[1]
        if v:
            Dvals[i] = dict(v)
    if check:
        probe = BigradedModel(alg, Derivation(alg, 1, dvals, 1), None, {}, cap)  # type: ignore[arg-type]
        for n in range(cap + 1):
            for p in alg.lower_range(n):
                if p > 0 and lower_homology(probe, n, p):
                    raise ModelError(f"positive lower homology H_{p}^{n} does not vanish")
    pi = {i: alg.generator_poly(i) for i in range(len(alg))}
    return FilteredModel(alg, dvals, Dvals, pi, c, cap)


def verify_filtered(f: FilteredModel, engine: CohomologyEngine | None = None) -> list:
    problems = []
    alg = f.algebra
    D = Derivation(alg, 1, f.D)
    for i, g in enumerate(alg.generators):
        if g.degree + 2 <= alg.degree_cap and D.apply(f.D.get(i, {})):
            problems.append(f"D^2({g.name}) != 0")
    try:
        f.deformation()
    except ModelError as exc:
        problems.append(str(exc))
    if not f.check_shift_one():
        problems.append("lower-shift-one part of D differs from d")
    pim = f.pi_map()
    tgt = f.target
    for i, g in enumerate(alg.generators):
        if g.degree + 1 > min(alg.degree_cap, tgt.algebra.degree_cap):
            continue
        lhs = pim.apply(f.D.get(i, {}))
        add_scaled(lhs, tgt.d.apply(f.pi.get(i, {})), -1)
        if lhs:
            problems.append(f"pi D != d_A pi on {g.name}")
    if not problems:
        m = induced_map(pim, f.cdga, tgt, f.cap, target_engine=engine)
        for n in range(f.cap + 1):
            if m.rank(n) != m.source.dim(n) or m.rank(n) != m.target.dim(n):
                problems.append(f"pi is not a quasi-isomorphism in degree {n}")
    return problems


@dataclass
class MinimalModel:
    cdga: CDGA
    pi: AlgebraMap
    cap: int


def minimal_model(c: CDGA, cap: int, engine: CohomologyEngine | None = None) -> MinimalModel:
    """Minimal Sullivan model of a simply connected ``c`` through ``cap``.

    Classical construction: in each degree ``n`` add closed generators for the
    cokernel of ``H^n``, then generators of degree ``n`` killing the kernel
    of ``H^{n+1}``.  With no generators of degree one the differential is
    automatically decomposable.
    """
    if c.algebra.degree_cap < cap + 1:
        raise ModelError(f"the input algebra must be enumerated through degree {cap + 1}")
    engine = engine or CohomologyEngine(c)
    tgt = c.algebra
    gens: list = []
    dvals: dict = {}
    images: dict = {}
    names: set = set()
    for n in range(2, cap + 1):
        # cokernel in degree n
        alg = FreeCGA(gens, n + 1)
        d = Derivation(alg, 1, dvals)
        phi = AlgebraMap(alg, tgt, images)
        sl = engine.slice(n)
        space = EchelonSpace(track=False)
        for z in _cocycles(alg, d, n):
            space.add(sl.coordinates(phi.apply(z)))
        k = 0
        for j in range(sl.dim):
            if space.add({j: Fraction(1)})[0]:
                name = _unique_name(sl.label(j), names, f"v{n}_{k}")
                gens.append(Generator(name, n))
                images[len(gens) - 1] = dict(sl.reps[j])
                k += 1
        if n == cap:
            break
        # kernel in degree n + 1
        alg = FreeCGA(gens, n + 2)
        d = Derivation(alg, 1, dvals)
        phi = AlgebraMap(alg, tgt, images)
        sl = engine.slice(n + 1)
        basis = alg.monomial_basis(n + 1)
        idx = {m: i for i, m in enumerate(basis)}
        zs = _cocycles(alg, d, n + 1)
        kernel = column_kernel([sl.coordinates(phi.apply(z)) for z in zs])
        bspace = EchelonSpace(track=False)
        for m in alg.monomial_basis(n):
            img = d.apply_monomial(m)
            if img:
                bspace.add({idx[t]: x for t, x in img.items()})
        for kv in kernel:
            z: dict = {}
            for i, x in kv.items():
                add_scaled(z, zs[i], x)
            if bspace.add({idx[t]: x for t, x in z.items()})[0]:
                _, prim = sl.split(phi.apply(z))
                name = _unique_name("", names, f"v{n}_{k}")
                gens.append(Generator(name, n))
                dvals[len(gens) - 1] = z
                images[len(gens) - 1] = prim
                k += 1
    alg = FreeCGA(gens, cap + 1)
    mc = CDGA(alg, Derivation(alg, 1, dvals))
    return MinimalModel(mc, AlgebraMap(alg, tgt, images), cap)


def _cocycles(alg: FreeCGA, d: Derivation, n: int) -> list:
    basis = alg.monomial_basis(n)
    above = {m: i for i, m in enumerate(alg.monomial_basis(n + 1))}
    cols = [{above[t]: x for t, x in d.apply_monomial(m).items()} for m in basis]
    return [{basis[i]: x for i, x in v.items()} for v in column_kernel(cols)]


def is_minimal(c: CDGA) -> bool:
    return all(all(len(m) > 1 or m[0][1] > 1 for m in v) for v in c.d.values.values())


def sorted_generators(alg: FreeCGA):
    return sorted(range(len(alg)), key=lambda i: (alg.degrees[i], alg.lowers[i], i))


def format_model_lines(alg: FreeCGA, values: Mapping) -> list:
    lines = []
    for i in sorted_generators(alg):
        g = alg.generators[i]
        lines.append(f"{g.name} (deg {g.degree}, lower {g.lower}): d = {alg.format(values.get(i, {}))}")
    return lines


__all__ = [
    "BigradedModel", "FilteredModel", "FilteredExtender", "LiftError", "MinimalModel", "ModelError",
    "Resolver", "bigraded_model", "filtered_from_bigrading", "filtered_model", "format_model_lines",
    "is_minimal", "lower_homology", "minimal_model", "split_by_shift", "verify_bigraded", "verify_filtered",
    "mono_key",
]
