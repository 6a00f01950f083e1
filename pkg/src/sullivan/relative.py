"""Relative models ``Lambda Z -> Lambda Z (x) Lambda X`` and fibration data.

A :class:`RelativeModel` stores the total algebra with the base generators
first; the base model is the restriction to those generators.  Fibrations
given as base + fiber + twisting data are assembled by
:class:`FibrationModel`, which also completes a partially given bigraded
fiber (and its classifying derivations) degree by degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .algebra import CDGA, AlgebraMap, Derivation, FreeCGA, Generator, check_differential, translate
from .cohomology import (
    AlgebraMorphismOnCohomology,
    CohomologyEngine,
    FiniteGradedAlgebra,
    induced_map,
    is_exact,
    NOT_EXACT,
    presentation,
    quotient_algebra,
)
from .linalg import add_scaled
from .models import (
    BigradedModel,
    FilteredExtender,
    FilteredModel,
    ModelError,
    Resolver,
    filtered_from_bigrading,
    filtered_model,
    split_by_shift,
)

Evaluable = Callable[[FreeCGA], dict]


@dataclass
class RelativeModel:
    """``(Lambda Z (x) Lambda X, D')`` over a filtered model of the base.

    ``algebra`` lists the ``nz`` base generators first.  ``d`` is the
    relative bigraded differential, ``D`` the full one, ``pi`` the map to
    ``target`` (a model of the total space).
    """

    algebra: FreeCGA
    nz: int
    d: dict
    D: dict
    cap: int
    base: FilteredModel | None = None
    pi: dict | None = None
    target: CDGA | None = None
    fiber_H: FiniteGradedAlgebra | None = None
    alpha: AlgebraMap | None = None  # base target -> total target

    @property
    def base_algebra(self) -> FreeCGA:
        return FreeCGA(self.algebra.generators[: self.nz], self.algebra.degree_cap)

    @property
    def fiber_generators(self) -> list:
        return list(self.algebra.generators[self.nz:])

    def total(self) -> CDGA:
        return CDGA(self.algebra, Derivation(self.algebra, 1, self.D), "total")

    def total_filtered(self) -> FilteredModel:
        pi = self.pi if self.pi is not None else {}
        return FilteredModel(self.algebra, dict(self.d), dict(self.D), dict(pi), self.target, self.cap)

    def inclusion(self) -> AlgebraMap:
        return AlgebraMap(self.base_algebra, self.algebra, {i: self.algebra.generator_poly(i) for i in range(self.nz)})

    def fiber(self) -> CDGA:
        """``(Lambda X, D'')``: the base generators set to zero."""
        alg = self.algebra
        nz = self.nz
        falg = FreeCGA(alg.generators[nz:], alg.degree_cap)
        shift = {i: i - nz for i in range(nz, len(alg))}
        vals = {}
        for i in range(nz, len(alg)):
            v = {m: c for m, c in self.D.get(i, {}).items() if all(g >= nz for g, _ in m)}
            if v:
                vals[i - nz] = translate(v, shift)
        return CDGA(falg, Derivation(falg, 1, vals), "fiber")

    def fiber_bigraded(self) -> CDGA:
        alg = self.algebra
        nz = self.nz
        falg = FreeCGA(alg.generators[nz:], alg.degree_cap)
        shift = {i: i - nz for i in range(nz, len(alg))}
        vals = {}
        for i in range(nz, len(alg)):
            v = {m: c for m, c in self.d.get(i, {}).items() if all(g >= nz for g, _ in m)}
            if v:
                vals[i - nz] = translate(v, shift)
        return CDGA(falg, Derivation(falg, 1, vals), "fiber")

    def projection(self) -> AlgebraMap:
        f = self.fiber()
        imgs = {i: f.algebra.generator_poly(i - self.nz) for i in range(self.nz, len(self.algebra))}
        return AlgebraMap(self.algebra, f.algebra, imgs)

    def check(self) -> list:
        problems = []
        if self.base is not None:
            for i in range(self.nz):
                if self.D.get(i, {}) != self.base.D.get(i, {}):
                    problems.append(f"D' differs from the base differential on {self.algebra.generators[i].name}")
        c = self.total()
        v = check_differential(c)
        if not v:
            problems.append(f"D'^2 != 0 on {v.generator}")
        for i in range(len(self.algebra)):
            parts = split_by_shift(self.algebra, i, self.D.get(i, {}))
            if any(s < 1 for s in parts) or parts.get(1, {}) != self.d.get(i, {}):
                problems.append(f"lower grading violated on {self.algebra.generators[i].name}")
        return problems


def fiber_model(r: RelativeModel) -> CDGA:
    return r.fiber()


# ---------------------------------------------------------------- from morphisms


def relative_bigraded_model(phi: AlgebraMorphismOnCohomology, cap: int) -> RelativeModel:
    """Relative bigraded model of ``phi: H -> H'`` through ``cap``."""
    base = Resolver(phi.source).model(cap)
    rho = {}
    for i, g in enumerate(base.algebra.generators):
        if g.lower == 0 and base.rho.get(i):
            rho[i] = phi.apply(g.degree, base.rho[i])
    res = Resolver(phi.target, base.algebra.generators, base.d.values, rho, prefix="x")
    total = res.model(cap)
    nz = len(base.algebra)
    return RelativeModel(total.algebra, nz, dict(total.d.values), dict(total.d.values), cap)


def relative_filtered_model(alpha: AlgebraMap, source: CDGA, target: CDGA, cap: int,
                            base: FilteredModel | None = None) -> RelativeModel:
    """Relative filtered model of a CDGA morphism ``alpha: source -> target``.

    The base filtered model is built (or taken as given), the relative
    bigraded model is extended over it, and ``D'``, ``pi'`` are lifted over
    the fiber generators with ``pi'|Z = alpha pi``.
    """
    if source.algebra.degree_cap < cap + 2:
        source = source.with_cap(cap + 2)
    if target.algebra.degree_cap < cap + 2:
        target = target.with_cap(cap + 2)
        alpha = AlgebraMap(source.algebra, target.algebra, alpha.images)
    base = base or filtered_model(source, cap)
    tengine = CohomologyEngine(target)
    Ht = presentation(target, cap + 1, tengine)
    zalg = base.algebra
    rho, pre_pi = {}, {}
    for i, g in enumerate(zalg.generators):
        img = alpha.apply(base.pi.get(i, {}))
        pre_pi[i] = img
        if g.lower == 0 and img and g.degree <= Ht.cap:
            rho[i] = tengine.slice(g.degree).coordinates(img)
    res = Resolver(Ht, zalg.generators, base.d, rho, prefix="x")
    bg = res.model(cap, collar=True)
    nz = len(zalg)
    if bg.algebra.generators[:nz] != zalg.generators:
        raise ModelError("base generators were not kept in front of the relative model")
    ext = FilteredExtender(target, Ht, Ht.reps, preset_D=base.D, preset_pi=pre_pi)
    f = ext.extend(bg, preset=range(nz))
    return RelativeModel(f.algebra, nz, f.d, f.D, cap, base, f.pi, target, alpha=alpha)


# ---------------------------------------------------------------- fibration data


class FibrationError(ModelError):
    pass


class FibrationModel:
    """Base CDGA, fiber data and twisting, assembled per truncation.

    ``fiber_generators`` / ``fiber_d`` describe the fiber.  When some fiber
    generator has positive lower degree the fiber is read as a partial
    bigraded model and completed to a resolution of ``Lambda V_0 / (d V_1)``.
    ``twists[x]`` is added to ``D(x)``; ``thetas[b][x]`` are values of a
    closed derivation ``theta_b`` of the fiber, extended to all fiber
    generators, contributing ``b * theta_b(x)``.
    """

    def __init__(self, base: CDGA, fiber_generators: Sequence[Generator], fiber_d: Mapping[str, Evaluable],
                 twists: Mapping[str, Evaluable] | None = None,
                 thetas: Mapping[str, Mapping[str, Evaluable]] | None = None, name: str = ""):
        self.base = base
        self.name = name
        self.fiber_generators = list(fiber_generators)
        self.fiber_d = dict(fiber_d)
        self.twists = dict(twists or {})
        self.thetas = {b: dict(v) for b, v in (thetas or {}).items()}
        names = [g.name for g in base.algebra.generators] + [g.name for g in self.fiber_generators]
        if len(set(names)) != len(names):
            raise FibrationError("base and fiber generator names overlap")
        for b in self.thetas:
            if b not in base.algebra.index:
                raise FibrationError(f"theta refers to unknown base generator {b}")
        self.bigraded_fiber = any(g.lower for g in self.fiber_generators)
        self._resolver: Resolver | None = None
        self.horizon = 0

    def prepare(self, cap: int) -> "FibrationModel":
        """Announce the largest truncation that will be requested."""
        self.horizon = max(self.horizon, cap)
        return self

    # ----- fiber -----

    def _raw_fiber(self, cap: int) -> CDGA:
        alg = FreeCGA(self.fiber_generators, cap)
        vals = {}
        for name, ev in self.fiber_d.items():
            vals[alg.index[name]] = ev(alg)
        return CDGA(alg, Derivation(alg, 1, vals), "fiber")

    def fiber_H0(self, cap: int) -> FiniteGradedAlgebra:
        """``Lambda V_0 / (d V_1)`` for a bigraded fiber, else the fiber's cohomology."""
        if not self.bigraded_fiber:
            return presentation(self._raw_fiber(cap + 1), cap)
        raw = self._raw_fiber(cap + 1)
        v0 = [g for g in self.fiber_generators if g.lower == 0]
        alg0 = FreeCGA(v0, cap + 1)
        keep = {raw.algebra.index[g.name]: k for k, g in enumerate(v0)}
        rels = []
        for i, g in enumerate(raw.algebra.generators):
            if g.lower == 1 and raw.d.values.get(i):
                rels.append(translate(raw.d.values[i], keep))
        return quotient_algebra(alg0, rels, cap)

    def fiber_cdga(self, n: int) -> CDGA:
        """The fiber model with generators of degree ``<= n``, enumerated through ``n + 1``."""
        if not self.bigraded_fiber:
            raw = self._raw_fiber(n + 1)
            return _truncate(raw, n)
        if self._resolver is None or self._resolver.H.cap < n + 1:
            top = max(n + 1, self.horizon + 1, 2)
            H = self.fiber_H0(top)
            raw = self._raw_fiber(top + 1)
            rho = {}
            for i, g in enumerate(raw.algebra.generators):
                if g.lower == 0 and g.degree <= top:
                    rho[i] = _quotient_coords(H, g.name)
            for i, g in enumerate(raw.algebra.generators):
                dv = raw.d.values.get(i, {})
                if dv and raw.algebra.lower_degrees(dv) != {g.lower - 1}:
                    raise FibrationError(f"fiber differential on {g.name} is not of lower degree {g.lower - 1}")
            self._resolver = Resolver(H, raw.algebra.generators, raw.d.values, rho, prefix="v")
        bg = self._resolver.model(n)
        return CDGA(bg.algebra, bg.d, "fiber")

    # ----- theta -----

    def _theta(self, fiber: CDGA, b: str) -> dict:
        """Values of ``theta_b`` on every fiber generator of ``fiber``."""
        q = 1 - self.base.algebra.generators[self.base.algebra.index[b]].degree
        alg = fiber.algebra
        given = {alg.index[x]: ev(alg) for x, ev in self.thetas[b].items() if x in alg.index}
        for x in self.thetas[b]:
            if x not in alg.index and x not in {g.name for g in self.fiber_generators}:
                raise FibrationError(f"theta refers to unknown fiber generator {x}")
        theta = Derivation(alg, q, {})
        engine = CohomologyEngine(fiber)
        sign = -1 if q % 2 else 1
        order = sorted(range(len(alg)), key=lambda i: (alg.degrees[i], i))
        for i in order:
            g = alg.generators[i]
            if g.degree + q < 0:
                continue
            dx = fiber.d.values.get(i, {})
            rhs = {m: sign * c for m, c in theta.apply(dx).items()} if dx and g.degree + 1 <= alg.degree_cap else {}
            if i in given:
                val = given[i]
                if g.degree + 1 <= alg.degree_cap - 0:
                    chk = fiber.d.apply(val)
                    add_scaled(chk, rhs, -1)
                    if chk:
                        raise FibrationError(f"theta_{b} is not closed at {g.name}")
            elif not rhs:
                val = {}
            else:
                prim = is_exact(fiber, rhs, engine)
                if prim is NOT_EXACT:
                    raise FibrationError(f"theta_{b} does not extend over {g.name}")
                val = prim
            if val:
                theta.values[i] = val
                theta._memo.clear()
        return theta.values

    # ----- total -----

    def total(self, n: int, check: bool = False) -> RelativeModel:
        """The relative model with generators of degree ``<= n`` (algebra through ``n + 1``).

        The lower grading of base and fiber is used as the bigrading of the
        total space when ``D`` respects it; ``check`` also verifies that the
        positive lower homology vanishes.  Otherwise ``d`` is left empty.
        """
        fiber = self.fiber_cdga(n)
        base = _truncate(self.base, n, collar=True)
        zg = list(base.algebra.generators)
        nz = len(zg)
        alg = FreeCGA(zg + list(fiber.algebra.generators), n + 1)
        shift = {i: i + nz for i in range(len(fiber.algebra))}
        vals: dict = {i: dict(v) for i, v in base.d.values.items()}
        for i, v in fiber.d.values.items():
            vals[i + nz] = translate(v, shift)
        for x, ev in self.twists.items():
            if x not in alg.index:
                if x in {g.name for g in self.fiber_generators} or x in self.base.algebra.index:
                    continue
                raise FibrationError(f"twist refers to unknown generator {x}")
            k = alg.index[x]
            if k < nz:
                raise FibrationError(f"twist must act on a fiber generator, not {x}")
            add_scaled(vals.setdefault(k, {}), ev(alg), 1)
        for b in sorted(self.thetas):
            if b not in alg.index:
                continue
            bi = alg.index[b]
            for i, v in self._theta(fiber, b).items():
                term = alg.multiply({((bi, 1),): Fraction(1)}, translate(v, shift))
                add_scaled(vals.setdefault(i + nz, {}), term, 1)
        vals = {i: v for i, v in vals.items() if v}
        c = CDGA(alg, Derivation(alg, 1, vals), self.name or "total")
        bad = check_differential(c)
        if not bad:
            raise FibrationError(f"total differential does not square to zero on {bad.generator}")
        try:
            f = filtered_from_bigrading(c, n, check=check)
            base_f = filtered_from_bigrading(base, n, check=check)
            d, D = f.d, f.D
        except ModelError:
            base_f = None
            d, D = {}, dict(vals)
        pi = {i: alg.generator_poly(i) for i in range(len(alg))}
        alpha = AlgebraMap(base.algebra, alg, {i: alg.generator_poly(i) for i in range(nz)})
        return RelativeModel(alg, nz, d, D, n, base_f, pi, c, alpha=alpha)

    def total_cdga(self, n: int) -> CDGA:
        return self.total(n).total()


def _truncate(c: CDGA, n: int, collar: bool = False) -> CDGA:
    """Generators of degree ``<= n``, enumerated through ``n + 1``.

    With ``collar`` the lower-degree-0 generators of degree ``n + 1`` are kept
    too (as cocycles), so linear twisting terms of fiber generators of degree
    ``n`` stay inside the truncation.
    """
    gens = c.algebra.generators
    keep = [i for i, g in enumerate(gens) if g.degree <= n or (collar and g.degree == n + 1 and g.lower == 0)]
    order = {i: k for k, i in enumerate(keep)}
    alg = FreeCGA([gens[i] for i in keep], n + 1)
    vals = {}
    for i in keep:
        v = c.d.values.get(i)
        if v and gens[i].degree <= n:
            vals[order[i]] = translate(v, order)
    return CDGA(alg, Derivation(alg, 1, vals), c.name)


def _quotient_coords(H: FiniteGradedAlgebra, name: str) -> dict:
    alg = H.source
    i = alg.index[name]
    return H.coordinates(alg.degrees[i], alg.generator_poly(i))


__all__ = [
    "FibrationError", "FibrationModel", "RelativeModel", "fiber_model",
    "relative_bigraded_model", "relative_filtered_model",
]
