"""Formality through the obstructions of a filtered model.

For a filtered model ``D = d + d_i + d_{i+1} + ...`` the lowest perturbation
``d_i`` is a cycle for ``[d, -]`` and its class ``o_i`` in the homology of the
derivation complex is the obstruction.  When ``d_i = [d, mu]`` the
automorphism ``exp(mu)`` conjugates it away and the next stage is examined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra import CDGA, AlgebraMap, Derivation, FreeCGA, derivation_bracket
from .cohomology import FiniteGradedAlgebra, induced_map, presentation, surjective_up_to
from .linalg import NO_SOLUTION, add_scaled, column_kernel, solve_columns
from .models import FilteredModel, ModelError, filtered_from_bigrading, filtered_model


class InvariantViolation(ModelError):
    """An identity that must hold by construction failed."""


def _fmt_values(alg: FreeCGA, values: dict) -> dict:
    return {alg.generators[i].name: alg.format(v) for i, v in sorted(values.items()) if v}


@dataclass
class Stage:
    index: int
    truncation: int
    perturbation: dict      # generator name -> value of d_i
    witness: dict | None    # generator name -> value of mu (None if o_i != 0)

    def to_dict(self) -> dict:
        return {"stage": self.index, "truncation": self.truncation,
                "perturbation": self.perturbation, "witness": self.witness}


@dataclass
class FormalUpTo:
    cap: int
    transcript: list = field(default_factory=list)
    formal = True

    def to_dict(self) -> dict:
        return {"verdict": "FormalUpTo", "cap": self.cap,
                "transcript": [s.to_dict() for s in self.transcript]}

    def __str__(self):
        return f"FormalUpTo({self.cap})"


@dataclass
class NonFormal:
    stage: int
    truncation: int
    obstruction: dict       # representative of o_i: generator name -> value
    transcript: list = field(default_factory=list)
    formal = False

    def to_dict(self) -> dict:
        return {"verdict": "NonFormal", "stage": self.stage, "truncation": self.truncation,
                "obstruction": self.obstruction,
                "transcript": [s.to_dict() for s in self.transcript]}

    def __str__(self):
        return f"NonFormal(stage {self.stage}, detected at truncation {self.truncation})"


def lowest_perturbation(f: FilteredModel, below_top: bool = False):
    """``(i, d_i)`` for the lowest nonzero perturbation, or ``(None, None)``.

    With ``below_top`` only generators of degree ``< cap`` are considered.
    """
    parts = f.deformation()
    eq = set(_equation_generators(f)) if below_top else None
    for i, der in parts.items():
        if i < 2:
            raise InvariantViolation(f"perturbation lowers the lower degree by only {i}")
        if eq is not None and not any(h in eq for h in der.values):
            continue
        return i, der
    return None, None


def _equation_generators(f: FilteredModel) -> list:
    # generators below the top degree, where every identity is imposed
    return [i for i, g in enumerate(f.algebra.generators) if g.degree <= f.cap - 1]


def solve_witness(f: FilteredModel, i: int, di: Derivation):
    """``mu`` of degree 0 lowering the lower degree by ``i - 1`` with ``[d, mu] = d_i``.

    Returns generator values or ``NO_SOLUTION``.  Equations are imposed on
    generators of degree ``< cap``.
    """
    alg = f.algebra
    d = Derivation(alg, 1, f.d)
    eq_gens = _equation_generators(f)
    eq_set = set(eq_gens)
    users: dict = {}
    for h in eq_gens:
        for m in f.d.get(h, {}):
            for g, _ in m:
                users.setdefault(g, set()).add(h)
    columns = []
    for g in eq_gens:
        low = alg.lowers[g] - (i - 1)
        if low < 0:
            continue
        for m in alg.monomial_basis(alg.degrees[g], lower=low):
            col: dict = {}
            for t, c in d.apply_monomial(m).items():
                col[(g, t)] = c
            mu = Derivation(alg, 0, {g: {m: Fraction(1)}})
            for h in users.get(g, ()):
                for t, c in mu.apply(f.d[h]).items():
                    k = (h, t)
                    v = col.get(k, 0) - c
                    if v:
                        col[k] = v
                    else:
                        col.pop(k, None)
            columns.append(((g, m), col))
    target = {(h, t): c for h, v in di.values.items() if h in eq_set for t, c in v.items()}
    sol = solve_columns(columns, target)
    if sol is NO_SOLUTION:
        return NO_SOLUTION
    out: dict = {}
    for (g, m), c in sol.items():
        out.setdefault(g, {})[m] = c
    return out


def check_closed(f: FilteredModel, di: Derivation):
    """``[d, d_i] = 0`` on generators of degree ``< cap``; raises otherwise."""
    d = Derivation(f.algebra, 1, f.d, 1)
    br = derivation_bracket(d, di)
    for h, v in br.values.items():
        if f.algebra.generators[h].degree <= f.cap - 1 and v:
            raise InvariantViolation(f"[d, d_i] does not vanish on {f.algebra.generators[h].name}")


def _exp(alg: FreeCGA, mu: Derivation, p: dict, sign: int = 1) -> dict:
    out = dict(p)
    term = dict(p)
    k = 0
    while term:
        k += 1
        term = {m: c * sign / k for m, c in mu.apply(term).items()}
        add_scaled(out, term, 1)
    return out


def gauge(f: FilteredModel, mu_values: dict) -> FilteredModel:
    """Conjugate by ``phi = exp(mu)``: ``D' = phi D phi^-1`` and ``pi' = pi phi^-1``."""
    alg = f.algebra
    mu = Derivation(alg, 0, mu_values)
    D = Derivation(alg, 1, f.D)
    pi = f.pi_map()
    phi_img, inv_img = {}, {}
    for g in range(len(alg)):
        x = alg.generator_poly(g)
        phi_img[g] = _exp(alg, mu, x, 1)
        inv_img[g] = _exp(alg, mu, x, -1)
    phi = AlgebraMap(alg, alg, phi_img)
    newD, newpi = {}, {}
    for g, gen in enumerate(alg.generators):
        if gen.degree + 1 <= alg.degree_cap:
            v = phi.apply(D.apply(inv_img[g]))
            if v:
                newD[g] = v
        w = pi.apply(inv_img[g])
        if w:
            newpi[g] = w
    out = FilteredModel(alg, dict(f.d), newD, newpi, f.target, f.cap, f.H, list(f.transcript))
    if not out.check_shift_one():
        raise InvariantViolation("gauge changed the bigraded differential")
    return out


def obstruction_loop(f: FilteredModel):
    """Run the stages on one truncated filtered model.

    Returns ``(verdict_or_None, transcript, final_model)``; the verdict is a
    :class:`NonFormal` when some ``o_i`` does not vanish.
    """
    transcript = []
    alg = f.algebra
    seen = set()
    while True:
        i, di = lowest_perturbation(f, below_top=True)
        if i is None:
            return None, transcript, f
        if i in seen:
            raise InvariantViolation(f"stage {i} did not clear after gauging")
        seen.add(i)
        check_closed(f, di)
        mu = solve_witness(f, i, di)
        pert = _fmt_values(alg, {h: v for h, v in di.values.items() if alg.degrees[h] <= f.cap - 1})
        if mu is NO_SOLUTION:
            transcript.append(Stage(i, f.cap, pert, None))
            return NonFormal(i, f.cap, pert, transcript), transcript, f
        transcript.append(Stage(i, f.cap, pert, _fmt_values(alg, mu)))
        f = gauge(f, mu)


def decide(models: Callable[[int], FilteredModel], cap: int, start: int = 2):
    """Run the obstruction loop on truncations ``start..cap``; stop at the first obstruction.

    A non-vanishing obstruction at a truncation is reported as is (the
    classes are independent of the choices made, so larger truncations
    cannot remove it).
    """
    transcript: list = []
    for n in range(max(start, 2), cap + 1):
        f = models(n)
        if n < cap and not any(g.lower >= 2 and g.degree <= n - 1 for g in f.algebra.generators):
            continue
        verdict, transcript, _ = obstruction_loop(f)
        if verdict is not None:
            return verdict
    return FormalUpTo(cap, transcript)


def model_source(c: CDGA, use_bigrading: bool | None = None) -> Callable[[int], FilteredModel]:
    """Truncation -> filtered model of ``c``.

    With ``use_bigrading`` (default: when some generator has positive lower
    degree) the lower grading of ``c`` is taken as a filtered model of itself
    if it validates; otherwise the model is rebuilt from the cohomology.
    """
    if use_bigrading is None:
        use_bigrading = any(g.lower for g in c.algebra.generators)

    def build(n: int) -> FilteredModel:
        if use_bigrading:
            keep = [g for g in c.algebra.generators if g.degree <= n + 1]
            if len(keep) == len(c.algebra.generators) or all(
                    g.degree <= n + 1 for g in c.algebra.generators):
                sub = c.with_cap(n + 1)
            else:
                sub = truncate_cdga(c, n + 1)
            try:
                return filtered_from_bigrading(sub, n)
            except ModelError:
                pass
        sub = c.with_cap(n + 2)
        return filtered_model(sub, n)

    return build


def truncate_cdga(c: CDGA, top: int) -> CDGA:
    """Sub-CDGA on generators of degree ``<= top`` enumerated through ``top``."""
    keep = [i for i, g in enumerate(c.algebra.generators) if g.degree <= top]
    order = {i: k for k, i in enumerate(keep)}
    alg = FreeCGA([c.algebra.generators[i] for i in keep], top)
    from .algebra import translate
    vals = {}
    for i in keep:
        v = c.d.values.get(i)
        if v and c.algebra.degrees[i] + 1 <= top:
            vals[order[i]] = translate(v, order)
    return CDGA(alg, Derivation(alg, 1, vals), c.name)


def decide_formality(c: CDGA, cap: int, use_bigrading: bool | None = None, early_exit: bool = True):
    src = model_source(c, use_bigrading)
    return decide(src, cap, start=2 if early_exit else cap)


# ---------------------------------------------------------------- negative derivations


@dataclass
class NegativeDerivations:
    cap: int
    down_to: int
    dims: dict  # degree q (negative) -> dimension of the space of derivations

    @property
    def none_found(self) -> bool:
        return not any(self.dims.values())

    def to_dict(self) -> dict:
        return {"cap": self.cap, "down_to": self.down_to,
                "dims": {str(q): k for q, k in sorted(self.dims.items(), reverse=True)},
                "verdict": "none" if self.none_found else "found"}


def derivations_of_degree(H: FiniteGradedAlgebra, q: int, cap: int | None = None) -> list:
    """Basis of the derivations of degree ``q`` of ``H`` through ``cap``.

    Unknowns are the full matrices ``H^k -> H^{k+q}`` (``k >= 1``); the
    Leibniz rule is imposed on every pair of basis elements with total
    degree within the cap.  Vectors are keyed by ``(k, i, j)``.
    """
    cap = H.cap if cap is None else cap
    unknowns = []
    for k in range(1, cap + 1):
        if 0 <= k + q <= cap:
            for i in range(H.dim(k)):
                for j in range(H.dim(k + q)):
                    unknowns.append((k, i, j))
    pos = {u: n for n, u in enumerate(unknowns)}
    one = Fraction(1)
    rows = []
    for a in range(1, cap + 1):
        for b in range(a, cap + 1 - a):
            n = a + b + q
            if n < 0:
                continue
            sign = -1 if (q * a) % 2 else 1
            for i in range(H.dim(a)):
                for j in range(i if a == b else 0, H.dim(b)):
                    # delta(x y) - delta(x) y - (-1)^(q a) x delta(y), one row per coordinate
                    eq: dict = {}
                    for r, c in H.products.get((a, i, b, j), {}).items():
                        for t in range(H.dim(n)):
                            eq.setdefault(t, {})[pos[(a + b, r, t)]] = c
                    for s_ in range(H.dim(a + q)):
                        for t, c in H.mul(a + q, {s_: one}, b, {j: one}).items():
                            add_scaled(eq.setdefault(t, {}), {pos[(a, i, s_)]: c}, -1)
                    for s_ in range(H.dim(b + q)):
                        for t, c in H.mul(a, {i: one}, b + q, {s_: one}).items():
                            add_scaled(eq.setdefault(t, {}), {pos[(b, j, s_)]: c}, -sign)
                    rows.extend(v for v in eq.values() if v)
    # kernel of the constraint matrix: columns are unknowns
    cols = [dict() for _ in unknowns]
    for r, row in enumerate(rows):
        for u, c in row.items():
            cols[u][r] = c
    return [{unknowns[u]: c for u, c in v.items()} for v in column_kernel(cols)]


def negative_derivations(H: FiniteGradedAlgebra, down_to: int | None = None,
                         cap: int | None = None) -> NegativeDerivations:
    cap = H.cap if cap is None else cap
    if down_to is None:
        down_to = max(H.generator_degrees(), default=0)
    dims = {}
    for q in range(-1, -down_to - 1, -1):
        dims[q] = len(derivations_of_degree(H, q, cap))
    return NegativeDerivations(cap, down_to, dims)


def cohomology_of(c: CDGA, cap: int) -> FiniteGradedAlgebra:
    return presentation(c.with_cap(max(c.algebra.degree_cap, cap + 1)), cap)


__all__ = [
    "Certificate", "DerivationSlice", "PreconditionError", "ReplayReport", "TNCZReport",
    "bracket_with_d", "derivation_slice", "map_formality_certificate", "module_derivation_replay",
    "tncz_analyze",
    "FormalUpTo", "InvariantViolation", "NegativeDerivations", "NonFormal", "Stage",
    "check_closed", "cohomology_of", "decide", "decide_formality", "derivations_of_degree", "gauge",
    "lowest_perturbation", "model_source", "negative_derivations", "obstruction_loop",
    "solve_witness", "truncate_cdga",
]


# ---------------------------------------------------------------- derivation complexes


@dataclass
class DerivationSlice:
    """Basis of ``Der_p^q`` (values on generators of degree ``<= top``) and the matrix of ``[d, -]``.

    A derivation in ``Der_p^q`` raises the degree by ``q`` and lowers the
    lower degree by ``p``.  Basis elements are pairs ``(generator, monomial)``;
    ``matrix`` maps each to its image in ``Der_{p+1}^{q+1}`` keyed by
    ``(generator, monomial)`` on generators of degree ``<= top - 1``.
    """

    algebra: FreeCGA
    p: int
    q: int
    top: int
    basis: list
    matrix: list

    def derivation(self, coeffs: dict) -> Derivation:
        vals: dict = {}
        for k, c in coeffs.items():
            g, m = self.basis[k]
            add_scaled(vals.setdefault(g, {}), {m: c}, 1)
        return Derivation(self.algebra, self.q, vals, self.p)


def derivation_slice(alg: FreeCGA, d: dict, p: int, q: int, top: int | None = None) -> DerivationSlice:
    """``Der_p^q`` of ``(alg, d)`` with the exact matrix of ``D theta = d theta - (-1)^q theta d``."""
    if top is None:
        top = alg.degree_cap - q - 1
    dd = Derivation(alg, 1, d)
    basis = []
    for g, gen in enumerate(alg.generators):
        if gen.degree > top or gen.lower - p < 0 or gen.degree + q < 0:
            continue
        for m in alg.monomial_basis(gen.degree + q, lower=gen.lower - p):
            basis.append((g, m))
    rows = []
    for g, m in basis:
        rows.append(bracket_with_d(dd, Derivation(alg, q, {g: {m: Fraction(1)}}), top - 1))
    return DerivationSlice(alg, p, q, top, basis, rows)


def bracket_with_d(d: Derivation, theta: Derivation, top: int) -> dict:
    """``[d, theta]`` on generators of degree ``<= top``, keyed by ``(generator, monomial)``."""
    alg = theta.algebra
    sign = -1 if theta.degree % 2 else 1
    out: dict = {}
    for h, gen in enumerate(alg.generators):
        if gen.degree > top:
            continue
        v = d.apply(theta.values.get(h, {}))
        add_scaled(v, theta.apply(d.values.get(h, {})), -sign)
        for t, c in v.items():
            out[(h, t)] = c
    return out


# ---------------------------------------------------------------- fibrations


@dataclass
class TNCZReport:
    cap: int
    surjective: bool
    failing_degree: int | None
    total_betti: list
    fiber_betti: list
    ranks: list

    def to_dict(self) -> dict:
        return {"cap": self.cap, "tncz": self.surjective, "failing_degree": self.failing_degree,
                "total_betti": self.total_betti, "fiber_betti": self.fiber_betti, "ranks": self.ranks,
                "fiber_model_is_filtered_model": self.surjective}


def tncz_analyze(r, cap: int) -> TNCZReport:
    """Surjectivity of ``H(total) -> H(fiber model)`` in degrees ``<= cap``."""
    total = r.total()
    fiber = r.fiber()
    if total.algebra.degree_cap < cap + 1:
        raise ModelError(f"relative model enumerated only through degree {total.algebra.degree_cap}")
    m = induced_map(r.projection(), total, fiber, cap)
    res = surjective_up_to(m, cap)
    ranks = [m.rank(n) for n in range(cap + 1)]
    return TNCZReport(cap, res is True, None if res is True else res, m.source.dims(), m.target.dims(), ranks)


@dataclass
class Certificate:
    certified: bool
    reason: str
    cap: int
    base_verdict: object = None
    total_verdict: object = None
    differences: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"verdict": "Certified" if self.certified else "NotCertified", "reason": self.reason,
                "cap": self.cap,
                "base": self.base_verdict.to_dict() if self.base_verdict is not None else None,
                "total": self.total_verdict.to_dict() if self.total_verdict is not None else None,
                "differences": self.differences}


def map_formality_certificate(r) -> Certificate:
    """Sufficient condition for formality of the map modeled by ``r``.

    Requires formal base and total space.  The base is gauge-normalized, the
    relative filtered model is re-extended over it, and the map is certified
    when the resulting ``D'`` equals the relative bigraded ``d'``.
    """
    from .models import FilteredExtender, BigradedModel

    if r.base is None or r.target is None:
        return Certificate(False, "relative model has no filtered structure", r.cap)
    bv, _, base_norm = obstruction_loop(r.base)
    if bv is not None:
        return Certificate(False, "base is not formal", r.cap, bv)
    tv, _, _ = obstruction_loop(r.total_filtered())
    if tv is not None:
        return Certificate(False, "total space is not formal (precondition fails)", r.cap,
                           FormalUpTo(r.cap), tv)
    alg = r.algebra
    nz = r.nz
    alpha = r.alpha if r.alpha is not None else AlgebraMap(base_norm.target.algebra, r.target.algebra,
                                                            {k: alg.generator_poly(k) for k in range(nz)})
    preset_D = {k: dict(base_norm.D.get(k, {})) for k in range(nz)}
    preset_pi = {k: alpha.apply(base_norm.pi.get(k, {})) for k in range(nz)}
    for k, g in enumerate(alg.generators):
        if k >= nz and g.lower == 0:
            preset_D[k] = dict(r.D.get(k, {}))
            preset_pi[k] = dict((r.pi or {}).get(k, {}))
    ext = FilteredExtender(r.target, None, {}, preset_D=preset_D, preset_pi=preset_pi)
    bg = BigradedModel(alg, Derivation(alg, 1, r.d, 1), None, {}, r.cap)  # type: ignore[arg-type]
    f = ext.extend(bg, preset=list(preset_D))
    diffs = {}
    for k, g in enumerate(alg.generators):
        if g.degree <= r.cap - 1 and f.D.get(k, {}) != r.d.get(k, {}):
            diffs[g.name] = alg.format(f.D.get(k, {}))
    if diffs:
        return Certificate(False, "relative filtered differential differs from the bigraded one", r.cap,
                           FormalUpTo(r.cap), FormalUpTo(r.cap), diffs)
    return Certificate(True, "relative filtered model coincides with the relative bigraded model",
                       r.cap, FormalUpTo(r.cap), FormalUpTo(r.cap))


@dataclass
class ReplayReport:
    stage: int
    cap: int
    restriction_agrees: bool
    base_perturbation: dict
    upstairs_exact: bool
    downstairs_exact: bool
    pulled_back_witness: bool
    total_obstruction: str
    fiber_halperin: bool

    @property
    def consistent(self) -> bool:
        return self.restriction_agrees and (self.downstairs_exact or not self.upstairs_exact)

    def to_dict(self) -> dict:
        return {"stage": self.stage, "cap": self.cap, "restriction_agrees": self.restriction_agrees,
                "base_perturbation": self.base_perturbation, "upstairs_exact": self.upstairs_exact,
                "downstairs_exact": self.downstairs_exact, "pulled_back_witness": self.pulled_back_witness,
                "total_obstruction": self.total_obstruction, "fiber_halperin": self.fiber_halperin,
                "consistent": self.consistent}


class PreconditionError(ModelError):
    pass


def _relative_witness(alg: FreeCGA, nz: int, d_total: dict, d_base: dict, i: int, target: dict, top: int):
    """Solve ``d' mu - mu d = target`` for ``mu`` in ``Der_{i-1}^0(Lambda Z, Lambda Z (x) Lambda X)``.

    ``mu`` is given by values on the base generators of degree ``<= top``
    with values anywhere in the total algebra (``allowed`` restricts them).
    """
    dd = Derivation(alg, 1, d_total)
    users: dict = {}
    for h in range(nz):
        if alg.degrees[h] > top:
            continue
        for m in d_base.get(h, {}):
            for g, _ in m:
                users.setdefault(g, set()).add(h)
    columns = []
    for g in range(nz):
        if alg.degrees[g] > top:
            continue
        low = alg.lowers[g] - (i - 1)
        if low < 0:
            continue
        for m in alg.monomial_basis(alg.degrees[g], lower=low):
            col: dict = {}
            for t, c in dd.apply_monomial(m).items():
                col[(g, t)] = c
            mu = Derivation(alg, 0, {g: {m: Fraction(1)}})
            for h in users.get(g, ()):
                for t, c in mu.apply(d_base[h]).items():
                    add_scaled(col, {(h, t): c}, -1)
            columns.append(((g, m), col))
    tgt = {(h, t): c for h, v in target.items() if alg.degrees[h] <= top for t, c in v.items()}
    sol = solve_columns(columns, tgt)
    if sol is NO_SOLUTION:
        return NO_SOLUTION
    out: dict = {}
    for (g, m), c in sol.items():
        out.setdefault(g, {})[m] = c
    return out


def module_derivation_replay(r, i: int, cap: int, fiber_H: FiniteGradedAlgebra | None = None,
                             total_models: Callable[[int], FilteredModel] | None = None) -> ReplayReport:
    """Replay ``j'(d_i') = j(d_i)`` and the transfer of exactness at stage ``i``.

    ``j`` includes ``Der(Lambda Z, Lambda Z)`` into ``Der(Lambda Z, Lambda Z (x) Lambda X)``
    and ``j'`` restricts derivations of the total algebra to ``Lambda Z``.
    """
    if r.base is None:
        raise PreconditionError("relative model has no filtered base")
    H = fiber_H if fiber_H is not None else presentation(r.fiber_bigraded(), min(cap, r.algebra.degree_cap - 1))
    neg = negative_derivations(H)
    if not neg.none_found:
        raise PreconditionError("fiber cohomology has negative-degree derivations (Halperin check fails)")
    alg = r.algebra
    nz = r.nz
    top = min(cap, r.cap) - 1
    base_parts = r.base.deformation()
    di = base_parts[i].values if i in base_parts else {}
    total_parts = r.total_filtered().deformation()
    di_total = total_parts[i].values if i in total_parts else {}
    j_di = {h: v for h, v in di.items() if h < nz}
    jp = {h: v for h, v in di_total.items() if h < nz}
    agrees = j_di == jp
    # exactness downstairs (in the base) and upstairs (valued in the total algebra)
    base_alg = r.base.algebra
    down = _relative_witness(base_alg, len(base_alg), r.base.d, r.base.d, i, di, top)
    up = _relative_witness(alg, nz, r.d, {h: v for h, v in r.d.items() if h < nz}, i, j_di, top)
    pulled = False
    if up is not NO_SOLUTION:
        # drop every term involving a fiber generator; check the result downstairs
        cand = {h: {m: c for m, c in v.items() if all(g < nz for g, _ in m)} for h, v in up.items()}
        cand = {h: v for h, v in cand.items() if v}
        dd = Derivation(base_alg, 1, r.base.d)
        mu = Derivation(base_alg, 0, cand)
        ok = True
        for h in range(len(base_alg)):
            if base_alg.degrees[h] > top:
                continue
            v = dd.apply(cand.get(h, {}))
            add_scaled(v, mu.apply(r.base.d.get(h, {})), -1)
            if v != di.get(h, {}):
                ok = False
                break
        pulled = ok
    status = "not examined"
    if total_models is not None:
        verdict = decide(total_models, cap)
        status = "non-exact" if isinstance(verdict, NonFormal) and verdict.stage == i else "exact or zero"
    else:
        f = r.total_filtered()
        if f.target is not None:
            v, _, _ = obstruction_loop(f)
            status = "non-exact" if isinstance(v, NonFormal) and v.stage == i else "exact or zero"
    base_pert = _fmt_values(base_alg, di)
    return ReplayReport(i, cap, agrees, base_pert, up is not NO_SOLUTION, down is not NO_SOLUTION,
                        pulled, status, True)
