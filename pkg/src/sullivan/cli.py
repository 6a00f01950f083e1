"""Command-line front end: ``sullivan <command> INPUT --cap N``."""

from __future__ import annotations

import argparse
import random
import sys
from importlib import resources
from pathlib import Path

from .algebra import AlgebraError, FreeCGA, translate
from .cohomology import CohomologyEngine, FiniteGradedAlgebra, presentation, quotient_algebra
from .dsl import (AlgebraDocument, DocumentError, bigraded_model_to_dict, cdga_to_dict, dumps,
                  filtered_model_to_dict, load)
from .formality import (InvariantViolation, PreconditionError, decide, decide_formality,
                        map_formality_certificate, module_derivation_replay, negative_derivations,
                        tncz_analyze)
from .models import (ModelError, bigraded_model, filtered_from_bigrading, filtered_model, format_model_lines,
                     minimal_model, verify_bigraded, verify_filtered)

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_INVARIANT, EXIT_EXPECT = 0, 1, 2, 3, 4

COMMANDS = ["cohomology", "presentation", "minimal-model", "bigraded-model", "filtered-model", "formality",
            "halperin", "tncz", "map-formality", "replay-derivations"]


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- inputs


def fixture_dir():
    return resources.files("sullivan") / "fixtures"


def fixture_names() -> list:
    return sorted(p.name[:-5] for p in fixture_dir().iterdir() if p.name.endswith(".cdga"))


def read_input(spec: str) -> str:
    path = Path(spec)
    if path.is_file():
        return path.read_text(encoding="utf-8")
    name = spec[len("fixtures/"):] if spec.startswith("fixtures/") else None
    if name is not None:
        name = name[:-5] if name.endswith(".cdga") else name
        res = fixture_dir() / f"{name}.cdga"
        if res.is_file():
            return res.read_text(encoding="utf-8")
        raise UsageError(f"no bundled fixture named {name!r} (see `sullivan fixtures`)")
    raise UsageError(f"cannot read input {spec!r}")


def permuted(doc: AlgebraDocument, seed: int) -> AlgebraDocument:
    """Same document with generators (within each section) in a seeded random order."""
    rng = random.Random(seed)
    for part in ([doc.base, doc.fiber] if doc.kind == "fibration" else [doc]):
        rng.shuffle(part.generators)
    return doc


def load_document(spec: str, seed: int | None = None) -> AlgebraDocument:
    doc = load(read_input(spec))
    if seed is not None:
        doc = permuted(doc, seed)
    return doc


def lower_zero_quotient(doc: AlgebraDocument, cap: int) -> FiniteGradedAlgebra | None:
    """``Lambda V_0 / (d V_1)`` when ``doc`` declares a bigraded model prefix, else ``None``."""
    if doc.kind != "cdga" or not any(g.lower for g in doc.generators):
        return None
    full = doc.algebra(cap + 1)
    v0 = [g.generator() for g in doc.generators if not g.lower]
    alg0 = FreeCGA(v0, cap + 1)
    keep = {full.index[g.name]: k for k, g in enumerate(v0)}
    rels = []
    for g in doc.generators:
        if g.lower == 1 and g.name in doc.differential:
            v = doc.differential[g.name].evaluate(full)
            if any(i not in keep for m in v for i, _ in m):
                return None
            rels.append(translate(v, keep))
    return quotient_algebra(alg0, rels, cap)


def cohomology_algebra(doc: AlgebraDocument, cap: int, prefer_lower_zero: bool = False) -> FiniteGradedAlgebra:
    if doc.kind == "relations":
        return doc.graded_algebra(cap)
    if prefer_lower_zero:
        H = lower_zero_quotient(doc, cap)
        if H is not None:
            return H
    if doc.kind == "fibration":
        return presentation(doc.fibration().prepare(cap).total(cap).total(), cap)
    return presentation(doc.cdga(cap + 1), cap)


# ---------------------------------------------------------------- commands


def _header(args, doc) -> dict:
    return {"command": args.command, "input": args.input, "name": doc.name, "kind": doc.kind, "cap": args.cap}


def cmd_cohomology(args, doc):
    if doc.kind == "relations":
        H = doc.graded_algebra(args.cap)
        betti = H.dims()
        labels = {n: H.basis[n] for n in range(args.cap + 1)}
    else:
        c = doc.cdga(args.cap + 1) if doc.kind == "cdga" else doc.fibration().prepare(args.cap).total(args.cap).total()
        eng = CohomologyEngine(c)
        betti = eng.betti(args.cap)
        labels = {n: [eng.slice(n).label(j) for j in range(eng.slice(n).dim)] for n in range(args.cap + 1)}
    out = _header(args, doc)
    out["betti"] = betti
    out["classes"] = {str(n): labels[n] for n in range(args.cap + 1) if labels[n]}
    text = [f"Betti numbers of {doc.name or args.input} in degrees 0..{args.cap}:",
            "  " + ", ".join(map(str, betti))]
    for n in range(args.cap + 1):
        if labels[n]:
            text.append(f"  H^{n}: " + ", ".join(labels[n]))
    return out, text, None


def _fga_dict(H: FiniteGradedAlgebra) -> dict:
    products = []
    for (a, i, b, j), v in sorted(H.products.items()):
        if (a, i) <= (b, j):
            products.append({"left": H.basis[a][i], "right": H.basis[b][j],
                             "value": {H.basis[a + b][k]: str(x) for k, x in sorted(v.items())}})
    return {"dims": H.dims(), "basis": {str(n): H.basis[n] for n in range(H.cap + 1) if H.basis[n]},
            "generator_degrees": H.generator_degrees(), "products": products}


def cmd_presentation(args, doc):
    H = cohomology_algebra(doc, args.cap)
    out = _header(args, doc)
    out.update(_fga_dict(H))
    text = [f"Cohomology algebra through degree {args.cap}: dims {H.dims()}",
            f"algebra generators in degrees {H.generator_degrees()}"]
    for p in out["products"]:
        val = " + ".join(k if x == "1" else f"-{k}" if x == "-1" else f"{x}*{k}" for k, x in p["value"].items())
        text.append(f"  {p['left']} . {p['right']} = {val}")
    return out, text, None


def cmd_minimal_model(args, doc):
    if doc.kind == "relations":
        bg = bigraded_model(doc.graded_algebra(args.cap + 1), args.cap)
        c, images = bg.cdga, None
    else:
        src = doc.cdga(args.cap + 1) if doc.kind == "cdga" else \
            doc.fibration().prepare(args.cap).total(args.cap).total()
        mm = minimal_model(src, args.cap)
        c, images = mm.cdga, mm.pi
    out = _header(args, doc)
    out["model"] = cdga_to_dict(c)
    text = [f"Minimal model through degree {args.cap}:"] + ["  " + s for s in format_model_lines(c.algebra, c.d.values)]
    if images is not None:
        out["quasi_isomorphism"] = [{"generator": g.name, "image": images.target.format(images.apply(c.algebra.gen(g.name)))}
                                    for g in c.algebra.generators]
        text.append("quasi-isomorphism:")
        text += [f"  {x['generator']} -> {x['image']}" for x in out["quasi_isomorphism"]]
    return out, text, None


def cmd_bigraded_model(args, doc):
    H = cohomology_algebra(doc, args.cap + 1, prefer_lower_zero=True)
    bg = bigraded_model(H, args.cap, complete=True)
    problems = verify_bigraded(bg)
    if problems:
        raise InvariantViolation("; ".join(map(str, problems)))
    out = _header(args, doc)
    out["model"] = bigraded_model_to_dict(bg)
    text = [f"Bigraded model through degree {args.cap}:", "  generators (degree, lower): count"]
    text += [f"    ({n}, {p}): {k}" for (n, p), k in sorted(bg.dims().items())]
    text += ["  " + s for s in format_model_lines(bg.algebra, bg.d.values)]
    return out, text, None


def _filtered(args, doc):
    if doc.kind == "fibration":
        fm = doc.fibration().prepare(args.cap)
        if not args.rebuild:
            try:
                return fm.total(args.cap, check=True).total_filtered()
            except ModelError:
                pass
        return filtered_model(fm.total(args.cap + 1).total().with_cap(args.cap + 2), args.cap)
    if doc.kind == "relations":
        bg = bigraded_model(doc.graded_algebra(args.cap + 1), args.cap)
        return filtered_from_bigrading(bg.cdga, args.cap)
    c = doc.cdga(args.cap + 2)
    if doc.has_lower() and not args.rebuild:
        try:
            return filtered_from_bigrading(c.with_cap(args.cap + 1), args.cap)
        except ModelError:
            pass
    return filtered_model(c, args.cap)


def cmd_filtered_model(args, doc):
    f = _filtered(args, doc)
    problems = verify_filtered(f)
    if problems:
        raise InvariantViolation("; ".join(map(str, problems)))
    out = _header(args, doc)
    out["model"] = filtered_model_to_dict(f)
    alg = f.algebra
    text = [f"Filtered model through degree {args.cap} ({len(alg)} generators):"]
    text += ["  " + s for s in format_model_lines(alg, f.D)]
    parts = f.deformation()
    if parts:
        for s, der in parts.items():
            text.append(f"  deformation stage {s}: " + ", ".join(
                f"{alg.generators[i].name} -> {alg.format(v)}" for i, v in sorted(der.values.items())))
    else:
        text.append("  D = d (no deformation)")
    return out, text, None


def _formality_verdict(args, doc):
    if doc.kind == "fibration":
        fm = doc.fibration().prepare(args.cap)
        if not args.rebuild:
            try:
                return decide(lambda n: fm.total(n, check=True).total_filtered(), args.cap)
            except ModelError:
                pass
        return decide_formality(fm.total(args.cap + 1).total(), args.cap, use_bigrading=False)
    if doc.kind == "relations":
        bg = bigraded_model(doc.graded_algebra(args.cap + 1), args.cap)
        return decide_formality(bg.cdga, args.cap, use_bigrading=True)
    use = doc.has_lower() and not args.rebuild
    if use:
        try:
            filtered_from_bigrading(doc.cdga(args.cap + 1), args.cap)
        except ModelError as exc:
            doc.warnings.append(f"declared lower degrees are not a bigraded model ({exc}); "
                                "the model is rebuilt from the cohomology of the CDGA as written")
    return decide_formality(doc.cdga(args.cap + 2), args.cap, use_bigrading=use)


def _stage_lines(stages) -> list:
    lines = []
    for s in stages:
        pert = ", ".join(f"{k} -> {v}" for k, v in s.perturbation.items())
        lines.append(f"  stage {s.index} (truncation {s.truncation}): d_{s.index} = {{{pert}}}")
        if s.witness is None:
            lines.append("    not removable: no mu with [d, mu] = d_" + str(s.index))
        else:
            wit = ", ".join(f"{k} -> {v}" for k, v in s.witness.items())
            lines.append(f"    gauge by exp(mu), mu = {{{wit}}}")
    return lines


def cmd_formality(args, doc):
    v = _formality_verdict(args, doc)
    out = _header(args, doc)
    out.update(v.to_dict())
    if v.formal:
        text = [str(v)]
        if v.transcript:
            text.append("gauge transcript (last truncation):")
            text += _stage_lines(v.transcript)
        else:
            text.append("no deformation terms: the filtered differential is already bigraded")
    else:
        text = [f"NonFormal(stage={v.stage})", f"obstruction found at truncation {v.truncation}",
                "representative of the obstruction class:"]
        text += [f"  {k} -> {val}" for k, val in v.obstruction.items()]
        text.append("transcript:")
        text += _stage_lines(v.transcript)
    return out, text, "formal" if v.formal else "nonformal"


def cmd_halperin(args, doc):
    H = cohomology_algebra(doc, args.cap, prefer_lower_zero=True)
    down_to = args.down_to if args.down_to is not None else doc.max_degree()
    res = negative_derivations(H, down_to=down_to, cap=args.cap)
    out = _header(args, doc)
    out.update(res.to_dict())
    out["cohomology_dims"] = H.dims()
    if res.none_found:
        text = [f"no negative-degree derivations (checked degrees -1..-{down_to}, cohomology through {args.cap})"]
    else:
        text = ["negative-degree derivations found:"]
        text += [f"  degree {q}: dimension {k}" for q, k in sorted(res.dims.items(), reverse=True) if k]
    return out, text, None


def _need_fibration(doc):
    if doc.kind != "fibration":
        raise UsageError("this command needs a fibration document (base and fiber sections)")
    return doc.fibration()


def cmd_tncz(args, doc):
    fm = _need_fibration(doc).prepare(args.cap)
    rep = tncz_analyze(fm.total(args.cap), args.cap)
    out = _header(args, doc)
    out.update(rep.to_dict())
    if rep.surjective:
        text = [f"TNCZ: H(total) -> H(fiber) is surjective in degrees <= {args.cap}"]
    else:
        text = [f"not TNCZ: H(total) -> H(fiber) fails to be surjective in degree {rep.failing_degree}"]
    text += [f"  total Betti: {rep.total_betti}", f"  fiber Betti: {rep.fiber_betti}", f"  ranks:       {rep.ranks}"]
    return out, text, None


def cmd_map_formality(args, doc):
    fm = _need_fibration(doc).prepare(args.cap)
    try:
        r = fm.total(args.cap, check=True)
    except ModelError as exc:
        raise UsageError(f"the fibration does not give a relative bigraded model: {exc}") from None
    cert = map_formality_certificate(r)
    out = _header(args, doc)
    out.update(cert.to_dict())
    text = [("Certified" if cert.certified else "NotCertified") + f": {cert.reason}"]
    text += [f"  {k}: D = {v}" for k, v in cert.differences.items()]
    return out, text, "formal" if cert.certified else "nonformal"


def cmd_replay(args, doc):
    fm = _need_fibration(doc).prepare(args.cap)
    out = _header(args, doc)
    out["stage"] = args.stage
    try:
        r = fm.total(args.cap, check=True)
        rep = module_derivation_replay(r, args.stage, args.cap, fiber_H=fm.fiber_H0(args.cap),
                                       total_models=lambda n: fm.total(n).total_filtered())
    except PreconditionError as exc:
        out["precondition"] = str(exc)
        return out, [f"precondition fails: {exc}"], None
    out.update(rep.to_dict())
    text = [f"replay at stage {args.stage}, cap {args.cap}:",
            f"  restriction of d'_{args.stage} to the base equals d_{args.stage}: {rep.restriction_agrees}",
            f"  base perturbation: {rep.base_perturbation or 0}",
            f"  exact upstairs: {rep.upstairs_exact}; exact downstairs: {rep.downstairs_exact}; "
            f"pulled-back witness: {rep.pulled_back_witness}",
            f"  total-space obstruction: {rep.total_obstruction}",
            f"  consistent: {rep.consistent}"]
    return out, text, None


HANDLERS = {
    "cohomology": cmd_cohomology, "presentation": cmd_presentation, "minimal-model": cmd_minimal_model,
    "bigraded-model": cmd_bigraded_model, "filtered-model": cmd_filtered_model, "formality": cmd_formality,
    "halperin": cmd_halperin, "tncz": cmd_tncz, "map-formality": cmd_map_formality,
    "replay-derivations": cmd_replay,
}


def cmd_fixtures(args):
    rows = []
    for name in fixture_names():
        text = (fixture_dir() / f"{name}.cdga").read_text(encoding="utf-8")
        doc = load(text)
        first = text.splitlines()[0]
        note = first[1:].strip() if first.startswith("#") else ""
        rows.append({"name": name, "kind": doc.kind, "generators": len(doc.all_generators()), "description": note})
    if args.json:
        return {"command": "fixtures", "fixtures": rows}, None
    return None, [f"fixtures/{r['name']:<20} {r['kind']:<10} {r['description']}" for r in rows]


# ---------------------------------------------------------------- entry point


HELP = {
    "cohomology": "Betti numbers and class representatives",
    "presentation": "cohomology algebra: bases and structure constants",
    "minimal-model": "classical minimal model and quasi-isomorphism",
    "bigraded-model": "bigraded model of the cohomology algebra",
    "filtered-model": "filtered model with its deformation terms",
    "formality": "obstruction-theoretic formality verdict",
    "halperin": "negative-degree derivations of the cohomology",
    "tncz": "surjectivity of H(total) -> H(fiber) for a fibration",
    "map-formality": "sufficient certificate for formality of a fibration map",
    "replay-derivations": "compare obstruction stages on base and total space",
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sullivan", description="Rational models and formality of CDGAs.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name, help=HELP[name])
        s.add_argument("input", help="DSL or JSON document, or fixtures/NAME")
        s.add_argument("--cap", type=int, required=True, help="work in degrees <= CAP")
        fmt = s.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true", help="canonical JSON output")
        fmt.add_argument("--text", action="store_true", help="text output (default)")
        s.add_argument("--seed", type=int, help="shuffle generator order with this seed before computing")
        s.add_argument("--expect", choices=["formal", "nonformal"],
                       help="exit with status 4 unless the verdict matches")
        s.add_argument("--rebuild", action="store_true",
                       help="ignore declared lower degrees and rebuild the model from cohomology")
        if name == "replay-derivations":
            s.add_argument("--stage", type=int, default=2, help="obstruction stage (default 2)")
        if name == "halperin":
            s.add_argument("--down-to", type=int, help="check degrees -1..-K (default: largest generator degree)")
    s = sub.add_parser("fixtures", help="list bundled documents")
    s.add_argument("--json", action="store_true")
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.command == "fixtures":
        data, text = cmd_fixtures(args)
        stdout.write(dumps(data) if data is not None else "\n".join(text) + "\n")
        return EXIT_OK
    try:
        doc = load_document(args.input, args.seed)
        # cohomology through the cap needs generators through cap + 1; the model builders need one more
        need = doc.max_degree() + (1 if args.command in ("cohomology", "presentation") else 2)
        if args.cap < need:
            raise UsageError(f"--cap {args.cap} is too small: the largest generator has degree {doc.max_degree()}, "
                             f"so use --cap {need} or more")
        if args.expect and args.command not in ("formality", "map-formality"):
            raise UsageError("--expect applies to formality and map-formality only")
        data, text, label = HANDLERS[args.command](args, doc)
    except UsageError as exc:
        stderr.write(f"sullivan: error: {exc}\n")
        return EXIT_USAGE
    except DocumentError as exc:
        stderr.write(f"{args.input}: {exc}\n")
        return EXIT_PARSE
    except (InvariantViolation, ModelError, AlgebraError) as exc:
        stderr.write(f"sullivan: internal invariant violated: {exc}\n")
        return EXIT_INVARIANT
    if doc.warnings:
        for w in doc.warnings:
            stderr.write(f"{args.input}: warning: {w}\n")
    stdout.write(dumps(data) if args.json else "\n".join(text) + "\n")
    if args.expect and label != args.expect:
        stderr.write(f"sullivan: expected {args.expect}, got {label}\n")
        return EXIT_EXPECT
    return EXIT_OK


def main(argv=None) -> int:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
