"""Text and JSON formats for algebra documents.

DSL, one statement per line (``#`` starts a comment)::

    name example31
    generator a : degree 3
    generator w : degree 4 lower 2
    d v = a*b*c*d + u^2
    relation a^2                  # graded algebra given by relations
    base / fiber                  # start a section of a fibration document
    twist s = -e                  # extra term of D on a fiber generator
    theta v : w = c               # value of a classifying derivation

Expressions use ``+ - * ^``, parentheses and rational literals such as
``3/4``.  Products are reordered into the canonical monomial order with the
Koszul sign; an odd generator multiplied by itself gives zero (with a
warning) while ``x^2`` for odd ``x`` is rejected.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import jsonschema

from .algebra import CDGA, AlgebraError, Derivation, FreeCGA, Generator, check_differential
from .cohomology import FiniteGradedAlgebra, quotient_algebra


class DocumentError(ValueError):
    """Parse or validation failure; ``line``/``column`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, path: str | None = None):
        where = ""
        if line is not None:
            where = f"line {line}, column {column or 1}: "
        elif path is not None:
            where = f"{path}: "
        super().__init__(where + message)
        self.line = line
        self.column = column
        self.path = path
        self.detail = message


# ---------------------------------------------------------------- expressions


class Expr:
    col = 0

    def evaluate(self, alg: FreeCGA, warnings: list | None = None) -> dict:
        raise NotImplementedError

    def __call__(self, alg: FreeCGA) -> dict:
        return self.evaluate(alg)


@dataclass
class Num(Expr):
    value: Fraction
    col: int = 0

    def evaluate(self, alg, warnings=None):
        return {(): self.value} if self.value else {}


@dataclass
class Var(Expr):
    name: str
    col: int = 0
    line: int | None = None

    def evaluate(self, alg, warnings=None):
        if self.name not in alg.index:
            raise DocumentError(f"unknown generator {self.name}", self.line, self.col)
        return alg.gen(self.name)


@dataclass
class Add(Expr):
    terms: list  # of (sign, Expr)
    col: int = 0

    def evaluate(self, alg, warnings=None):
        out: dict = {}
        for s, t in self.terms:
            for m, c in t.evaluate(alg, warnings).items():
                v = out.get(m, 0) + s * c
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return out


@dataclass
class Mul(Expr):
    factors: list
    col: int = 0
    line: int | None = None

    def evaluate(self, alg, warnings=None):
        out = {(): Fraction(1)}
        for f in self.factors:
            p = f.evaluate(alg, warnings)
            if warnings is not None and _shares_odd(alg, out, p):
                warnings.append(DocumentError("odd generator multiplied by itself; the term vanishes",
                                              self.line, f.col).args[0])
            try:
                out = alg.multiply(out, p)
            except AlgebraError as exc:
                raise DocumentError(str(exc), self.line, self.col) from None
        return out


@dataclass
class Pow(Expr):
    base: Expr
    exponent: int
    col: int = 0
    line: int | None = None

    def evaluate(self, alg, warnings=None):
        p = self.base.evaluate(alg, warnings)
        if self.exponent >= 2 and any(alg.mono_parity(m) for m in p):
            raise DocumentError("power of an odd-degree element (odd generators square to zero; write x*x "
                                "if that is intended)", self.line, self.col)
        try:
            return alg.power(p, self.exponent)
        except AlgebraError as exc:
            raise DocumentError(str(exc), self.line, self.col) from None


def _shares_odd(alg: FreeCGA, p: dict, q: dict) -> bool:
    odd_p = {i for m in p for i, _ in m if alg.parities[i]}
    return any(i in odd_p for m in q for i, _ in m if alg.parities[i])


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[^\W\d]\w*'*)|(?P<op>[-+*^()]))")


class _ExprParser:
    def __init__(self, text: str, line: int, offset: int):
        self.text = text
        self.line = line
        self.offset = offset
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                col = offset + len(text[pos:]) - len(text[pos:].lstrip()) + pos + 1
                raise DocumentError(f"unexpected character {text[pos:].lstrip()[:1]!r}", line, col)
            kind = m.lastgroup
            val = m.group(kind)
            self.tokens.append((kind, val, offset + m.start(kind) + 1))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, self.offset + len(self.text) + 1)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse(self) -> Expr:
        if not self.tokens:
            raise DocumentError("empty expression", self.line, self.offset + 1)
        e = self.expr()
        kind, val, col = self.peek()
        if kind is not None:
            raise DocumentError(f"unexpected {val!r}", self.line, col)
        return e

    def expr(self) -> Expr:
        col = self.peek()[2]
        terms = []
        sign = 1
        if self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        terms.append((sign, self.term()))
        while self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
            terms.append((sign, self.term()))
        return terms[0][1] if len(terms) == 1 and terms[0][0] == 1 else Add(terms, col)

    def term(self) -> Expr:
        col = self.peek()[2]
        factors = [self.power()]
        while self.peek()[1] == "*":
            self.take()
            factors.append(self.power())
        return factors[0] if len(factors) == 1 else Mul(factors, col, self.line)

    def power(self) -> Expr:
        col = self.peek()[2]
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, val, c = self.take()
            if kind != "num" or "/" in val:
                raise DocumentError("exponent must be a non-negative integer", self.line, c)
            return Pow(base, int(val), col, self.line)
        return base

    def atom(self) -> Expr:
        kind, val, col = self.take()
        if kind == "num":
            return Num(Fraction(val), col)
        if kind == "name":
            return Var(val, col, self.line)
        if val == "(":
            e = self.expr()
            k2, v2, c2 = self.take()
            if v2 != ")":
                raise DocumentError("expected ')'", self.line, c2)
            return e
        if val == "-":
            return Add([(-1, self.atom())], col)
        if kind is None:
            raise DocumentError("unexpected end of expression", self.line, col)
        raise DocumentError(f"unexpected {val!r}", self.line, col)


def parse_expression(text: str, line: int = 1, offset: int = 0) -> Expr:
    return _ExprParser(text, line, offset).parse()


@dataclass
class PolyExpr(Expr):
    """A polynomial given by named monomials already in canonical order (from JSON)."""

    terms: list  # of (Fraction, [(name, exp), ...])
    col: int = 0

    def evaluate(self, alg, warnings=None):
        out: dict = {}
        for c, mono in self.terms:
            p = {(): Fraction(c)}
            for name, e in mono:
                if name not in alg.index:
                    raise DocumentError(f"unknown generator {name}")
                p = alg.multiply(p, alg.power(alg.gen(name), e))
            for m, x in p.items():
                v = out.get(m, 0) + x
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return out


# ---------------------------------------------------------------- documents


@dataclass
class GeneratorDecl:
    name: str
    degree: int
    lower: int | None = None
    line: int | None = None

    def generator(self) -> Generator:
        return Generator(self.name, self.degree, self.lower or 0)


@dataclass
class AlgebraDocument:
    name: str = ""
    generators: list = field(default_factory=list)
    differential: dict = field(default_factory=dict)   # generator name -> Expr
    relations: list = field(default_factory=list)       # Expr
    base: "AlgebraDocument | None" = None
    fiber: "AlgebraDocument | None" = None
    twists: dict = field(default_factory=dict)          # fiber generator -> Expr
    thetas: dict = field(default_factory=dict)          # base generator -> {fiber generator -> Expr}
    warnings: list = field(default_factory=list)
    lines: dict = field(default_factory=dict)           # statement key -> line number

    @property
    def kind(self) -> str:
        if self.base is not None or self.fiber is not None:
            return "fibration"
        if self.relations:
            return "relations"
        return "cdga"

    def all_generators(self) -> list:
        if self.kind == "fibration":
            return list(self.base.generators) + list(self.fiber.generators)
        return list(self.generators)

    def max_degree(self) -> int:
        return max((g.degree for g in self.all_generators()), default=0)

    def has_lower(self) -> bool:
        return any(g.lower is not None for g in self.all_generators())

    def algebra(self, cap: int) -> FreeCGA:
        return FreeCGA([g.generator() for g in self.generators], cap)

    def cdga(self, cap: int) -> CDGA:
        """The CDGA of a plain document (or the total space of a fibration) through degree ``cap``."""
        if self.kind == "fibration":
            return self.fibration().total(cap - 1).total()
        if self.kind == "relations":
            raise DocumentError("document defines a graded algebra by relations, not a CDGA")
        alg = self.algebra(cap)
        vals = {}
        for name, e in self.differential.items():
            g = alg.index[name]
            if alg.degrees[g] + 1 <= cap:
                vals[g] = e.evaluate(alg)
        return CDGA(alg, Derivation(alg, 1, vals), self.name)

    def graded_algebra(self, cap: int) -> FiniteGradedAlgebra:
        """``Lambda V / (relations)`` for a relations document, through ``cap``."""
        alg = self.algebra(cap + 1)
        rels = [e.evaluate(alg) for e in self.relations]
        return quotient_algebra(alg, rels, cap)

    def fibration(self):
        from .relative import FibrationModel

        if self.kind != "fibration":
            raise DocumentError("document is not a fibration")
        base = self.base.cdga(self.base.max_degree() + 2) if self.base.generators else None
        if base is None:
            raise DocumentError("fibration has an empty base")
        fd = dict(self.fiber.differential)
        return FibrationModel(base, [g.generator() for g in self.fiber.generators], fd,
                              self.twists, self.thetas, self.name)

    # ----- printing -----

    def to_dsl(self) -> str:
        out = []
        if self.name:
            out.append(f"name {self.name}")
        if self.kind == "fibration":
            out.append("base")
            out.extend("  " + line for line in self.base._body_lines())
            out.append("fiber")
            out.extend("  " + line for line in self.fiber._body_lines())
            total = FreeCGA([g.generator() for g in self.all_generators()], self.max_degree() + 2)
            falg = self.fiber.algebra(self.max_degree() + 2)
            for x, e in self.twists.items():
                out.append(f"twist {x} = {total.format(e.evaluate(total))}")
            for b in self.thetas:
                for x, e in self.thetas[b].items():
                    out.append(f"theta {b} : {x} = {falg.format(e.evaluate(falg))}")
        else:
            out.extend(self._body_lines())
        return "\n".join(out) + "\n"

    def _body_lines(self) -> list:
        out = []
        for g in self.generators:
            low = f" lower {g.lower}" if g.lower is not None else ""
            out.append(f"generator {g.name} : degree {g.degree}{low}")
        alg = self.algebra(self.max_degree() + 2)
        for name, e in self.differential.items():
            out.append(f"d {name} = {alg.format(e.evaluate(alg))}")
        ralg = self.algebra(max(self.max_degree(), 1) * 4)
        for e in self.relations:
            out.append(f"relation {ralg.format(e.evaluate(ralg))}")
        return out


_NAME = r"[^\W\d]\w*'*"
_GEN_RE = re.compile(rf"^generator\s+(?P<name>{_NAME})\s*:\s*degree\s+(?P<deg>-?\d+)(?:\s+lower\s+(?P<low>-?\d+))?\s*$")
_D_RE = re.compile(rf"^d\s+(?P<name>{_NAME})\s*=(?P<expr>.*)$")
_TWIST_RE = re.compile(rf"^twist\s+(?P<name>{_NAME})\s*=(?P<expr>.*)$")
_THETA_RE = re.compile(rf"^theta\s+(?P<b>{_NAME})\s*:\s*(?P<x>{_NAME})\s*=(?P<expr>.*)$")
_NAME_RE = re.compile(rf"^name\s+(?P<name>[\w.\-]+)\s*$")
_REL_RE = re.compile(r"^relation\s+(?P<expr>.*)$")


def parse(text: str) -> AlgebraDocument:
    """Parse DSL text into a validated document (raises :class:`DocumentError`)."""
    doc = AlgebraDocument()
    current = doc
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        indent = len(line) - len(line.lstrip())
        if stripped in ("base", "fiber"):
            section = stripped
            sub = AlgebraDocument(name=stripped)
            setattr(doc, stripped, sub)
            current = sub
            continue
        m = _NAME_RE.match(stripped)
        if m:
            doc.name = m.group("name")
            continue
        m = _GEN_RE.match(stripped)
        if m:
            deg = int(m.group("deg"))
            col = indent + m.start("deg") + 1
            if deg < 2:
                raise DocumentError(f"generator degree must be at least 2 (got {deg})", lineno, col)
            low = int(m.group("low")) if m.group("low") is not None else None
            if low is not None and low < 0:
                raise DocumentError("lower degree must be non-negative", lineno, indent + m.start("low") + 1)
            name = m.group("name")
            if any(g.name == name for g in current.generators):
                raise DocumentError(f"generator {name} declared twice", lineno, indent + m.start("name") + 1)
            current.generators.append(GeneratorDecl(name, deg, low, lineno))
            continue
        m = _D_RE.match(stripped)
        if m:
            name = m.group("name")
            if name in current.differential:
                raise DocumentError(f"differential of {name} given twice", lineno, indent + 1)
            current.differential[name] = parse_expression(m.group("expr"), lineno, indent + m.start("expr"))
            current.lines[("d", name)] = (lineno, indent + m.start("name") + 1)
            continue
        m = _REL_RE.match(stripped)
        if m:
            e = parse_expression(m.group("expr"), lineno, indent + m.start("expr"))
            current.relations.append(e)
            current.lines[("relation", len(current.relations) - 1)] = (lineno, indent + m.start("expr") + 1)
            continue
        m = _TWIST_RE.match(stripped)
        if m:
            doc.twists[m.group("name")] = parse_expression(m.group("expr"), lineno, indent + m.start("expr"))
            doc.lines[("twist", m.group("name"))] = (lineno, indent + m.start("name") + 1)
            continue
        m = _THETA_RE.match(stripped)
        if m:
            e = parse_expression(m.group("expr"), lineno, indent + m.start("expr"))
            doc.thetas.setdefault(m.group("b"), {})[m.group("x")] = e
            doc.lines[("theta", m.group("b"), m.group("x"))] = (lineno, indent + m.start("b") + 1)
            continue
        word = stripped.split()[0]
        raise DocumentError(f"unrecognized statement {word!r}", lineno, indent + 1)
    validate(doc)
    return doc


def _check_body(doc: AlgebraDocument, warnings: list):
    cap = doc.max_degree() + 2
    alg = doc.algebra(cap)
    for name, e in doc.differential.items():
        line, col = doc.lines.get(("d", name), (None, None))
        if name not in alg.index:
            raise DocumentError(f"differential given for undeclared generator {name}", line, col)
        if isinstance(e, (Add, Mul, Pow, Var)):
            _stamp(e, line)
        v = e.evaluate(alg, warnings)
        want = alg.degrees[alg.index[name]] + 1
        if v:
            try:
                got = alg.degree_of(v)
            except AlgebraError:
                raise DocumentError(f"d {name} is not homogeneous", line, col) from None
            if got != want:
                raise DocumentError(f"degree mismatch: d {name} must have degree {want}, expression has degree {got}",
                                    line, col)
    if doc.relations:
        if doc.differential:
            raise DocumentError("a relations document cannot also give a differential")
        ralg = doc.algebra(max(doc.max_degree(), 1) * 4)
        for k, e in enumerate(doc.relations):
            line, col = doc.lines.get(("relation", k), (None, None))
            _stamp(e, line)
            v = e.evaluate(ralg, warnings)
            if v:
                try:
                    ralg.degree_of(v)
                except AlgebraError:
                    raise DocumentError("relation is not homogeneous", line, col) from None
        return
    c = doc.cdga(cap)
    bad = check_differential(c)
    if not bad:
        line, col = doc.lines.get(("d", bad.generator), (None, None))
        raise DocumentError(f"d^2 != 0 on {bad.generator}: d(d {bad.generator}) = "
                            f"{c.algebra.format(bad.residue)}", line, col)


def _stamp(e: Expr, line):
    if getattr(e, "line", 1) is None:
        e.line = line
    for child in getattr(e, "factors", []) or []:
        _stamp(child, line)
    for _, child in getattr(e, "terms", []) if isinstance(e, Add) else []:
        _stamp(child, line)
    if isinstance(e, Pow):
        _stamp(e.base, line)


def validate(doc: AlgebraDocument) -> AlgebraDocument:
    """Check names, degrees and ``d^2 = 0``; fills ``doc.warnings``."""
    warnings: list = []
    if doc.kind == "fibration":
        if doc.base is None or doc.fiber is None:
            raise DocumentError("a fibration needs both a base and a fiber section")
        if doc.generators or doc.differential or doc.relations:
            raise DocumentError("statements outside the base and fiber sections")
        _check_body(doc.base, warnings)
        if doc.fiber.relations:
            raise DocumentError("the fiber must be given by generators and differential")
        _check_body(doc.fiber, warnings)
        names = {g.name for g in doc.base.generators}
        fnames = {g.name for g in doc.fiber.generators}
        if names & fnames:
            raise DocumentError(f"generator names shared by base and fiber: {sorted(names & fnames)}")
        total = FreeCGA([g.generator() for g in doc.all_generators()], doc.max_degree() + 2)
        for x, e in doc.twists.items():
            line, col = doc.lines.get(("twist", x), (None, None))
            if x not in fnames:
                raise DocumentError(f"twist on {x}, which is not a fiber generator", line, col)
            _stamp(e, line)
            v = e.evaluate(total, warnings)
            want = total.degrees[total.index[x]] + 1
            if v and total.degree_of(v) != want:
                raise DocumentError(f"degree mismatch: twist of {x} must have degree {want}", line, col)
        falg = doc.fiber.algebra(doc.max_degree() + 2)
        for b, vals in doc.thetas.items():
            for x, e in vals.items():
                line, col = doc.lines.get(("theta", b, x), (None, None))
                if b not in names:
                    raise DocumentError(f"theta for {b}, which is not a base generator", line, col)
                if x not in fnames:
                    raise DocumentError(f"theta value on {x}, which is not a fiber generator", line, col)
                _stamp(e, line)
                v = e.evaluate(falg, warnings)
                bdeg = total.degrees[total.index[b]]
                want = falg.degrees[falg.index[x]] + 1 - bdeg
                if v and falg.degree_of(v) != want:
                    raise DocumentError(f"degree mismatch: theta {b} on {x} must have degree {want}", line, col)
        try:
            fm = doc.fibration()
            fm.total(doc.max_degree() + 1)
        except AlgebraError as exc:
            raise DocumentError(str(exc)) from None
    else:
        _check_body(doc, warnings)
    doc.warnings = warnings
    return doc


# ---------------------------------------------------------------- JSON


def _q(c) -> dict:
    c = Fraction(c)
    return {"num": str(c.numerator), "den": str(c.denominator)}


def poly_to_json(alg: FreeCGA, p: Mapping) -> list:
    from .algebra import mono_key

    out = []
    for m in sorted(p, key=mono_key):
        out.append({"coefficient": _q(p[m]),
                    "monomial": [{"generator": alg.generators[i].name, "exponent": e} for i, e in m]})
    return out


def poly_from_json(data: list) -> PolyExpr:
    terms = []
    for t in data:
        c = Fraction(int(t["coefficient"]["num"]), int(t["coefficient"]["den"]))
        terms.append((c, [(f["generator"], f["exponent"]) for f in t["monomial"]]))
    return PolyExpr(terms)


_RATIONAL = {"type": "object", "required": ["num", "den"], "additionalProperties": False,
             "properties": {"num": {"type": "string", "pattern": r"^-?\d+$"},
                            "den": {"type": "string", "pattern": r"^[1-9]\d*$"}}}
_POLY = {"type": "array", "items": {
    "type": "object", "required": ["coefficient", "monomial"], "additionalProperties": False,
    "properties": {"coefficient": _RATIONAL, "monomial": {"type": "array", "items": {
        "type": "object", "required": ["generator", "exponent"], "additionalProperties": False,
        "properties": {"generator": {"type": "string"}, "exponent": {"type": "integer", "minimum": 1}}}}}}}
_BODY = {
    "generators": {"type": "array", "items": {
        "type": "object", "required": ["name", "degree"], "additionalProperties": False,
        "properties": {"name": {"type": "string", "pattern": r"^[^\W\d]\w*'*$"},
                       "degree": {"type": "integer", "minimum": 2},
                       "lower": {"type": "integer", "minimum": 0}}}},
    "differential": {"type": "array", "items": {
        "type": "object", "required": ["generator", "value"], "additionalProperties": False,
        "properties": {"generator": {"type": "string"}, "value": _POLY}}},
    "relations": {"type": "array", "items": _POLY},
}
_SECTION = {"type": "object", "required": ["generators"], "additionalProperties": False, "properties": _BODY}
DOCUMENT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["format", "kind", "name"],
    "additionalProperties": False,
    "properties": dict(_BODY, **{
        "format": {"const": "sullivan-document"},
        "version": {"const": 1},
        "kind": {"enum": ["cdga", "relations", "fibration"]},
        "name": {"type": "string"},
        "base": _SECTION,
        "fiber": _SECTION,
        "twists": {"type": "array", "items": {
            "type": "object", "required": ["generator", "value"], "additionalProperties": False,
            "properties": {"generator": {"type": "string"}, "value": _POLY}}},
        "thetas": {"type": "array", "items": {
            "type": "object", "required": ["base", "fiber", "value"], "additionalProperties": False,
            "properties": {"base": {"type": "string"}, "fiber": {"type": "string"}, "value": _POLY}}},
    }),
}


def _body_to_json(doc: AlgebraDocument) -> dict:
    cap = doc.max_degree() + 2
    alg = doc.algebra(cap)
    gens = []
    for g in doc.generators:
        item = {"name": g.name, "degree": g.degree}
        if g.lower is not None:
            item["lower"] = g.lower
        gens.append(item)
    out = {"generators": gens,
           "differential": [{"generator": n, "value": poly_to_json(alg, e.evaluate(alg))}
                            for n, e in doc.differential.items()]}
    if doc.relations:
        ralg = doc.algebra(max(doc.max_degree(), 1) * 4)
        out["relations"] = [poly_to_json(ralg, e.evaluate(ralg)) for e in doc.relations]
    return out


def document_to_dict(doc: AlgebraDocument) -> dict:
    out = {"format": "sullivan-document", "version": 1, "kind": doc.kind, "name": doc.name}
    if doc.kind == "fibration":
        out["base"] = _body_to_json(doc.base)
        out["fiber"] = _body_to_json(doc.fiber)
        total = FreeCGA([g.generator() for g in doc.all_generators()], doc.max_degree() + 2)
        falg = doc.fiber.algebra(doc.max_degree() + 2)
        out["twists"] = [{"generator": x, "value": poly_to_json(total, e.evaluate(total))}
                         for x, e in doc.twists.items()]
        out["thetas"] = [{"base": b, "fiber": x, "value": poly_to_json(falg, e.evaluate(falg))}
                         for b in doc.thetas for x, e in doc.thetas[b].items()]
    else:
        out.update(_body_to_json(doc))
    return out


def _body_from_json(data: dict, name: str = "") -> AlgebraDocument:
    doc = AlgebraDocument(name=name)
    for g in data.get("generators", []):
        doc.generators.append(GeneratorDecl(g["name"], g["degree"], g.get("lower")))
    for item in data.get("differential", []):
        doc.differential[item["generator"]] = poly_from_json(item["value"])
    for r in data.get("relations", []):
        doc.relations.append(poly_from_json(r))
    return doc


def _json_path(err) -> str:
    path = "$"
    for part in err.absolute_path:
        path += f"[{part}]" if isinstance(part, int) else f".{part}"
    return path


def document_from_dict(data) -> AlgebraDocument:
    validator = jsonschema.Draft7Validator(DOCUMENT_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        raise DocumentError(err.message, path=_json_path(err))
    if data["kind"] == "fibration":
        doc = AlgebraDocument(name=data["name"])
        if "base" not in data or "fiber" not in data:
            raise DocumentError("fibration needs base and fiber", path="$")
        doc.base = _body_from_json(data["base"], "base")
        doc.fiber = _body_from_json(data["fiber"], "fiber")
        for item in data.get("twists", []):
            doc.twists[item["generator"]] = poly_from_json(item["value"])
        for item in data.get("thetas", []):
            doc.thetas.setdefault(item["base"], {})[item["fiber"]] = poly_from_json(item["value"])
    else:
        doc = _body_from_json(data, data["name"])
    try:
        return validate(doc)
    except DocumentError as exc:
        raise DocumentError(exc.detail, path="$") from None
    except AlgebraError as exc:
        raise DocumentError(str(exc), path="$") from None


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def to_json(doc: AlgebraDocument) -> str:
    return dumps(document_to_dict(doc))


def from_json(text: str) -> AlgebraDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return document_from_dict(data)


def load(text: str) -> AlgebraDocument:
    """DSL or JSON, decided by the first non-blank character."""
    return from_json(text) if text.lstrip().startswith("{") else parse(text)


def load_file(path) -> AlgebraDocument:
    with open(path, encoding="utf-8") as fh:
        return load(fh.read())


# ---------------------------------------------------------------- models and reports


def derivation_values_to_json(alg: FreeCGA, values: Mapping) -> list:
    return [{"generator": alg.generators[i].name, "value": poly_to_json(alg, v)}
            for i, v in sorted(values.items()) if v]


def cdga_to_dict(c: CDGA) -> dict:
    alg = c.algebra
    return {"generators": [{"name": g.name, "degree": g.degree, "lower": g.lower} for g in alg.generators],
            "differential": derivation_values_to_json(alg, c.d.values)}


def filtered_model_to_dict(f) -> dict:
    alg = f.algebra
    out = {"cap": f.cap,
           "generators": [{"name": g.name, "degree": g.degree, "lower": g.lower, "auxiliary": g.degree > f.cap}
                          for g in alg.generators],
           "d": derivation_values_to_json(alg, f.d),
           "D": derivation_values_to_json(alg, f.D),
           "deformation": [{"stage": s, "values": derivation_values_to_json(alg, der.values)}
                           for s, der in f.deformation().items()]}
    if f.target is not None:
        out["pi"] = [{"generator": alg.generators[i].name, "value": poly_to_json(f.target.algebra, v)}
                     for i, v in sorted(f.pi.items()) if v]
    return out


def bigraded_model_to_dict(bg) -> dict:
    alg = bg.algebra
    return {"cap": bg.cap,
            "generators": [{"name": g.name, "degree": g.degree, "lower": g.lower} for g in alg.generators],
            "d": derivation_values_to_json(alg, bg.d.values),
            "rho": [{"generator": alg.generators[i].name,
                     "coordinates": {str(k): _q(c) for k, c in sorted(v.items())}}
                    for i, v in sorted(bg.rho.items()) if v],
            "dims": [{"degree": n, "lower": p, "count": k} for (n, p), k in sorted(bg.dims().items())]}


__all__ = [
    "AlgebraDocument", "DOCUMENT_SCHEMA", "DocumentError", "Expr", "GeneratorDecl", "bigraded_model_to_dict",
    "cdga_to_dict", "document_from_dict", "document_to_dict", "dumps", "filtered_model_to_dict", "from_json",
    "load", "load_file", "parse", "parse_expression", "poly_to_json", "to_json", "validate",
]
