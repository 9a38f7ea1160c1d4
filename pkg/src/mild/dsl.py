"""The workspace DSL: rings, algebra presentations, morphisms.

    ring Z invert 2 3
    cdga S2 { gen v : 2  gen w : 3  d w = v^2 }
    dga  TS3 { gen x : 3 }
    morphism f : A -> B { v -> x^2 + 3*y }

Comments run from '#' to end of line.  Polynomials are sums of terms
`coef*gen^e*gen…` with integer or integer/integer coefficients; `0` is the
zero polynomial.  Errors carry line and column.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import AlgebraMorphism, Element, FreeGradedAlgebra
from .coeff import CoefficientRing, scalar_str
from .errors import DegreeError, MildError, ParseError, RingError

KEYWORDS = {"ring", "invert", "cdga", "dga", "gen", "d", "morphism", "Q", "Z"}


@dataclass
class Token:
    kind: str  # IDENT INT SYM EOF
    text: str
    line: int
    col: int


def _lex(source: str) -> list:
    toks = []
    line, col = 1, 1
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            toks.append(Token("IDENT", source[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            toks.append(Token("INT", source[i:j], line, col))
            col += j - i
            i = j
            continue
        if c == "-" and i + 1 < n and source[i + 1] == ">":
            toks.append(Token("SYM", "->", line, col))
            i += 2
            col += 2
            continue
        if c in "{}:^*+-/=":
            toks.append(Token("SYM", c, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Token("EOF", "", line, col))
    return toks


@dataclass
class Workspace:
    ring: CoefficientRing
    algebras: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)

    def algebra(self, name: str) -> FreeGradedAlgebra:
        if name not in self.algebras:
            raise MildError(f"unknown algebra {name!r}")
        return self.algebras[name]

    def morphism(self, name: str) -> AlgebraMorphism:
        if name not in self.morphisms:
            raise MildError(f"unknown morphism {name!r}")
        return self.morphisms[name]

    def set_cap(self, cap: int):
        for A in self.algebras.values():
            A.set_cap(cap)


class _Parser:
    def __init__(self, toks: list):
        self.toks = toks
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise ParseError(f"found {t.text!r}", t.line, t.col, expected=str(want))
        return self.next()

    def parse_workspace(self, connectivity: int = 1) -> Workspace:
        ring = None
        ws = None
        while self.peek().kind != "EOF":
            t = self.peek()
            if t.kind != "IDENT":
                raise ParseError(f"found {t.text!r}", t.line, t.col,
                                 expected="a declaration")
            if t.text == "ring":
                if ring is not None:
                    raise ParseError("ring declared twice", t.line, t.col)
                ring = self.parse_ring()
                ws = Workspace(ring)
            elif t.text in ("cdga", "dga"):
                if ws is None:
                    raise ParseError("declare the ring first", t.line, t.col)
                name, alg = self.parse_algebra(ws, connectivity)
                ws.algebras[name] = alg
            elif t.text == "morphism":
                if ws is None:
                    raise ParseError("declare the ring first", t.line, t.col)
                name, mor = self.parse_morphism(ws)
                ws.morphisms[name] = mor
            else:
                raise ParseError(f"found {t.text!r}", t.line, t.col,
                                 expected="ring, cdga, dga or morphism")
        if ws is None:
            raise ParseError("empty workspace", 1, 1)
        return ws

    def parse_ring(self) -> CoefficientRing:
        self.expect("IDENT", "ring")
        t = self.next()
        if t.text == "Q":
            return CoefficientRing.rationals()
        if t.text == "Z":
            self.expect("IDENT", "invert")
            primes = []
            while self.peek().kind == "INT":
                primes.append(int(self.next().text))
            if not primes:
                t2 = self.peek()
                raise ParseError("no primes to invert", t2.line, t2.col)
            return CoefficientRing.localized(*primes)
        raise ParseError(f"found {t.text!r}", t.line, t.col, expected="Q or Z")

    def parse_algebra(self, ws: Workspace, connectivity: int):
        kw = self.next()
        flavor = "commutative" if kw.text == "cdga" else "tensor"
        name_t = self.expect("IDENT")
        if name_t.text in ws.algebras or name_t.text in ws.morphisms:
            raise ParseError(f"name {name_t.text!r} already used", name_t.line, name_t.col)
        self.expect("SYM", "{")
        gens = []
        diffs = []
        while not (self.peek().kind == "SYM" and self.peek().text == "}"):
            t = self.peek()
            if t.kind == "IDENT" and t.text == "gen":
                self.next()
                gname = self.expect("IDENT")
                if gname.text in KEYWORDS:
                    raise ParseError(f"{gname.text!r} is reserved", gname.line, gname.col)
                self.expect("SYM", ":")
                deg = int(self.expect("INT").text)
                gens.append((gname.text, deg, 1 if flavor == "tensor" else None))
            elif t.kind == "IDENT" and t.text == "d":
                self.next()
                gname = self.expect("IDENT")
                self.expect("SYM", "=")
                diffs.append((gname, self._poly_tokens()))
            else:
                raise ParseError(f"found {t.text!r}", t.line, t.col, expected="gen, d or }")
        self.expect("SYM", "}")
        try:
            alg = FreeGradedAlgebra(ws.ring, flavor, gens, connectivity=connectivity)
        except DegreeError as exc:
            raise ParseError(str(exc), name_t.line, name_t.col)
        for gname, ptoks in diffs:
            if not alg.has_gen(gname.text):
                raise ParseError(f"unknown generator {gname.text!r}",
                                 gname.line, gname.col)
            value = _eval_poly(ptoks, alg, ws.ring)
            try:
                alg.set_differential(gname.text, value)
            except DegreeError as exc:
                raise DegreeError(f"line {gname.line}: {exc}")
        alg.validate()
        return name_t.text, alg

    def parse_morphism(self, ws: Workspace):
        self.expect("IDENT", "morphism")
        name_t = self.expect("IDENT")
        self.expect("SYM", ":")
        src_t = self.expect("IDENT")
        self.expect("SYM", "->")
        tgt_t = self.expect("IDENT")
        for t in (src_t, tgt_t):
            if t.text not in ws.algebras:
                raise ParseError(f"unknown algebra {t.text!r}", t.line, t.col)
        src, tgt = ws.algebras[src_t.text], ws.algebras[tgt_t.text]
        self.expect("SYM", "{")
        images = {}
        while not (self.peek().kind == "SYM" and self.peek().text == "}"):
            gname = self.expect("IDENT")
            if not src.has_gen(gname.text):
                raise ParseError(f"unknown generator {gname.text!r}",
                                 gname.line, gname.col)
            self.expect("SYM", "->")
            images[gname.text] = _eval_poly(self._poly_tokens(), tgt, ws.ring)
        self.expect("SYM", "}")
        missing = [g.name for g in src.gens if g.name not in images]
        if missing:
            raise ParseError(f"missing images for {', '.join(missing)}",
                             name_t.line, name_t.col)
        try:
            mor = AlgebraMorphism(src, tgt, images)
            mor.check_chain_map()
        except DegreeError as exc:
            raise DegreeError(f"morphism {name_t.text}: {exc}")
        return name_t.text, mor

    def _poly_tokens(self) -> list:
        """Collect the token slice of one polynomial.

        A polynomial ends at '}', at EOF, at a statement keyword (gen/d), or
        before IDENT '->' (the next morphism rule)."""
        out = []
        while True:
            t = self.peek()
            if t.kind == "EOF":
                break
            if t.kind == "SYM" and t.text == "}":
                break
            if t.kind == "IDENT" and t.text in ("gen", "d"):
                break
            if t.kind == "IDENT" and self.peek(1).kind == "SYM" and self.peek(1).text == "->":
                break
            out.append(self.next())
        if not out:
            t = self.peek()
            raise ParseError("empty polynomial", t.line, t.col)
        return out


def _eval_poly(toks: list, alg: FreeGradedAlgebra, ring: CoefficientRing) -> Element:
    """Evaluate a token slice as a homogeneous element of alg."""
    p = _Parser(toks + [Token("EOF", "", toks[-1].line, toks[-1].col)])
    total = alg.zero()
    sign = 1
    first = True
    while p.peek().kind != "EOF":
        t = p.peek()
        if t.kind == "SYM" and t.text in "+-":
            p.next()
            sign = 1 if t.text == "+" else -1
        elif not first:
            raise ParseError(f"found {t.text!r}", t.line, t.col, expected="+ or -")
        term = _eval_term(p, alg, ring)
        total = total + term.scale(sign)
        sign = 1
        first = False
    return total


def _eval_term(p: _Parser, alg: FreeGradedAlgebra, ring: CoefficientRing) -> Element:
    coeff = Fraction(1)
    factors = []
    expect_factor = True
    saw_coeff = False
    while True:
        t = p.peek()
        if t.kind == "INT" and expect_factor and not saw_coeff and not factors:
            p.next()
            num = int(t.text)
            if p.peek().kind == "SYM" and p.peek().text == "/":
                p.next()
                den_t = p.expect("INT")
                coeff = Fraction(num, int(den_t.text))
            else:
                coeff = Fraction(num)
            if not ring.contains(coeff):
                raise RingError(
                    f"line {t.line}: coefficient {scalar_str(coeff)} is not in {ring}")
            saw_coeff = True
            expect_factor = False
        elif t.kind == "IDENT" and expect_factor:
            p.next()
            if not alg.has_gen(t.text):
                raise ParseError(f"unknown generator {t.text!r}", t.line, t.col)
            exp = 1
            if p.peek().kind == "SYM" and p.peek().text == "^":
                p.next()
                exp = int(p.expect("INT").text)
            factors.append((t.text, exp))
            expect_factor = False
        elif t.kind == "SYM" and t.text == "*" and not expect_factor:
            p.next()
            expect_factor = True
        else:
            break
    if expect_factor and (saw_coeff or factors):
        raise ParseError(f"found {p.peek().text!r}", p.peek().line, p.peek().col,
                         expected="a factor")
    if not factors:
        if not saw_coeff:
            t = p.peek()
            raise ParseError("empty term", t.line, t.col)
        if coeff == 0:
            return alg.zero()
        raise DegreeError(
            f"line {p.peek().line}: nonzero constant term {scalar_str(coeff)} "
            "is not homogeneous of positive degree")
    out = alg.one().scale(coeff)
    for name, exp in factors:
        out = out * (alg.gen(name) ** exp)
    return out


def parse(source: str, connectivity: int = 1) -> Workspace:
    """Parse a workspace; ParseError/DegreeError/RingError carry locations."""
    return _Parser(_lex(source)).parse_workspace(connectivity)


def parse_element(source: str, alg: FreeGradedAlgebra,
                  ring: CoefficientRing) -> Element:
    toks = _lex(source)[:-1]
    if not toks:
        raise ParseError("empty polynomial", 1, 1)
    return _eval_poly(toks, alg, ring)


def _poly_str(el: Element) -> str:
    return str(el).replace(" ", "")


def pretty(ws: Workspace) -> str:
    """Canonical text form; parse(pretty(ws)) reproduces the workspace."""
    lines = [f"ring {ws.ring}"]
    for name in ws.algebras:
        A = ws.algebras[name]
        kw = "cdga" if A.flavor == "commutative" else "dga"
        body = []
        for g in A.gens:
            body.append(f"gen {g.name} : {g.degree}")
        for i, g in enumerate(A.gens):
            dg = A.differentials.get(i)
            if dg is not None:
                body.append(f"d {g.name} = {_poly_str(dg)}")
        lines.append(f"{kw} {name} {{")
        lines.extend(f"  {b}" for b in body)
        lines.append("}")
    for name in ws.morphisms:
        f = ws.morphisms[name]
        src = next(k for k, v in ws.algebras.items() if v is f.source)
        tgt = next(k for k, v in ws.algebras.items() if v is f.target)
        lines.append(f"morphism {name} : {src} -> {tgt} {{")
        for i, g in enumerate(f.source.gens):
            el = f.images[i]
            lines.append(f"  {g.name} -> {_poly_str(el) if not el.is_zero() else '0'}")
        lines.append("}")
    return "\n".join(lines) + "\n"
