"""Concrete syntax for assertion files.

The grammar is documented in ``docs/language.md``.  In brief::

    assertion  ::=  [ "bigU" "[" formula "]" ]  tset
    tset       ::=  pset  ( "(x)" pset )*
    pset       ::=  uset [ "^" INT ]  |  "(" tset ")" [ "^" INT ]
    uset       ::=  setq ( "\\/" setq )*
    setq       ::=  "{" dirac ("," dirac)* [ ":" varcon ("," varcon)* ] "}"
    dirac      ::=  term ( ("+" | "-") term )*
    term       ::=  [ amp ] [ "sum" "[" varcon ("," varcon)* "]" ] ket
    ket        ::=  "|" atom+ ">"

Ket atoms are whitespace separated: a run of binary digits (optionally
repeated, ``0^4``), a variable name, or a complemented variable ``~v``.
Amplitudes are exact arithmetic over integers, rationals, ``i`` and
``sqrt2``; ``bigU`` formulas compare arithmetic over ``re(v)``, ``im(v)``
and ``|v|^2``.  Comments run from ``//`` to end of line; assertions in one
file are separated by ``;;``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import ast as A
from .amplitude import (
    AC_I,
    AC_SQRT2,
    AlgebraicComplex,
    AmplitudePoly,
    ExactDivisionError,
    POLY_ONE,
)
from .errors import SpecSyntaxError

_PUNCT = (
    ";;", "\\/", "!=", "<=", ">=", "&&", "||",
    "{", "}", "[", "]", "(", ")", "|", ">", "<", "~", "^",
    "+", "-", "*", "/", "=", ":", ",", "!",
)
_KEYWORDS = {"bigU", "sum"}


@dataclass(frozen=True)
class Token:
    kind: str  # punctuation literal, IDENT, NUMBER or EOF
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        ch = src[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if src.startswith("//", i):
            while i < n and src[i] != "\n":
                i += 1
            continue
        hit = None
        for p in _PUNCT:
            if src.startswith(p, i):
                hit = p
                break
        if hit is not None:
            toks.append(Token(hit, hit, line, col))
            i += len(hit)
            col += len(hit)
            continue
        if ch.isdigit():
            j = i
            while j < n and (src[j].isdigit() or src[j] == "."):
                j += 1
            toks.append(Token("NUMBER", src[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(Token("IDENT", src[i:j], line, col))
            col += j - i
            i = j
            continue
        raise SpecSyntaxError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("EOF", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def at(self, kind: str, ahead: int = 0) -> bool:
        return self.peek(ahead).kind == kind

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"expected {kind!r}, found {tok.text!r}", tok)
        return self.next()

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise SpecSyntaxError(msg, tok.line, tok.col)

    def _at_tensor(self) -> bool:
        # The tensor operator "(x)" is three tokens; a set expression can
        # never otherwise start with "(x", so the lookahead is unambiguous.
        return (
            self.at("(")
            and self.at("IDENT", 1)
            and self.peek(1).text == "x"
            and self.at(")", 2)
        )

    def _eat_tensor(self) -> None:
        self.next()
        self.next()
        self.next()

    # -- entry points --------------------------------------------------------

    def parse_file(self) -> list[A.AssertionAst]:
        out = [self.parse_assertion()]
        while self.at(";;"):
            self.next()
            if self.at("EOF"):
                break
            out.append(self.parse_assertion())
        self.expect("EOF")
        return out

    def parse_assertion(self) -> A.AssertionAst:
        constraint = None
        if self.at("IDENT") and self.peek().text == "bigU":
            self.next()
            self.expect("[")
            constraint = self.parse_formula()
            self.expect("]")
        segments: list[A.PSet] = []
        segments.extend(self.parse_pset())
        while self._at_tensor():
            self._eat_tensor()
            segments.extend(self.parse_pset())
        return A.AssertionAst(tuple(segments), constraint)

    # -- set structure -------------------------------------------------------

    def parse_pset(self) -> list[A.PSet]:
        if self.at("("):
            self.next()
            inner: list[A.PSet] = []
            inner.extend(self.parse_pset())
            while self._at_tensor():
                self._eat_tensor()
                inner.extend(self.parse_pset())
            self.expect(")")
            if self.at("^"):
                tok = self.next()
                power = self.parse_int()
                if len(inner) != 1 or inner[0].power != 1:
                    self.fail("a power applies to a single union", tok)
                return [A.PSet(inner[0].base, power)]
            return inner
        base = self.parse_uset()
        power = 1
        if self.at("^"):
            self.next()
            power = self.parse_int()
        return [A.PSet(base, power)]

    def parse_uset(self) -> A.USet:
        alts = [self.parse_setq()]
        while self.at("\\/"):
            self.next()
            alts.append(self.parse_setq())
        return A.USet(tuple(alts))

    def parse_setq(self) -> A.SetQ:
        self.expect("{")
        diracs = [self.parse_dirac()]
        while self.at(","):
            self.next()
            diracs.append(self.parse_dirac())
        predicate: tuple[A.VarCon, ...] = ()
        if self.at(":"):
            self.next()
            predicate = self.parse_varcons()
        self.expect("}")
        return A.SetQ(tuple(diracs), predicate)

    def parse_dirac(self) -> A.Dirac:
        terms = [self.parse_term()]
        while self.at("+") or self.at("-"):
            negate = self.next().kind == "-"
            term = self.parse_term()
            if negate:
                term = A.Term(-term.amplitude, term.sum_constraints, term.pattern)
            terms.append(term)
        return tuple(terms)

    def parse_term(self) -> A.Term:
        amp = POLY_ONE
        if not self.at("|") and not self._at_keyword("sum"):
            amp = self.parse_amp()
        cons: tuple[A.VarCon, ...] = ()
        if self._at_keyword("sum"):
            self.next()
            self.expect("[")
            cons = self.parse_varcons()
            self.expect("]")
        pattern = self.parse_ket()
        return A.Term(amp, cons, pattern)

    def _at_keyword(self, word: str) -> bool:
        return self.at("IDENT") and self.peek().text == word

    def parse_ket(self) -> tuple[A.Atom, ...]:
        self.expect("|")
        atoms: list[A.Atom] = []
        while not self.at(">"):
            tok = self.peek()
            if tok.kind == "NUMBER":
                self.next()
                bits = tok.text
                if set(bits) - {"0", "1"}:
                    self.fail(f"{bits!r} is not a binary string", tok)
                if self.at("^"):
                    self.next()
                    bits = bits * self.parse_int()
                atoms.extend(A.ConstBit(int(b)) for b in bits)
            elif tok.kind == "IDENT":
                self.next()
                atoms.append(A.Var(tok.text))
            elif tok.kind == "~":
                self.next()
                name = self.expect("IDENT")
                atoms.append(A.Compl(name.text))
            else:
                self.fail(f"unexpected {tok.text!r} inside a ket", tok)
        self.expect(">")
        if not atoms:
            self.fail("empty ket")
        return tuple(atoms)

    # -- variable constraints -------------------------------------------------

    def parse_varcons(self) -> tuple[A.VarCon, ...]:
        cons = [self.parse_varcon()]
        while self.at(","):
            self.next()
            cons.append(self.parse_varcon())
        return tuple(cons)

    def parse_varcon(self) -> A.VarCon:
        if self.at("|"):
            self.next()
            var = self.expect("IDENT").text
            self.expect("|")
            self.expect("=")
            return A.Len(var, self.parse_int())
        var = self.expect("IDENT").text
        if self.at("!="):
            self.next()
            if self.at("IDENT"):
                return A.NeqVar(var, self.next().text)
            return A.NeqConst(var, self.parse_bits())
        if self.at("="):
            self.next()
            return A.EqConst(var, self.parse_bits())
        self.fail("expected '!=' or '=' in a variable constraint")

    def parse_bits(self) -> str:
        tok = self.expect("NUMBER")
        if set(tok.text) - {"0", "1"}:
            self.fail(f"{tok.text!r} is not a binary string", tok)
        return tok.text

    def parse_int(self) -> int:
        tok = self.expect("NUMBER")
        if not tok.text.isdigit():
            self.fail(f"expected an integer, found {tok.text!r}", tok)
        return int(tok.text)

    # -- amplitude expressions --------------------------------------------------

    def parse_amp(self, min_bp: int = 0) -> AmplitudePoly:
        tok = self.peek()
        try:
            left = self._amp_prefix()
            while True:
                op = self.peek()
                if op.kind == "^":
                    self.next()
                    left = left ** self.parse_int()
                    continue
                bp = {"*": 20, "/": 20, "+": 10, "-": 10}.get(op.kind)
                if bp is None or bp < min_bp:
                    break
                self.next()
                right = self.parse_amp(bp + 1)
                if op.kind == "*":
                    left = left * right
                elif op.kind == "/":
                    left = left / right
                elif op.kind == "+":
                    left = left + right
                else:
                    left = left - right
            return left
        except ExactDivisionError as exc:
            raise SpecSyntaxError(str(exc), tok.line, tok.col) from exc

    def _amp_prefix(self) -> AmplitudePoly:
        tok = self.next()
        if tok.kind == "NUMBER":
            return _number_poly(tok, self)
        if tok.kind == "IDENT":
            if tok.text == "i":
                return AmplitudePoly.const(AC_I)
            if tok.text == "sqrt2":
                return AmplitudePoly.const(AC_SQRT2)
            if tok.text in _KEYWORDS:
                self.fail(f"{tok.text!r} cannot start an amplitude", tok)
            return AmplitudePoly.var(tok.text)
        if tok.kind == "(":
            inner = self.parse_amp()
            self.expect(")")
            return inner
        if tok.kind == "-":
            return -self.parse_amp(30)
        self.fail(f"unexpected {tok.text!r} in an amplitude", tok)

    # -- amplitude-constraint formulas -------------------------------------------

    def parse_formula(self) -> A.CCons:
        left = self._formula_or()
        while self.at(","):
            self.next()
            left = A.CBin("&&", left, self._formula_or())
        return left

    def _formula_or(self) -> A.CCons:
        left = self._formula_and()
        while self.at("||"):
            self.next()
            left = A.CBin("||", left, self._formula_and())
        return left

    def _formula_and(self) -> A.CCons:
        left = self._formula_not()
        while self.at("&&"):
            self.next()
            left = A.CBin("&&", left, self._formula_not())
        return left

    def _formula_not(self) -> A.CCons:
        if self.at("!"):
            self.next()
            return A.CNot(self._formula_not())
        if self.at("("):
            # Either a parenthesised formula or a parenthesised arithmetic
            # expression starting a comparison: try the formula first.
            mark = self.pos
            try:
                self.next()
                inner = self.parse_formula()
                self.expect(")")
                return inner
            except SpecSyntaxError:
                self.pos = mark
        return self._comparison()

    def _comparison(self) -> A.CCmp:
        left = self._carith()
        op = self.peek()
        if op.kind not in ("=", "!=", "<", "<=", ">", ">="):
            self.fail("expected a comparison operator", op)
        self.next()
        right = self._carith()
        return A.CCmp(op.kind, left, right)

    def _carith(self, min_bp: int = 0) -> A.CExpr:
        left = self._carith_prefix()
        while True:
            op = self.peek()
            bp = {"*": 20, "/": 20, "+": 10, "-": 10}.get(op.kind)
            if bp is None or bp < min_bp:
                return left
            self.next()
            left = A.CArith(op.kind, left, self._carith(bp + 1))

    def _carith_prefix(self) -> A.CExpr:
        tok = self.next()
        if tok.kind == "NUMBER":
            return A.CNum(_number_fraction(tok.text))
        if tok.kind == "-":
            inner = self._carith(30)
            return A.CArith("-", A.CNum(Fraction(0)), inner)
        if tok.kind == "(":
            inner = self._carith()
            self.expect(")")
            return inner
        if tok.kind == "|":
            var = self.expect("IDENT").text
            self.expect("|")
            self.expect("^")
            tok2 = self.expect("NUMBER")
            if tok2.text != "2":
                self.fail("only squared magnitudes |v|^2 are supported", tok2)
            return A.CAbsSq(var)
        if tok.kind == "IDENT" and tok.text in ("re", "im"):
            self.expect("(")
            var = self.expect("IDENT").text
            self.expect(")")
            return A.CRe(var) if tok.text == "re" else A.CIm(var)
        self.fail(f"unexpected {tok.text!r} in a constraint formula", tok)


def _number_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except ValueError:
        raise SpecSyntaxError(f"malformed number {text!r}") from None


def _number_poly(tok: Token, parser: _Parser) -> AmplitudePoly:
    frac = _number_fraction(tok.text)
    num = AlgebraicComplex.from_int(frac.numerator)
    den = AlgebraicComplex.from_int(frac.denominator)
    return AmplitudePoly.const(num / den)


def parse(text: str) -> A.AssertionAst:
    """Parse a single assertion."""
    asts = _Parser(text).parse_file()
    if len(asts) != 1:
        raise SpecSyntaxError(f"expected one assertion, found {len(asts)}")
    return asts[0]


def parse_many(text: str) -> list[A.AssertionAst]:
    """Parse a file of assertions separated by ``;;``."""
    return _Parser(text).parse_file()


def parse_constant(text: str) -> AlgebraicComplex:
    """Parse one constant amplitude expression such as ``-i/sqrt2``."""
    p = _Parser(text)
    poly = p.parse_amp()
    p.expect("EOF")
    if not poly.is_constant:
        p.fail("amplitude variables are not allowed here")
    return poly.constant_value


# ---------------------------------------------------------------------------
# Rendering: the inverse of parse up to insignificant whitespace.
# ---------------------------------------------------------------------------


def render(ast: A.AssertionAst) -> str:
    parts = []
    if ast.constraint is not None:
        parts.append(f"bigU[ {render_formula(ast.constraint)} ]")
    segs = []
    for seg in ast.segments:
        body = " \\/ ".join(_render_setq(sq) for sq in seg.base.alternatives)
        if seg.power != 1:
            body = f"({body})^{seg.power}" if len(seg.base.alternatives) > 1 else f"{body}^{seg.power}"
        segs.append(body)
    parts.append(" (x) ".join(segs))
    return " ".join(parts)


def render_many(asts: list[A.AssertionAst]) -> str:
    return "\n;;\n".join(render(a) for a in asts) + "\n"


def _render_setq(sq: A.SetQ) -> str:
    diracs = ", ".join(_render_dirac(d) for d in sq.diracs)
    if sq.predicate:
        cons = ", ".join(render_varcon(c) for c in sq.predicate)
        return "{ %s : %s }" % (diracs, cons)
    return "{ %s }" % diracs


def _render_dirac(dirac: A.Dirac) -> str:
    return " + ".join(_render_term(t) for t in dirac)


def _render_term(term: A.Term) -> str:
    bits = []
    if term.amplitude != POLY_ONE:
        bits.append(render_amplitude(term.amplitude))
    if term.sum_constraints:
        cons = ", ".join(render_varcon(c) for c in term.sum_constraints)
        bits.append(f"sum[ {cons} ]")
    bits.append(_render_ket(term.pattern))
    return " ".join(bits)


def _render_ket(pattern: tuple[A.Atom, ...]) -> str:
    out: list[str] = []
    for atom in pattern:
        if isinstance(atom, A.ConstBit):
            if out and out[-1] and set(out[-1]) <= {"0", "1"}:
                out[-1] += str(atom.bit)
            else:
                out.append(str(atom.bit))
        elif isinstance(atom, A.Var):
            out.append(atom.name)
        else:
            out.append(f"~{atom.name}")
    return "|%s>" % " ".join(out)


def render_varcon(con: A.VarCon) -> str:
    if isinstance(con, A.Len):
        return f"|{con.var}| = {con.n}"
    if isinstance(con, A.NeqVar):
        return f"{con.left} != {con.right}"
    if isinstance(con, A.NeqConst):
        return f"{con.var} != {con.bits}"
    return f"{con.var} = {con.bits}"


def render_amplitude(poly: AmplitudePoly) -> str:
    """Render a polynomial amplitude as a parseable prefix for a ket."""
    if poly.is_zero:
        return "0"
    monos = []
    for mono, coef in poly.terms:
        factors = []
        coef_text = _render_algebraic(coef)
        if not mono:
            factors.append(coef_text)
        else:
            if coef_text != "1":
                factors.append(coef_text)
            for name, exp in mono:
                factors.append(name if exp == 1 else f"{name}^{exp}")
        monos.append(" * ".join(factors))
    text = " + ".join(monos)
    simple = len(poly.terms) == 1 and (
        text.isidentifier() or text.isdigit() or text in ("i", "sqrt2")
    )
    return text if simple else f"({text})"


def _render_algebraic(v: AlgebraicComplex) -> str:
    """Exact expression text for a ring constant, using 1, i and sqrt2."""
    return str(v)


def render_formula(f: A.CCons) -> str:
    if isinstance(f, A.CBin):
        return f"({render_formula(f.left)} {f.op} {render_formula(f.right)})"
    if isinstance(f, A.CNot):
        return f"!({render_formula(f.inner)})"
    return f"{_render_cexpr(f.left)} {f.op} {_render_cexpr(f.right)}"


def _render_cexpr(e: A.CExpr) -> str:
    if isinstance(e, A.CNum):
        return str(e.value) if e.value.denominator == 1 else f"{e.value.numerator}/{e.value.denominator}"
    if isinstance(e, A.CRe):
        return f"re({e.var})"
    if isinstance(e, A.CIm):
        return f"im({e.var})"
    if isinstance(e, A.CAbsSq):
        return f"|{e.var}|^2"
    return f"({_render_cexpr(e.left)} {e.op} {_render_cexpr(e.right)})"
