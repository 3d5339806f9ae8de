"""Abstract syntax for set-based state assertions, plus static checks.

An assertion denotes a set of quantum states.  Its shape is a tensor product
of segments; each segment is a union of braced sets; each braced set holds
one or more superposition patterns (diracs) over a shared predicate.  The
static checks here resolve every bitstring variable to a definite qubit
length and reject patterns whose meaning would be ambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .amplitude import AmplitudePoly
from .errors import (
    ConflictingLengthError,
    LengthMismatchError,
    RedundantSummationVarError,
    UnknownLengthError,
)

# -- ket pattern atoms -------------------------------------------------------


@dataclass(frozen=True)
class ConstBit:
    bit: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Compl:
    """The bitwise complement of a variable, written ``~name``."""

    name: str


Atom = ConstBit | Var | Compl


# -- variable constraints ----------------------------------------------------


@dataclass(frozen=True)
class Len:
    var: str
    n: int


@dataclass(frozen=True)
class NeqVar:
    left: str
    right: str


@dataclass(frozen=True)
class NeqConst:
    var: str
    bits: str


@dataclass(frozen=True)
class EqConst:
    var: str
    bits: str


VarCon = Len | NeqVar | NeqConst | EqConst


def varcon_vars(c: VarCon) -> tuple[str, ...]:
    if isinstance(c, Len):
        return (c.var,)
    if isinstance(c, NeqVar):
        return (c.left, c.right)
    return (c.var,)


# -- structure ----------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    """One summand of a dirac: an amplitude, an optional summation, a ket."""

    amplitude: AmplitudePoly
    sum_constraints: tuple[VarCon, ...]
    pattern: tuple[Atom, ...]


Dirac = tuple[Term, ...]


@dataclass(frozen=True)
class SetQ:
    """A braced set: one or more diracs filtered by a shared predicate."""

    diracs: tuple[Dirac, ...]
    predicate: tuple[VarCon, ...] = ()


@dataclass(frozen=True)
class USet:
    alternatives: tuple[SetQ, ...]


@dataclass(frozen=True)
class PSet:
    base: USet
    power: int = 1


# -- amplitude-variable constraint formulas ----------------------------------


@dataclass(frozen=True)
class CNum:
    value: Fraction


@dataclass(frozen=True)
class CRe:
    var: str


@dataclass(frozen=True)
class CIm:
    var: str


@dataclass(frozen=True)
class CAbsSq:
    var: str


@dataclass(frozen=True)
class CArith:
    op: str  # + - * /
    left: "CExpr"
    right: "CExpr"


CExpr = CNum | CRe | CIm | CAbsSq | CArith


@dataclass(frozen=True)
class CCmp:
    op: str  # = != < <= > >=
    left: CExpr
    right: CExpr


@dataclass(frozen=True)
class CNot:
    inner: "CCons"


@dataclass(frozen=True)
class CBin:
    op: str  # && ||
    left: "CCons"
    right: "CCons"


CCons = CCmp | CNot | CBin


def ccons_vars(f: CCons | CExpr) -> frozenset[str]:
    if isinstance(f, (CRe, CIm, CAbsSq)):
        return frozenset((f.var,))
    if isinstance(f, CArith):
        return ccons_vars(f.left) | ccons_vars(f.right)
    if isinstance(f, CCmp):
        return ccons_vars(f.left) | ccons_vars(f.right)
    if isinstance(f, CNot):
        return ccons_vars(f.inner)
    if isinstance(f, CBin):
        return ccons_vars(f.left) | ccons_vars(f.right)
    return frozenset()


@dataclass(frozen=True)
class AssertionAst:
    """A full assertion: tensor segments plus an optional amplitude constraint."""

    segments: tuple[PSet, ...]
    constraint: CCons | None = None

    def setqs(self):
        for seg in self.segments:
            for sq in seg.base.alternatives:
                yield sq


LengthMap = dict[str, int]


# -- length inference ---------------------------------------------------------


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict[str, str] = {}

    def find(self, x: str) -> str:
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: str, y: str) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[rx] = ry


def _all_constraints(ast: AssertionAst):
    for sq in ast.setqs():
        for con in sq.predicate:
            yield con
        for dirac in sq.diracs:
            for term in dirac:
                for con in term.sum_constraints:
                    yield con


def _all_pattern_vars(ast: AssertionAst) -> list[str]:
    out = []
    for sq in ast.setqs():
        for dirac in sq.diracs:
            for term in dirac:
                for atom in term.pattern:
                    if isinstance(atom, (Var, Compl)):
                        out.append(atom.name)
    return out


def infer_lengths(ast: AssertionAst) -> LengthMap:
    """Resolve the qubit length of every bitstring variable in ``ast``.

    Lengths come from explicit ``|v| = n`` constraints and from the operands
    of (in)equality constraints, propagated through same-length classes to a
    fixpoint.  A complemented occurrence ``~v`` shares the length of ``v``.
    Positions carry the rest: every ket inside one union spans the same
    qubits, so a ket whose width is already fixed pins the single unknown
    variable of a sibling ket.
    """
    uf = _UnionFind()
    known: dict[str, tuple[int, str]] = {}  # class root -> (length, witness var)

    def assign(var: str, n: int) -> None:
        root = uf.find(var)
        cur = known.get(root)
        if cur is not None and cur[0] != n:
            raise ConflictingLengthError(var, cur[0], n)
        known[root] = (n, var)

    mentioned: set[str] = set(_all_pattern_vars(ast))
    for con in _all_constraints(ast):
        mentioned.update(varcon_vars(con))
        if isinstance(con, NeqVar):
            uf.union(con.left, con.right)
    for con in _all_constraints(ast):
        if isinstance(con, Len):
            assign(con.var, con.n)
        elif isinstance(con, (NeqConst, EqConst)):
            assign(con.var, len(con.bits))

    changed = True
    while changed:
        changed = False
        for seg in ast.segments:
            width: int | None = None
            pending: list[tuple[int, dict[str, tuple[int, str]]]] = []
            for sq in seg.base.alternatives:
                for dirac in sq.diracs:
                    for term in dirac:
                        bits = 0
                        unknown: dict[str, tuple[int, str]] = {}
                        for atom in term.pattern:
                            if isinstance(atom, ConstBit):
                                bits += 1
                                continue
                            root = uf.find(atom.name)
                            if root in known:
                                bits += known[root][0]
                            else:
                                count, _ = unknown.get(root, (0, ""))
                                unknown[root] = (count + 1, atom.name)
                        if unknown:
                            pending.append((bits, unknown))
                        elif width is None:
                            width = bits
            if width is None:
                continue
            for bits, unknown in pending:
                if len(unknown) != 1:
                    continue
                ((root, (count, witness)),) = unknown.items()
                span = width - bits
                if root not in known and span > 0 and span % count == 0:
                    assign(witness, span // count)
                    changed = True

    lengths: LengthMap = {}
    for var in sorted(mentioned):
        entry = known.get(uf.find(var))
        if entry is None:
            raise UnknownLengthError(var)
        lengths[var] = entry[0]
    return lengths


# -- well-formedness -----------------------------------------------------------


def pattern_width(pattern: tuple[Atom, ...], lengths: LengthMap) -> int:
    total = 0
    for atom in pattern:
        total += 1 if isinstance(atom, ConstBit) else lengths[atom.name]
    return total


def term_vars(term: Term) -> frozenset[str]:
    """Variables mentioned anywhere in a term (pattern or summation)."""
    out = set()
    for atom in term.pattern:
        if isinstance(atom, (Var, Compl)):
            out.add(atom.name)
    for con in term.sum_constraints:
        out.update(varcon_vars(con))
    return frozenset(out)


def pattern_vars(term: Term) -> frozenset[str]:
    return frozenset(
        a.name for a in term.pattern if isinstance(a, (Var, Compl))
    )


def sum_vars(term: Term) -> frozenset[str]:
    out = set()
    for con in term.sum_constraints:
        out.update(varcon_vars(con))
    return frozenset(out)


def outer_vars(sq: SetQ) -> frozenset[str]:
    """Variables a set enumerates over: predicate-bound plus free pattern vars."""
    out = set()
    for con in sq.predicate:
        out.update(varcon_vars(con))
    for dirac in sq.diracs:
        for term in dirac:
            out.update(pattern_vars(term) - sum_vars(term))
    return frozenset(out)


def iterating_vars(term: Term, outer: frozenset[str]) -> frozenset[str]:
    return sum_vars(term) - outer


def check_well_formed(ast: AssertionAst, lengths: LengthMap) -> None:
    """Enforce the three static rules on a length-resolved assertion.

    1. every dirac inside one union denotes states of one qubit count,
    2. the operands of every (in)equality constraint have equal length,
    3. a summation variable that does not occur in its term's ket would
       silently scale the amplitude, so it is rejected.
    """
    for seg in ast.segments:
        widths: list[int] = []
        for sq in seg.base.alternatives:
            for dirac in sq.diracs:
                for term in dirac:
                    widths.append(pattern_width(term.pattern, lengths))
        for w in widths[1:]:
            if w != widths[0]:
                raise LengthMismatchError("union members", widths[0], w)

    for con in _all_constraints(ast):
        if isinstance(con, NeqVar):
            n1, n2 = lengths[con.left], lengths[con.right]
            if n1 != n2:
                raise LengthMismatchError(
                    f"{con.left} != {con.right}", n1, n2
                )
        elif isinstance(con, (NeqConst, EqConst)):
            n1, n2 = lengths[con.var], len(con.bits)
            if n1 != n2:
                op = "=" if isinstance(con, EqConst) else "!="
                raise LengthMismatchError(f"{con.var} {op} {con.bits}", n1, n2)

    for sq in ast.setqs():
        outer = outer_vars(sq)
        for dirac in sq.diracs:
            for term in dirac:
                loose = iterating_vars(term, outer) - pattern_vars(term)
                if loose:
                    raise RedundantSummationVarError(sorted(loose)[0])
