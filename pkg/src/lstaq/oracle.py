"""Brute-force denotation of specifications, for differential testing.

Everything here enumerates variable assignments directly on the syntax
tree; none of the automaton pipeline is involved, so a disagreement
between :func:`denote` and the translated automaton's language points at
a genuine bug on one of the two sides.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

from . import ast as A
from .amplitude import (
    AC_I,
    AC_INV_SQRT2,
    AC_OMEGA,
    AC_ONE,
    COMPLEX,
    POLY_ZERO,
    AlgebraicComplex,
    QSqrt2,
)
from .errors import CapExceededError, InternalError, UnboundComplexVarError
from .lsta import StateVector, permute_state, substitute_state

Valuation = dict[str, AlgebraicComplex]

_ENUM_BITS = 24  # hard ceiling on enumerated assignment bits per set


def _bitstrings(n: int):
    return ("".join(bits) for bits in itertools.product("01", repeat=n))


def varcon_holds(c: A.VarCon, phi: dict[str, str]) -> bool:
    if isinstance(c, A.Len):
        return len(phi[c.var]) == c.n
    if isinstance(c, A.NeqVar):
        return phi[c.left] != phi[c.right]
    if isinstance(c, A.NeqConst):
        return phi[c.var] != c.bits
    if isinstance(c, A.EqConst):
        return phi[c.var] == c.bits
    raise InternalError(f"unknown constraint {c!r}")


def _atom_bits(pattern, phi: dict[str, str]) -> str:
    out = []
    for atom in pattern:
        if isinstance(atom, A.ConstBit):
            out.append(str(atom.bit))
        elif isinstance(atom, A.Var):
            out.append(phi[atom.name])
        else:
            out.append("".join("1" if b == "0" else "0" for b in phi[atom.name]))
    return "".join(out)


def _assignments(names, lengths: A.LengthMap, cap: int):
    bits = sum(lengths[v] for v in names)
    if bits > max(2 * cap, _ENUM_BITS):
        raise CapExceededError(bits, cap)
    pools = [_bitstrings(lengths[v]) for v in names]
    for combo in itertools.product(*[list(p) for p in pools]):
        yield dict(zip(names, combo))


def _denote_setq(sq: A.SetQ, lengths: A.LengthMap, theta: Valuation | None,
                 cap: int) -> set[StateVector]:
    width = A.pattern_width(sq.diracs[0][0].pattern, lengths)
    outer = sorted(A.outer_vars(sq))
    states: set[StateVector] = set()
    for phi in _assignments(outer, lengths, cap):
        if not all(varcon_holds(c, phi) for c in sq.predicate):
            continue
        for dirac in sq.diracs:
            amp_map: dict[str, object] = {}
            for term in dirac:
                inner = sorted(A.iterating_vars(term, frozenset(outer)))
                amp = term.amplitude
                if theta is not None:
                    amp = amp.substitute(theta)
                for iphi in _assignments(inner, lengths, cap):
                    full = {**phi, **iphi}
                    if not all(varcon_holds(c, full)
                               for c in term.sum_constraints):
                        continue
                    s = _atom_bits(term.pattern, full)
                    amp_map[s] = amp_map.get(s, POLY_ZERO) + amp
            states.add(StateVector.of(width, amp_map, COMPLEX))
    return states


def _tensor_pair(x: StateVector, y: StateVector) -> StateVector:
    entries = {}
    for s1, a1 in x.entries:
        for s2, a2 in y.entries:
            entries[s1 + s2] = a1 * a2
    return StateVector.of(x.n + y.n, entries, COMPLEX)


def tensor_sets(xs: set[StateVector], ys: set[StateVector]) -> set[StateVector]:
    return {_tensor_pair(x, y) for x in xs for y in ys}


def denote(ast: A.AssertionAst, lengths: A.LengthMap | None = None,
           theta: Valuation | None = None, cap: int = 12) -> frozenset[StateVector]:
    """Enumerate the set of states one assertion describes.

    Predicate constraints filter the enumerated assignments; summation
    constraints filter each term's expansion (an emptied summation leaves
    the zero vector as a member).  The trailing amplitude-constraint
    formula is ignored here: choosing ``theta`` is the caller's business.
    """
    if lengths is None:
        lengths = A.infer_lengths(ast)
        A.check_well_formed(ast, lengths)
    total = 0
    for seg in ast.segments:
        term = seg.base.alternatives[0].diracs[0][0]
        total += A.pattern_width(term.pattern, lengths) * seg.power
    if total > cap:
        raise CapExceededError(total, cap)

    seg_sets: list[set[StateVector]] = []
    for seg in ast.segments:
        base: set[StateVector] = set()
        for sq in seg.base.alternatives:
            base |= _denote_setq(sq, lengths, theta, cap)
        out = base
        for _ in range(seg.power - 1):
            out = tensor_sets(out, base)
        seg_sets.append(out)
    return frozenset(reduce(tensor_sets, seg_sets))


# ---------------------------------------------------------------------------
# Valuations: deterministic samples and constraint evaluation.
# ---------------------------------------------------------------------------

_POOL: tuple[AlgebraicComplex, ...] = (
    AC_ONE,
    AC_INV_SQRT2,
    AC_I,
    AlgebraicComplex.from_int(2),
    AlgebraicComplex.make(1, 0, 1, 0, 2),  # (1+i)/2
    AlgebraicComplex.make(1, 0, 0, 0, 2),  # 1/2
    AlgebraicComplex.from_int(-1),
    AC_OMEGA,
)

_SEARCH_LIMIT = 4096


def amplitude_vars(asts) -> list[str]:
    """All complex-amplitude variable names, sorted."""
    names: set[str] = set()
    for ast in asts:
        for sq in ast.setqs():
            for dirac in sq.diracs:
                for term in dirac:
                    names |= term.amplitude.variables()
        if ast.constraint is not None:
            names |= A.ccons_vars(ast.constraint)
    return sorted(names)


def _cexpr_val(e: A.CExpr, theta: Valuation) -> QSqrt2:
    if isinstance(e, A.CNum):
        return QSqrt2(e.value)
    if isinstance(e, (A.CRe, A.CIm, A.CAbsSq)):
        if e.var not in theta:
            raise UnboundComplexVarError(e.var)
        re = QSqrt2(*theta[e.var].real_parts())
        im = QSqrt2(*theta[e.var].imag_parts())
        if isinstance(e, A.CRe):
            return re
        if isinstance(e, A.CIm):
            return im
        return re * re + im * im
    if isinstance(e, A.CArith):
        left, right = _cexpr_val(e.left, theta), _cexpr_val(e.right, theta)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        if e.op == "/":
            return left / right
    raise InternalError(f"unknown arithmetic expression {e!r}")


def ccons_eval(f: A.CCons, theta: Valuation) -> bool:
    """Exact truth of an amplitude-constraint formula under ``theta``."""
    if isinstance(f, A.CCmp):
        left, right = _cexpr_val(f.left, theta), _cexpr_val(f.right, theta)
        return {
            "=": left == right,
            "!=": left != right,
            "<": left < right,
            "<=": left <= right,
            ">": right < left,
            ">=": right <= left,
        }[f.op]
    if isinstance(f, A.CNot):
        return not ccons_eval(f.inner, theta)
    if isinstance(f, A.CBin):
        if f.op == "&&":
            return ccons_eval(f.left, theta) and ccons_eval(f.right, theta)
        return ccons_eval(f.left, theta) or ccons_eval(f.right, theta)
    raise InternalError(f"unknown constraint formula {f!r}")


def satisfying_theta(constraint: A.CCons, names) -> Valuation | None:
    """First pool valuation satisfying ``constraint``, searched deterministically."""
    free = sorted(A.ccons_vars(constraint))
    for i, combo in enumerate(itertools.product(_POOL, repeat=len(free))):
        if i >= _SEARCH_LIMIT:
            return None
        theta = dict(zip(free, combo))
        if ccons_eval(constraint, theta):
            out = {v: _POOL[(1 + i) % len(_POOL)]
                   for i, v in enumerate(names)}
            out.update(theta)
            return out
    return None


def sample_thetas(asts, count: int = 3) -> list[Valuation]:
    """Deterministic valuations covering every amplitude variable.

    Includes, per trailing constraint formula, one valuation satisfying it
    whenever the bounded pool search finds one.
    """
    names = amplitude_vars(asts)
    if not names:
        return []
    thetas = [
        {v: _POOL[(t + 2 * i) % len(_POOL)] for i, v in enumerate(names)}
        for t in range(count)
    ]
    for ast in asts:
        if ast.constraint is None:
            continue
        extra = satisfying_theta(ast.constraint, names)
        if extra is not None and extra not in thetas:
            thetas.append(extra)
    return thetas


# ---------------------------------------------------------------------------
# The differential check.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AssertionReport:
    index: int
    ok: bool
    detail: str


@dataclass(frozen=True)
class DiffReport:
    ok: bool
    assertions: tuple[AssertionReport, ...]

    def __str__(self) -> str:
        lines = [f"assertion {r.index}: {'ok' if r.ok else 'MISMATCH'} — {r.detail}"
                 for r in self.assertions]
        return "\n".join(lines)


def _compare(lang, oracle) -> tuple[bool, str]:
    """Exact set comparison, ignoring zero members on both sides.

    The pipeline keeps a member whose amplitudes are all filtered away
    (it denotes the zero vector), while the enumeration drops assignments
    excluded by the predicate; both collapse to "no physical state".
    """
    lhs = {s for s in lang if not s.is_zero}
    rhs = {s for s in oracle if not s.is_zero}
    if lhs == rhs:
        return True, f"{len(rhs)} members match"
    missing = sorted(str(s) for s in rhs - lhs)
    extra = sorted(str(s) for s in lhs - rhs)
    bits = []
    if missing:
        bits.append(f"automaton misses {missing[0]}")
    if extra:
        bits.append(f"automaton adds {extra[0]}")
    return False, "; ".join(bits)


def differential_check(asts, thetas: list[Valuation] | None = None,
                       cap: int = 12) -> DiffReport:
    """Translate and compare against the brute-force enumeration.

    Specifications with symbolic amplitudes are compared after
    substituting each sampled valuation into both sides.
    """
    # The translation pipeline is imported lazily: the oracle must stay
    # importable (and meaningful) without it.
    from .build import translate
    from .lsta import enumerate_language

    asts = list(asts)
    result = translate(asts)
    n = result.qubits
    if n > cap:
        raise CapExceededError(n, cap)
    names = amplitude_vars(asts)
    if thetas is None:
        thetas = sample_thetas(asts)

    reports = []
    for i, (ast, ar) in enumerate(zip(asts, result.assertions)):
        auto = enumerate_language(ar.automaton, n)
        oracle = {permute_state(s, result.permutation)
                  for s in denote(ast, cap=cap)}
        if not names:
            ok, detail = _compare(auto, oracle)
        else:
            ok, detail = True, "no valuations sampled"
            for theta in thetas:
                li = {substitute_state(s, theta) for s in auto}
                oi = {substitute_state(s, theta) for s in oracle}
                ok, detail = _compare(li, oi)
                if not ok:
                    pretty = ", ".join(
                        f"{k}={v}" for k, v in sorted(theta.items()))
                    detail += f" (theta: {pretty})"
                    break
            else:
                detail = f"{len(thetas)} valuations agree"
        reports.append(AssertionReport(i, ok, detail))
    return DiffReport(all(r.ok for r in reports), tuple(reports))
