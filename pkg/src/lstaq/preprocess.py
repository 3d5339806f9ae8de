"""Preprocessing: rewrite assertions into slot-aligned constant-free form.

Four steps run in order over a whole translation job (all assertions that
must share one qubit ordering):

1. canonicalize    -- expand tensor powers, split multi-state sets into
                      unions of single-state sets, alpha-rename every scope.
2. tensor_alignment_check    -- equal segment counts and per-segment widths.
3. variable_alignment_check  -- variable intervals pairwise disjoint or equal.
4. constant_abstraction      -- compute the global slot partition; replace
                                constant bits by fresh summation variables
                                bound with equality constraints.

The output patterns mention only variables, one per slot, which is the shape
the slot-reordering stage expects.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ast as A
from .errors import (
    InternalError,
    ScopeError,
    SegmentCountMismatchError,
    SegmentLengthMismatchError,
    VariableOverlapError,
)


class FreshNamer:
    """Deterministic fresh-name source avoiding a fixed collision pool."""

    def __init__(self, used: set[str] | None = None) -> None:
        self.used = set(used or ())

    @classmethod
    def for_asts(cls, asts) -> "FreshNamer":
        used: set[str] = set()
        for ast in asts:
            for sq in ast.setqs():
                for c in sq.predicate:
                    used.update(A.varcon_vars(c))
                for dirac in sq.diracs:
                    for term in dirac:
                        for c in term.sum_constraints:
                            used.update(A.varcon_vars(c))
                        for atom in term.pattern:
                            if not isinstance(atom, A.ConstBit):
                                used.add(atom.name)
        return cls(used)

    def fresh(self, base: str) -> str:
        n = 0
        while f"{base}{n}" in self.used:
            n += 1
        name = f"{base}{n}"
        self.used.add(name)
        return name


# ---------------------------------------------------------------------------
# Step 1: canonicalization.
# ---------------------------------------------------------------------------


def _ordered_unique(names) -> list[str]:
    seen: list[str] = []
    for n in names:
        if n not in seen:
            seen.append(n)
    return seen


def _sub_atom(atom: A.Atom, mapping: dict[str, str]) -> A.Atom:
    if isinstance(atom, A.Var):
        return A.Var(mapping.get(atom.name, atom.name))
    if isinstance(atom, A.Compl):
        return A.Compl(mapping.get(atom.name, atom.name))
    return atom


def _sub_varcon(c: A.VarCon, mapping: dict[str, str]) -> A.VarCon:
    if isinstance(c, A.Len):
        return A.Len(mapping.get(c.var, c.var), c.n)
    if isinstance(c, A.NeqVar):
        return A.NeqVar(mapping.get(c.left, c.left), mapping.get(c.right, c.right))
    if isinstance(c, A.NeqConst):
        return A.NeqConst(mapping.get(c.var, c.var), c.bits)
    return A.EqConst(mapping.get(c.var, c.var), c.bits)


def _rename_setq(sq: A.SetQ, namer: FreshNamer) -> A.SetQ:
    (dirac,) = sq.diracs
    outer = A.outer_vars(sq)
    outer_order = _ordered_unique(
        [v for c in sq.predicate for v in A.varcon_vars(c) if v in outer]
        + [a.name for t in dirac for a in t.pattern
           if not isinstance(a, A.ConstBit) and a.name in outer]
    )
    omap = {v: namer.fresh(v) for v in outer_order}
    terms = []
    for term in dirac:
        inner = A.iterating_vars(term, outer)
        inner_order = _ordered_unique(
            [v for c in term.sum_constraints for v in A.varcon_vars(c) if v in inner]
            + [a.name for a in term.pattern
               if not isinstance(a, A.ConstBit) and a.name in inner]
        )
        tmap = dict(omap)
        tmap.update({v: namer.fresh(v) for v in inner_order})
        terms.append(A.Term(
            term.amplitude,
            tuple(_sub_varcon(c, tmap) for c in term.sum_constraints),
            tuple(_sub_atom(a, tmap) for a in term.pattern),
        ))
    predicate = tuple(_sub_varcon(c, omap) for c in sq.predicate)
    return A.SetQ((tuple(terms),), predicate)


def canonicalize(ast: A.AssertionAst, namer: FreshNamer | None = None) -> A.AssertionAst:
    """Expand powers, split multi-state sets, and alpha-rename all scopes.

    The denoted state set is unchanged.  Copies produced by power expansion
    are renamed independently, which is exactly the independence the tensor
    power means.
    """
    namer = namer or FreshNamer.for_asts([ast])
    segments = []
    for pset in ast.segments:
        for _ in range(pset.power):
            alts = []
            for sq in pset.base.alternatives:
                for dirac in sq.diracs:
                    alts.append(_rename_setq(A.SetQ((dirac,), sq.predicate), namer))
            segments.append(A.PSet(A.USet(tuple(alts)), 1))
    return A.AssertionAst(tuple(segments), ast.constraint)


# ---------------------------------------------------------------------------
# Step 2: tensor alignment.
# ---------------------------------------------------------------------------


def tensor_alignment_check(asts, lengths: A.LengthMap) -> list[int]:
    """Check segment structure across assertions; return per-segment widths."""
    counts = sorted({len(ast.segments) for ast in asts})
    if len(counts) > 1:
        raise SegmentCountMismatchError(counts[0], counts[1])
    seg_lengths: list[int] = []
    for s in range(counts[0]):
        widths = sorted({
            A.pattern_width(term.pattern, lengths)
            for ast in asts
            for sq in ast.segments[s].base.alternatives
            for dirac in sq.diracs
            for term in dirac
        })
        if len(widths) > 1:
            raise SegmentLengthMismatchError(s + 1, widths[0], widths[1])
        seg_lengths.append(widths[0])
    return seg_lengths


# ---------------------------------------------------------------------------
# Step 3: variable alignment.
# ---------------------------------------------------------------------------


def _occurrence_intervals(asts, lengths: A.LengthMap, seg_lengths: list[int]):
    """Yield (var, start, end, segment) for every variable occurrence.

    Positions are global and 1-based; constants advance the cursor but
    produce no interval.
    """
    starts = [1]
    for w in seg_lengths:
        starts.append(starts[-1] + w)
    for ast in asts:
        for s, pset in enumerate(ast.segments):
            for sq in pset.base.alternatives:
                for dirac in sq.diracs:
                    for term in dirac:
                        pos = starts[s]
                        for atom in term.pattern:
                            if isinstance(atom, A.ConstBit):
                                pos += 1
                            else:
                                w = lengths[atom.name]
                                yield atom.name, pos, pos + w, s
                                pos += w
                        if pos != starts[s + 1]:
                            raise InternalError(
                                f"segment {s + 1} pattern width drifted")


def variable_alignment_check(asts, lengths: A.LengthMap,
                             seg_lengths: list[int]) -> None:
    """Require all occurrence intervals to be pairwise disjoint or identical."""
    intervals: dict[tuple[int, int], str] = {}
    for var, start, end, _seg in _occurrence_intervals(asts, lengths, seg_lengths):
        intervals.setdefault((start, end), var)
    spans = sorted(intervals)
    for (a, b), (c, d) in zip(spans, spans[1:]):
        if c < b:
            raise VariableOverlapError(intervals[(a, b)], (a, b),
                                       intervals[(c, d)], (c, d))


# ---------------------------------------------------------------------------
# Step 4: constant abstraction.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Slot:
    """One interval of the global partition (1-based, half-open)."""

    index: int
    segment: int
    start: int
    width: int

    @property
    def end(self) -> int:
        return self.start + self.width


@dataclass(frozen=True)
class GlobalPartition:
    slots: tuple[Slot, ...]
    segment_lengths: tuple[int, ...]

    def of_segment(self, segment: int) -> tuple[Slot, ...]:
        return tuple(s for s in self.slots if s.segment == segment)

    def at(self, start: int) -> Slot:
        for s in self.slots:
            if s.start == start:
                return s
        raise InternalError(f"no slot starts at qubit {start}")

    @property
    def total_qubits(self) -> int:
        return sum(self.segment_lengths)


@dataclass(frozen=True)
class PAtom:
    """A variable occurrence filling one slot; the bit may be complemented."""

    var: str
    complemented: bool = False


@dataclass(frozen=True)
class PTerm:
    amplitude: object
    sum_constraints: tuple[A.VarCon, ...]
    pattern: tuple[PAtom, ...]


@dataclass(frozen=True)
class SetP:
    """A single-state slot-aligned set; ``uid`` keys the tag legend."""

    uid: int
    terms: tuple[PTerm, ...]
    predicate: tuple[A.VarCon, ...]


@dataclass(frozen=True)
class AlignedAssertion:
    segments: tuple[tuple[SetP, ...], ...]
    constraint: object | None


@dataclass(frozen=True)
class AlignedSpec:
    assertions: tuple[AlignedAssertion, ...]
    partition: GlobalPartition
    lengths: dict[str, int]


def _build_partition(asts, lengths, seg_lengths) -> GlobalPartition:
    covered = sorted({
        (start, end)
        for _v, start, end, _s in _occurrence_intervals(asts, lengths, seg_lengths)
    })
    starts = [1]
    for w in seg_lengths:
        starts.append(starts[-1] + w)
    slots: list[Slot] = []
    for s, width in enumerate(seg_lengths):
        seg_begin, seg_end = starts[s], starts[s] + width
        inside = [(a, b) for a, b in covered if seg_begin <= a and b <= seg_end]
        pos = seg_begin
        for a, b in inside:
            if pos < a:
                slots.append(Slot(0, s, pos, a - pos))
            slots.append(Slot(0, s, a, b - a))
            pos = b
        if pos < seg_end:
            slots.append(Slot(0, s, pos, seg_end - pos))
    return GlobalPartition(
        tuple(Slot(i + 1, sl.segment, sl.start, sl.width)
              for i, sl in enumerate(slots)),
        tuple(seg_lengths),
    )


def _abstract_term(term: A.Term, seg_slots: tuple[Slot, ...], seg_start: int,
                   lengths: dict[str, int], namer: FreshNamer):
    """Rewrite one term's pattern into one atom per slot."""
    atoms: list[PAtom] = []
    extra: list[A.VarCon] = []
    by_start = {s.start: s for s in seg_slots}
    pos = seg_start
    pending = ""  # accumulated constant bits ending just before pos

    def flush() -> None:
        nonlocal pending
        start = pos - len(pending)
        while pending:
            slot = by_start.get(start)
            if slot is None or slot.width > len(pending):
                raise InternalError("constant run does not align with slots")
            fresh = namer.fresh("c")
            lengths[fresh] = slot.width
            atoms.append(PAtom(fresh))
            extra.append(A.EqConst(fresh, pending[: slot.width]))
            pending = pending[slot.width:]
            start += slot.width
    for atom in term.pattern:
        if isinstance(atom, A.ConstBit):
            pending += str(atom.bit)
            pos += 1
            continue
        flush()
        w = lengths[atom.name]
        slot = by_start.get(pos)
        if slot is None or slot.width != w:
            raise InternalError(
                f"variable '{atom.name}' does not align with its slot")
        atoms.append(PAtom(atom.name, isinstance(atom, A.Compl)))
        pos += w
    flush()
    return PTerm(term.amplitude, term.sum_constraints + tuple(extra),
                 tuple(atoms))


def _check_constrained_vars_occur(sq: A.SetQ) -> None:
    in_pattern = {
        a.name
        for dirac in sq.diracs for t in dirac for a in t.pattern
        if not isinstance(a, A.ConstBit)
    }
    mentioned = [v for c in sq.predicate for v in A.varcon_vars(c)]
    for dirac in sq.diracs:
        for t in dirac:
            mentioned += [v for c in t.sum_constraints for v in A.varcon_vars(c)]
    for v in mentioned:
        if v not in in_pattern:
            raise ScopeError(
                f"variable '{v}' is constrained but never appears in a pattern")


def constant_abstraction(asts, lengths: A.LengthMap, seg_lengths: list[int],
                         namer: FreshNamer) -> AlignedSpec:
    """Compute the global partition and rewrite every set into a SetP."""
    partition = _build_partition(asts, lengths, seg_lengths)
    out_lengths = dict(lengths)
    starts = [1]
    for w in seg_lengths:
        starts.append(starts[-1] + w)
    uid = 0
    assertions = []
    for ast in asts:
        segments = []
        for s, pset in enumerate(ast.segments):
            seg_slots = partition.of_segment(s)
            alts = []
            for sq in pset.base.alternatives:
                _check_constrained_vars_occur(sq)
                (dirac,) = sq.diracs
                terms = tuple(
                    _abstract_term(t, seg_slots, starts[s], out_lengths, namer)
                    for t in dirac
                )
                alts.append(SetP(uid, terms, sq.predicate))
                uid += 1
            segments.append(tuple(alts))
        assertions.append(AlignedAssertion(tuple(segments), ast.constraint))
    return AlignedSpec(tuple(assertions), partition, out_lengths)


# ---------------------------------------------------------------------------
# Debug rendering (for --dump-aligned).
# ---------------------------------------------------------------------------


def render_aligned(spec: AlignedSpec) -> str:
    from .parser import render_amplitude, render_varcon

    def patom(a: PAtom) -> str:
        return ("~" if a.complemented else "") + a.var

    lines = []
    for slot in spec.partition.slots:
        lines.append(
            f"// slot {slot.index}: qubits [{slot.start},{slot.end})"
            f" segment {slot.segment + 1}"
        )
    for ai, assertion in enumerate(spec.assertions):
        parts = []
        for alts in assertion.segments:
            rendered = []
            for sp in alts:
                body = " + ".join(
                    render_amplitude(t.amplitude)
                    + (" sum[ " + ", ".join(render_varcon(c) for c in t.sum_constraints) + " ]"
                       if t.sum_constraints else " ")
                    + "|" + " ".join(patom(a) for a in t.pattern) + ">"
                    for t in sp.terms
                )
                if sp.predicate:
                    body += " : " + ", ".join(render_varcon(c) for c in sp.predicate)
                rendered.append("{ " + body + " }")
            parts.append(" \\/ ".join(rendered))
        lines.append(f"// assertion {ai}")
        lines.append(" (x) ".join(parts))
    return "\n".join(lines) + "\n"
