"""Levelwise automaton construction and end-to-end assembly.

The entry point is :func:`translate`, which runs the whole pipeline:
canonicalize, align, abstract constants, reorder slots and qubits, expand
slices, and compose the per-slice automata with tensor/union folds and the
two amplitude-domain crossings (``filter_f``, ``filter_tau``).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

from . import ast as A
from .amplitude import (
    COMPLEX,
    POLY_ZERO,
    TAG,
    VALUATION,
    AmplitudePoly,
    Semiring,
    ValAmp,
)
from .errors import EmptyStateError, InternalError, MissingLegendEntryError
from .lsta import (
    Internal,
    Leaf,
    Lsta,
    StateVector,
    map_leaves,
    mk_lsta,
    n_leaves,
    tensor,
    union,
    validate,
)
from .preprocess import (
    AlignedSpec,
    FreshNamer,
    GlobalPartition,
    canonicalize,
    constant_abstraction,
    tensor_alignment_check,
    variable_alignment_check,
)
from .qubit_reorder import ConstraintTable, QubitSlice, expand_qubit_slices
from .var_reorder import (
    SetV,
    SlotOrder,
    TagLegend,
    build_dependency_graph,
    compute_slot_order,
    project_setP,
)

_ONE = frozenset({1})


# ---------------------------------------------------------------------------
# Levelwise construction of a single-state automaton.
# ---------------------------------------------------------------------------


def build_state_lsta(psi: StateVector, semiring: Semiring) -> Lsta:
    """Build the compact levelwise automaton accepting exactly ``psi``.

    One leaf state per nonzero basis string, one active state per proper
    prefix, and a per-level sink chain for the missing subtrees.  When the
    state has full support the sinks are never referenced and are skipped
    entirely.  The result satisfies ``|Δ| ≤ (N+1)(n+1)`` for ``N`` nonzero
    amplitudes over ``n`` qubits.
    """
    if psi.is_zero:
        raise EmptyStateError()
    n = psi.n
    if n < 1:
        raise InternalError("cannot build an automaton over zero qubits")
    full = len(psi.entries) == (1 << n)

    names: dict[int, str] = {}
    counter = 0

    def new_state(name: str) -> int:
        nonlocal counter
        sid = counter
        counter += 1
        names[sid] = name
        return sid

    internal: list[Internal] = []
    leaves: list[Leaf] = []

    level: dict[str, int] = {}
    for s, amp in psi.entries:
        level[s] = new_state(f"q_{s}")
        leaves.append(Leaf(level[s], _ONE, amp))
    sink: int | None = None
    if not full:
        sink = new_state(f"q_bot{n}")
        leaves.append(Leaf(sink, _ONE, semiring.zero))

    for depth in range(n - 1, 0, -1):
        prev, prev_sink = level, sink
        level, sink = {}, None
        if not full:
            assert prev_sink is not None
            sink = new_state(f"q_bot{depth}")
            internal.append(Internal(sink, _ONE, prev_sink, prev_sink))
        for x in sorted({p[:depth] for p in prev}):
            level[x] = new_state(f"q_{x}")
            internal.append(Internal(
                level[x], _ONE,
                prev.get(x + "0", prev_sink),
                prev.get(x + "1", prev_sink),
            ))

    root = new_state("q_eps")
    internal.append(Internal(
        root, _ONE, level.get("0", sink), level.get("1", sink)
    ))

    out = mk_lsta(semiring, root, internal, leaves, names)
    assert out.size <= (len(psi.entries) + 1) * (n + 1)
    validate(out)
    return out


def _zero_lsta(n: int, semiring: Semiring) -> Lsta:
    """The automaton whose single member is the ``n``-qubit zero vector.

    An empty summation denotes the zero vector, which remains a legitimate
    set member; it needs its own shape since the levelwise construction
    requires a nonzero amplitude.
    """
    internal = [Internal(k, _ONE, k + 1, k + 1) for k in range(n)]
    leaves = [Leaf(n, _ONE, semiring.zero)]
    names = {0: "q_eps"}
    names.update({k: f"q_bot{k}" for k in range(1, n + 1)})
    out = mk_lsta(semiring, 0, internal, leaves, names)
    validate(out)
    return out


def build_setq_lsta(states: Sequence[StateVector], semiring: Semiring) -> Lsta:
    """Union-fold of levelwise automata, one per member state."""
    if not states:
        raise EmptyStateError()
    if len({psi.n for psi in states}) != 1:
        raise InternalError("set members have differing qubit counts")

    def build(psi: StateVector) -> Lsta:
        if psi.is_zero:
            return _zero_lsta(psi.n, semiring)
        return build_state_lsta(psi, semiring)

    out = build(states[0])
    for psi in states[1:]:
        out = union(out, build(psi))
    return out


# ---------------------------------------------------------------------------
# Amplitude-domain crossings.
# ---------------------------------------------------------------------------


def filter_f(e: ValAmp) -> frozenset[int]:
    """Keep the tags whose inequality valuation is all-true."""
    return frozenset(m for m, bools in e.entries if all(bools))


def filter_tau(e: frozenset, legend: TagLegend, uid: int) -> AmplitudePoly:
    """Replace surviving tags by the sum of their recorded amplitudes."""
    out = POLY_ZERO
    for m in sorted(e):
        key = (uid, m)
        if key not in legend:
            raise MissingLegendEntryError(key)
        out = out + legend[key]
    return out


# ---------------------------------------------------------------------------
# Qubit permutation realized by the reordering stages.
# ---------------------------------------------------------------------------


def qubit_permutation(partition: GlobalPartition,
                      orders: Sequence[SlotOrder]) -> tuple[int, ...]:
    """Map each output qubit position to the source position it reads.

    Component by component, the k-th qubit of every slot in the component
    is emitted before the (k+1)-th of any; entry ``new_to_old[k-1]`` is the
    1-based source position feeding output position ``k``.
    """
    new_to_old: list[int] = []
    for seg, order in enumerate(orders):
        slots = {sl.index: sl for sl in partition.of_segment(seg)}
        for comp in order:
            widths = {slots[i].width for i in comp}
            if len(widths) != 1:
                raise InternalError(
                    f"slot component {comp} mixes widths {sorted(widths)}")
            for j in range(widths.pop()):
                for i in comp:
                    new_to_old.append(slots[i].start + j)
    if sorted(new_to_old) != list(range(1, partition.total_qubits + 1)):
        raise InternalError("qubit reordering is not a permutation")
    return tuple(new_to_old)


# ---------------------------------------------------------------------------
# The full pipeline.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AssertionResult:
    """One translated assertion: the automaton plus its side condition."""

    automaton: Lsta
    constraint: object | None
    stats: dict


@dataclass(frozen=True)
class TranslationResult:
    assertions: tuple[AssertionResult, ...]
    aligned: AlignedSpec
    orders: tuple[SlotOrder, ...]
    permutation: tuple[int, ...]
    legend: TagLegend
    expansions: tuple[tuple[int, int, SetV, ConstraintTable, tuple[QubitSlice, ...]], ...]
    seconds: float

    @property
    def qubits(self) -> int:
        return self.aligned.partition.total_qubits


def measure(ast: A.AssertionAst, qubits: int, automaton: Lsta,
            peaks: dict[str, int], seconds: float) -> dict:
    """Count the structural size parameters and the realized sizes.

    The envelope is ``2^(N_term·2^N_vc) · 2^N_vc · N_term · N_union · L ·
    N_amp``; the final size is checked against it softly (recorded, not
    asserted) since the per-operation bounds are already enforced.  The
    comparison allows a fixed factor of 8 standing in for the constant the
    asymptotic statement leaves unspecified.  The envelope is kept as a
    base-2 logarithm: its doubly-exponential leading factor overflows any
    direct representation already for a few dozen constraints.
    """
    n_term = 0
    n_union = 0
    n_vc = 0
    amps = set()
    for seg in ast.segments:
        n_union += len(seg.base.alternatives)
        for sq in seg.base.alternatives:
            n_vc += len(sq.predicate)
            for dirac in sq.diracs:
                n_term += len(dirac)
                for t in dirac:
                    n_vc += len(t.sum_constraints)
                    amps.add(t.amplitude)
    n_amp = len(amps)
    log2_envelope = (
        math.inf if n_vc >= 64
        else n_term * float(2 ** n_vc) + n_vc
        + math.log2(max(n_term, 1)) + math.log2(max(n_union, 1))
        + math.log2(max(qubits, 1)) + math.log2(max(n_amp, 1)))
    stats = {
        "qubits": qubits,
        "n_term": n_term,
        "n_vc": n_vc,
        "n_union": n_union,
        "n_amp": n_amp,
        "size": automaton.size,
        "n_leaves": n_leaves(automaton),
        "log2_envelope": log2_envelope,
        "within_envelope": math.log2(automaton.size) <= 3 + log2_envelope,
        "seconds": seconds,
    }
    stats.update({f"size_{k}_max": v for k, v in peaks.items()})
    return stats


def translate(asts: Sequence[A.AssertionAst]) -> TranslationResult:
    """Translate assertions sharing one qubit layout into automata."""
    t0 = time.perf_counter()
    asts = list(asts)
    if not asts:
        raise InternalError("translation requires at least one assertion")

    for ast in asts:
        A.check_well_formed(ast, A.infer_lengths(ast))

    namer = FreshNamer.for_asts(asts)
    canon = [canonicalize(ast, namer) for ast in asts]
    lengths: A.LengthMap = {}
    for c in canon:
        lengths.update(A.infer_lengths(c))

    seg_lengths = tensor_alignment_check(canon, lengths)
    variable_alignment_check(canon, lengths, seg_lengths)
    aligned = constant_abstraction(canon, lengths, seg_lengths, namer)

    orders: list[SlotOrder] = []
    for s in range(len(seg_lengths)):
        slot_ids = tuple(sl.index for sl in aligned.partition.of_segment(s))
        setps = [sp for assertion in aligned.assertions
                 for sp in assertion.segments[s]]
        orders.append(compute_slot_order(
            build_dependency_graph(setps, slot_ids)))
    permutation = qubit_permutation(aligned.partition, orders)

    legend: TagLegend = {}
    expansions: list = []
    results: list[AssertionResult] = []
    for idx, assertion in enumerate(aligned.assertions):
        ta = time.perf_counter()
        peaks = {"slice": 0, "setv": 0, "setp": 0, "segment": 0}
        seg_autos: list[Lsta] = []
        for s in range(len(seg_lengths)):
            slot_ids = tuple(
                sl.index for sl in aligned.partition.of_segment(s))
            alt_autos: list[Lsta] = []
            for sp in assertion.segments[s]:
                mv_autos: list[Lsta] = []
                for v in project_setP(sp, orders[s], slot_ids, legend):
                    table, slices = expand_qubit_slices(v, aligned.lengths)
                    expansions.append((idx, s, v, table, tuple(slices)))
                    mq: Lsta | None = None
                    for sl in slices:
                        piece = build_setq_lsta(
                            [c.state for c in sl.cases], VALUATION)
                        mq = piece if mq is None else tensor(mq, piece)
                        peaks["slice"] = max(peaks["slice"], mq.size)
                    assert mq is not None
                    mv = map_leaves(mq, filter_f, TAG)
                    peaks["setv"] = max(peaks["setv"], mv.size)
                    mv_autos.append(mv)
                mp = mv_autos[0]
                for x in mv_autos[1:]:
                    mp = tensor(mp, x)
                mp = map_leaves(
                    mp, lambda e, _u=sp.uid: filter_tau(e, legend, _u),
                    COMPLEX)
                peaks["setp"] = max(peaks["setp"], mp.size)
                alt_autos.append(mp)
            seg_auto = alt_autos[0]
            for x in alt_autos[1:]:
                seg_auto = union(seg_auto, x)
            peaks["segment"] = max(peaks["segment"], seg_auto.size)
            seg_autos.append(seg_auto)
        final = seg_autos[0]
        for x in seg_autos[1:]:
            final = tensor(final, x)
        validate(final)
        stats = measure(canon[idx], aligned.partition.total_qubits, final,
                        peaks, time.perf_counter() - ta)
        results.append(
            AssertionResult(final, canon[idx].constraint, stats))

    return TranslationResult(
        tuple(results), aligned, tuple(orders), permutation, legend,
        tuple(expansions), time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# Reports.
# ---------------------------------------------------------------------------


def render_stats(result: TranslationResult) -> str:
    """Flat key/value report, one line per measured parameter."""
    lines = []
    for i, ar in enumerate(result.assertions):
        for k, v in sorted(ar.stats.items()):
            if isinstance(v, float):
                v = f"{v:.6f}"
            lines.append(f"assertion{i}.{k} {v}")
    lines.append("permutation " + ",".join(map(str, result.permutation)))
    lines.append(f"seconds {result.seconds:.6f}")
    return "\n".join(lines) + "\n"


def render_orders(result: TranslationResult) -> str:
    """Slot layout, component order, and the realized qubit permutation."""
    lines = []
    for s, order in enumerate(result.orders):
        slots = result.aligned.partition.of_segment(s)
        span = " ".join(
            f"slot{sl.index}=[{sl.start}..{sl.end - 1}]" for sl in slots)
        comps = " ".join(
            "{" + ",".join(map(str, comp)) + "}" for comp in order)
        lines.append(f"segment {s + 1}: {span}")
        lines.append(f"segment {s + 1} order: {comps}")
    lines.append("new_to_old " + ",".join(map(str, result.permutation)))
    return "\n".join(lines) + "\n"
