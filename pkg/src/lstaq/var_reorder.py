"""Slot dependency analysis and the tensor decomposition it licenses.

Two slots of a segment are dependent when a variable occupies both
(recurrence) or variables at the two slots are related by an inequality.
Independent groups of slots can be translated separately and recombined
with tensor products, which is where the exponential-to-linear cost drop
comes from.  The groups are the connected components of an undirected
graph over slot indices, merged across every aligned set of the segment
(all assertions of the job), so one common qubit order serves them all.

Projecting a slot-aligned set onto one component keeps only the pattern
atoms and constraints living there; each term's complex amplitude is
replaced by a tag so that only fragments of the same source term recombine
under the later tensor products.  The original amplitudes are kept in a
legend for the final substitution.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ast as A
from .amplitude import tag
from .errors import InternalError
from .preprocess import PAtom, SetP

TagLegend = dict[tuple[int, int], object]  # (SetP uid, term index) -> amplitude


@dataclass(frozen=True)
class DepEdge:
    a: int
    b: int
    kind: str  # "recurrence" | "inequality"
    label: str

    def __post_init__(self) -> None:
        if self.a >= self.b:
            raise InternalError("dependency edge endpoints must be ordered")


@dataclass(frozen=True)
class SlotDependencyGraph:
    slots: tuple[int, ...]
    edges: tuple[DepEdge, ...]


SlotOrder = tuple[tuple[int, ...], ...]


def _var_slots(sp: SetP, slot_indices: tuple[int, ...]) -> dict[str, set[int]]:
    out: dict[str, set[int]] = {}
    for term in sp.terms:
        for atom, idx in zip(term.pattern, slot_indices):
            out.setdefault(atom.var, set()).add(idx)
    return out


def build_dependency_graph(setps, slot_indices: tuple[int, ...]) -> SlotDependencyGraph:
    """Merge recurrence and inequality edges from every set of the segment."""
    edges: list[DepEdge] = []
    seen: set[tuple[int, int]] = set()

    def add(i: int, j: int, kind: str, label: str) -> None:
        if i == j:
            return
        key = (min(i, j), max(i, j))
        if key not in seen:
            seen.add(key)
            edges.append(DepEdge(key[0], key[1], kind, label))

    for sp in setps:
        slots_of = _var_slots(sp, slot_indices)
        for var, occ in slots_of.items():
            for i in sorted(occ):
                for j in sorted(occ):
                    if i < j:
                        add(i, j, "recurrence", var)
        constraints = list(sp.predicate)
        for term in sp.terms:
            constraints.extend(term.sum_constraints)
        for c in constraints:
            if isinstance(c, A.NeqVar):
                for i in sorted(slots_of.get(c.left, ())):
                    for j in sorted(slots_of.get(c.right, ())):
                        add(i, j, "inequality", f"{c.left}!={c.right}")
    return SlotDependencyGraph(slot_indices, tuple(edges))


def compute_slot_order(g: SlotDependencyGraph) -> SlotOrder:
    """Connected components, each ascending, ordered by minimum element."""
    parent = {s: s for s in g.slots}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in g.edges:
        ra, rb = find(e.a), find(e.b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for s in g.slots:
        groups.setdefault(find(s), []).append(s)
    return tuple(tuple(sorted(v)) for _k, v in sorted(groups.items()))


@dataclass(frozen=True)
class VTerm:
    """A projected term: the tag stands in for the original amplitude."""

    tag: int
    sum_constraints: tuple[A.VarCon, ...]
    pattern: tuple[PAtom, ...]


@dataclass(frozen=True)
class SetV:
    uid: int  # the source SetP's uid; tags resolve through it
    slots: tuple[int, ...]
    terms: tuple[VTerm, ...]
    predicate: tuple[A.VarCon, ...]

    def tag_amp(self, m: int):
        return tag(m)


def project_setP(sp: SetP, order: SlotOrder, slot_indices: tuple[int, ...],
                 legend: TagLegend) -> list[SetV]:
    """Split one aligned set into per-component tagged sets.

    Records the original term amplitudes in ``legend`` under the set's uid.
    Every constraint must survive in exactly one component: inequalities tie
    their slots into one component and all other constraint forms mention a
    single variable.
    """
    for m, term in enumerate(sp.terms, start=1):
        legend[(sp.uid, m)] = term.amplitude
    survivings: list[set[str]] = []
    positions_of: list[list[int]] = []
    for comp in order:
        positions = [slot_indices.index(s) for s in comp]
        positions_of.append(positions)
        survivings.append({
            term.pattern[p].var for term in sp.terms for p in positions
        })

    def home_count(c: A.VarCon) -> int:
        vs = set(A.varcon_vars(c))
        return sum(1 for sv in survivings if vs <= sv)

    all_constraints = list(sp.predicate)
    for term in sp.terms:
        all_constraints.extend(term.sum_constraints)
    for c in all_constraints:
        if home_count(c) != 1:
            raise InternalError(
                f"constraint {c} does not land in exactly one slot component")

    out: list[SetV] = []
    for comp, positions, surviving in zip(order, positions_of, survivings):
        terms = tuple(
            VTerm(
                m,
                tuple(c for c in term.sum_constraints
                      if set(A.varcon_vars(c)) <= surviving),
                tuple(term.pattern[p] for p in positions),
            )
            for m, term in enumerate(sp.terms, start=1)
        )
        pred = tuple(c for c in sp.predicate
                     if set(A.varcon_vars(c)) <= surviving)
        out.append(SetV(sp.uid, comp, terms, pred))
    return out
