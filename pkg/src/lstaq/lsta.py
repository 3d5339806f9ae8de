"""Level-synchronized tree automata over a pluggable amplitude semiring.

An automaton accepts perfect binary trees of a fixed depth whose leaves carry
semiring values; such a tree is the standard decision-tree encoding of an
n-qubit state vector.  A run is driven by one choice number per level (plus
one for the leaf level): every node at a level resolves its transition with
the same choice, which is what keeps the branches synchronized.  Distinct
transitions from one state must carry disjoint choice sets, so a choice
sequence induces at most one tree.

The two composition operations mirror the set operations of the
specification language: :func:`union` adds a fresh root that selects between
the operands' root transitions, and :func:`tensor` grafts a scaled copy of
the right automaton onto each distinct leaf value of the left one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .amplitude import COMPLEX, Semiring
from .errors import (
    ChoiceOverlapError,
    DanglingStateError,
    EmptyStateError,
    InternalError,
    LimitExceededError,
)


@dataclass(frozen=True)
class Internal:
    top: int
    choices: frozenset[int]
    left: int
    right: int


@dataclass(frozen=True)
class Leaf:
    top: int
    choices: frozenset[int]
    amplitude: object


@dataclass(frozen=True)
class Lsta:
    semiring: Semiring
    states: frozenset[int]
    root: int
    internal: tuple[Internal, ...]
    leaves: tuple[Leaf, ...]
    names: dict[int, str] = field(default_factory=dict, compare=False, repr=False)

    @property
    def size(self) -> int:
        """Number of transitions; the standard size measure."""
        return len(self.internal) + len(self.leaves)

    def variables(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for leaf in self.leaves:
            out |= self.semiring.variables(leaf.amplitude)
        return out

    def name_of(self, state: int) -> str:
        return self.names.get(state, f"q{state}")


def mk_lsta(
    semiring: Semiring,
    root: int,
    internal: list[Internal],
    leaves: list[Leaf],
    names: dict[int, str] | None = None,
) -> Lsta:
    """Assemble an automaton, deriving the state set from the transitions."""
    states = {root}
    for t in internal:
        states.update((t.top, t.left, t.right))
    for t in leaves:
        states.add(t.top)
    return Lsta(
        semiring, frozenset(states), root, tuple(internal), tuple(leaves),
        dict(names or {}),
    )


def validate(a: Lsta) -> None:
    """Check structural invariants; raises on the first violation."""
    if a.root not in a.states:
        raise DanglingStateError(a.root)
    seen: dict[int, set[int]] = {}
    for t in list(a.internal) + list(a.leaves):
        refs = (t.top, t.left, t.right) if isinstance(t, Internal) else (t.top,)
        for s in refs:
            if s not in a.states:
                raise DanglingStateError(s)
        if not t.choices:
            raise InternalError(f"transition from state {t.top} has no choices")
        pool = seen.setdefault(t.top, set())
        for c in t.choices:
            if c in pool:
                raise ChoiceOverlapError(t.top, c)
            pool.add(c)


def size(a: Lsta) -> int:
    return a.size


def n_leaves(a: Lsta) -> int:
    """Number of distinct leaf amplitude values."""
    return len({leaf.amplitude for leaf in a.leaves})


# ---------------------------------------------------------------------------
# State vectors (the denotation of one accepted tree).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StateVector:
    """An n-qubit state: basis bitstrings mapped to nonzero amplitudes."""

    n: int
    entries: tuple[tuple[str, object], ...]

    @classmethod
    def of(cls, n: int, amplitudes: dict[str, object], semiring: Semiring) -> "StateVector":
        items = tuple(
            sorted((s, v) for s, v in amplitudes.items() if not semiring.is_zero(v))
        )
        return cls(n, items)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def as_dict(self) -> dict[str, object]:
        return dict(self.entries)

    def __str__(self) -> str:
        if not self.entries:
            return "0"
        return " + ".join(f"({v})|{s}>" for s, v in self.entries)


def permute_state(psi: StateVector, new_to_old: tuple[int, ...]) -> StateVector:
    """Reindex qubits: position k of the result reads old position new_to_old[k-1]."""
    assert len(new_to_old) == psi.n
    entries = tuple(
        sorted(("".join(s[p - 1] for p in new_to_old), v) for s, v in psi.entries)
    )
    return StateVector(psi.n, entries)


def substitute_state(psi: StateVector, theta: dict) -> StateVector:
    """Instantiate every amplitude polynomial; entries that vanish are dropped."""
    out: dict[str, object] = {}
    for s, v in psi.entries:
        out[s] = v.substitute(theta)
    return StateVector.of(psi.n, out, COMPLEX)


# ---------------------------------------------------------------------------
# Semantics: enumeration and membership.
# ---------------------------------------------------------------------------


def _by_top(a: Lsta):
    internal: dict[int, list[Internal]] = {}
    leaves: dict[int, list[Leaf]] = {}
    for t in a.internal:
        internal.setdefault(t.top, []).append(t)
    for t in a.leaves:
        leaves.setdefault(t.top, []).append(t)
    return internal, leaves


def _choice_index(transitions) -> dict[int, object]:
    out = {}
    for t in transitions:
        for c in t.choices:
            out[c] = t
    return out


def _expand_level(maps, internal_by_top, limit: int):
    """Advance every path->state map one level down, for every usable choice."""
    out = set()
    for m in maps:
        tables = {}
        ok = True
        for q in set(m):
            trans = internal_by_top.get(q)
            if not trans:
                ok = False
                break
            tables[q] = _choice_index(trans)
        if not ok:
            continue
        usable = set.intersection(*(set(t) for t in tables.values()))
        for c in usable:
            nxt: list[int] = []
            for q in m:
                t = tables[q][c]
                nxt.append(t.left)
                nxt.append(t.right)
            out.add(tuple(nxt))
            if len(out) > limit:
                raise LimitExceededError(limit)
    return out


def _leaf_vectors(m, leaves_by_top, n: int, semiring: Semiring):
    tables = {}
    for q in set(m):
        trans = leaves_by_top.get(q)
        if not trans:
            return
        tables[q] = _choice_index(trans)
    usable = set.intersection(*(set(t) for t in tables.values()))
    for c in usable:
        amps = {
            format(i, f"0{n}b"): tables[q][c].amplitude for i, q in enumerate(m)
        }
        yield StateVector.of(n, amps, semiring)


def enumerate_language(a: Lsta, n: int, limit: int = 100_000) -> frozenset[StateVector]:
    """All n-qubit states accepted by ``a``; raises past ``limit`` states."""
    internal_by_top, leaves_by_top = _by_top(a)
    maps: set[tuple[int, ...]] = {(a.root,)}
    for _ in range(n):
        maps = _expand_level(maps, internal_by_top, limit)
    out: set[StateVector] = set()
    for m in maps:
        for psi in _leaf_vectors(m, leaves_by_top, n, a.semiring):
            out.add(psi)
            if len(out) > limit:
                raise LimitExceededError(limit)
    return frozenset(out)


def membership(a: Lsta, psi: StateVector) -> bool:
    """Is ``psi`` in the language of ``a``?"""
    return len(induced_trees(a, psi, first_only=True)) > 0


def induced_trees(a: Lsta, psi: StateVector, first_only: bool = False):
    """Distinct accepting trees for ``psi``: level-wise state maps plus leaves.

    Choice disjointness guarantees at most one tree per choice sequence;
    the language definition further implies member states have exactly one
    accepting tree overall, which callers may assert on this result.
    """
    internal_by_top, leaves_by_top = _by_top(a)
    want = psi.as_dict()
    trees: list[tuple] = []

    def leaf_check(stack: tuple[tuple[int, ...], ...]) -> None:
        m = stack[-1]
        tables = {}
        for q in set(m):
            trans = leaves_by_top.get(q)
            if not trans:
                return
            tables[q] = _choice_index(trans)
        usable = set.intersection(*(set(t) for t in tables.values()))
        for c in usable:
            values = tuple(tables[q][c].amplitude for q in m)
            good = True
            for i, v in enumerate(values):
                bits = format(i, f"0{psi.n}b")
                if a.semiring.is_zero(v):
                    if bits in want:
                        good = False
                        break
                elif want.get(bits) != v:
                    good = False
                    break
            if good:
                tree = (stack, values)
                if tree not in trees:
                    trees.append(tree)

    def walk(stack: tuple[tuple[int, ...], ...], depth: int) -> None:
        if first_only and trees:
            return
        if depth == psi.n:
            leaf_check(stack)
            return
        for m in _expand_level({stack[-1]}, internal_by_top, 1 << 24):
            walk(stack + (m,), depth + 1)

    walk(((a.root,),), 0)
    return trees


# ---------------------------------------------------------------------------
# Composition.
# ---------------------------------------------------------------------------


def _relabel(a: Lsta, offset: int) -> Lsta:
    return Lsta(
        a.semiring,
        frozenset(s + offset for s in a.states),
        a.root + offset,
        tuple(Internal(t.top + offset, t.choices, t.left + offset, t.right + offset)
              for t in a.internal),
        tuple(Leaf(t.top + offset, t.choices, t.amplitude) for t in a.leaves),
        {s + offset: n for s, n in a.names.items()},
    )


def union(a: Lsta, b: Lsta) -> Lsta:
    """Language union: a fresh root re-emits both roots' transitions.

    The original root transitions are replaced by copies from the new root
    with sequentially re-indexed singleton choice sets, so the result is
    never larger than the operands combined.
    """
    if a.semiring != b.semiring:
        raise InternalError("cannot union automata over different semirings")
    b = _relabel(b, max(a.states) + 1)
    root = max(b.states) + 1
    old_roots = []
    for side in (a, b):
        for t in side.internal:
            if t.top == side.root:
                old_roots.append(t)
        if any(t.top == side.root for t in side.leaves):
            raise InternalError("a root state may not carry leaf transitions")
    internal = [t for t in a.internal + b.internal if t.top not in (a.root, b.root)]
    for idx, t in enumerate(old_roots, start=1):
        internal.append(Internal(root, frozenset((idx,)), t.left, t.right))
    names = dict(a.names)
    names.update(b.names)
    names[root] = "r_union"
    out = Lsta(
        a.semiring,
        a.states | b.states | {root},
        root,
        tuple(internal),
        a.leaves + b.leaves,
        names,
    )
    assert out.size <= a.size + b.size
    validate(out)
    return out


def _merge_equal_leaf_states(a: Lsta) -> Lsta:
    """Quotient states whose outgoing transitions are identical leaf sets.

    Such states are interchangeable in every accepting tree, so redirecting
    references to one representative preserves the language.  This keeps the
    number of leaf transitions equal to the number of distinct leaf values
    for pipeline-built automata, which is what the tensor size bound counts.
    """
    internal_tops = {t.top for t in a.internal}
    groups: dict[frozenset, list[int]] = {}
    by_top: dict[int, set] = {}
    for t in a.leaves:
        by_top.setdefault(t.top, set()).add((t.choices, t.amplitude))
    for top, sig in by_top.items():
        if top in internal_tops or top == a.root:
            continue
        groups.setdefault(frozenset(sig), []).append(top)
    remap: dict[int, int] = {}
    for members in groups.values():
        rep = min(members)
        for s in members:
            if s != rep:
                remap[s] = rep
    if not remap:
        return a
    internal = tuple(
        Internal(t.top, t.choices, remap.get(t.left, t.left), remap.get(t.right, t.right))
        for t in a.internal
    )
    leaves = tuple(t for t in a.leaves if t.top not in remap)
    seen = set()
    dedup = []
    for t in leaves:
        if t not in seen:
            seen.add(t)
            dedup.append(t)
    return Lsta(
        a.semiring,
        a.states - frozenset(remap),
        a.root,
        internal,
        tuple(dedup),
        {s: n for s, n in a.names.items() if s not in remap},
    )


def tensor(a: Lsta, b: Lsta) -> Lsta:
    """Tensor product: graft a scaled copy of ``b`` under each leaf of ``a``.

    One copy of ``b`` is made per distinct leaf value ``v`` of ``a``, with
    its leaf values pre-multiplied by ``v``.  Interface transitions inline
    the copies' root transitions under the former leaf states of ``a``; their
    choice sets are produced by an injection from (leaf choice, root choice)
    pairs into numbers unused by ``a``'s internal transitions, which keeps
    choice sets disjoint.
    """
    if a.semiring != b.semiring:
        raise InternalError("cannot tensor automata over different semirings")
    bound = a.size + n_leaves(a) * b.size
    a = _merge_equal_leaf_states(a)

    b_root_trans = [t for t in b.internal if t.top == b.root]
    if not b_root_trans:
        raise InternalError("right tensor operand has no root transitions")

    u_a_in = sorted({c for t in a.internal for c in t.choices})
    u_a_ex = sorted({c for t in a.leaves for c in t.choices})
    u_b_r = sorted({c for t in b_root_trans for c in t.choices})
    base = 1 + max(u_a_in, default=0)
    ex_index = {c: i for i, c in enumerate(u_a_ex)}
    br_index = {c: i for i, c in enumerate(u_b_r)}

    def inject(ca: int, cb: int) -> int:
        return base + ex_index[ca] * len(u_b_r) + br_index[cb]

    values: list = []
    for t in a.leaves:
        if t.amplitude not in values:
            values.append(t.amplitude)

    next_id = max(a.states) + 1
    internal = list(a.internal)
    leaves: list[Leaf] = []
    states = set(a.states)
    names = dict(a.names)
    copy_maps: dict[int, dict[int, int]] = {}
    for vi, v in enumerate(values):
        m: dict[int, int] = {}
        for s in sorted(b.states):
            if s == b.root:
                continue
            m[s] = next_id
            states.add(next_id)
            if s in b.names:
                names[next_id] = f"{b.names[s]}@{vi}"
            next_id += 1
        copy_maps[vi] = m
        for t in b.internal:
            if t.top == b.root:
                continue
            internal.append(Internal(m[t.top], t.choices, m[t.left], m[t.right]))
        for t in b.leaves:
            leaves.append(Leaf(m[t.top], t.choices, a.semiring.mul(v, t.amplitude)))

    for lt in a.leaves:
        vi = values.index(lt.amplitude)
        m = copy_maps[vi]
        for rt in b_root_trans:
            choices = frozenset(
                inject(ca, cb) for ca in lt.choices for cb in rt.choices
            )
            internal.append(Internal(lt.top, choices, m[rt.left], m[rt.right]))

    out = Lsta(
        a.semiring, frozenset(states), a.root, tuple(internal), tuple(leaves), names
    )
    assert out.size <= bound
    validate(out)
    return out


def map_leaves(a: Lsta, fn, semiring: Semiring | None = None) -> Lsta:
    """Rewrite every leaf amplitude, optionally changing the semiring."""
    semiring = semiring or a.semiring
    leaves = tuple(Leaf(t.top, t.choices, fn(t.amplitude)) for t in a.leaves)
    return Lsta(semiring, a.states, a.root, a.internal, leaves, dict(a.names))


# ---------------------------------------------------------------------------
# Textual output format.
# ---------------------------------------------------------------------------


def write_lsta(a: Lsta, n: int, constraint: str | None = None) -> str:
    """Serialize to the versioned line format (deterministic bytes)."""
    lines = [
        "lsta v1",
        f"semiring {a.semiring.name}",
        f"qubits {n}",
        "vars" + "".join(f" {v}" for v in sorted(a.variables())),
        f"root {a.root}",
    ]

    def choice_text(cs: frozenset[int]) -> str:
        return "{%s}" % ",".join(str(c) for c in sorted(cs))

    for t in sorted(a.internal, key=lambda t: (t.top, min(t.choices))):
        lines.append(f"i {t.top} {choice_text(t.choices)} -> {t.left} {t.right}")
    for t in sorted(a.leaves, key=lambda t: (t.top, min(t.choices))):
        lines.append(f"l {t.top} {choice_text(t.choices)} -> {a.semiring.render(t.amplitude)}")
    if constraint:
        lines.append(f"constraint {constraint}")
    return "\n".join(lines) + "\n"
