"""Automaton structure, language enumeration, union and tensor laws."""

from __future__ import annotations

import pytest

from lstaq.amplitude import COMPLEX, AmplitudePoly
from lstaq.errors import ChoiceOverlapError, DanglingStateError, LimitExceededError
from lstaq.lsta import (
    Internal,
    Leaf,
    Lsta,
    StateVector,
    enumerate_language,
    map_leaves,
    membership,
    mk_lsta,
    n_leaves,
    permute_state,
    substitute_state,
    tensor,
    union,
    validate,
    write_lsta,
)
from tests.conftest import cpoly, vec

ONE = frozenset({1})


def single_member(amps: dict[str, str]) -> Lsta:
    """A one-member automaton over 1 qubit, built by hand."""
    return mk_lsta(
        COMPLEX,
        root=0,
        internal=[Internal(0, ONE, 1, 2)],
        leaves=[Leaf(1, ONE, cpoly(amps["0"])), Leaf(2, ONE, cpoly(amps["1"]))],
    )


def tensor_vec(x, y):
    amps = {}
    for s, v in x.entries:
        for t, w in y.entries:
            amps[s + t] = v * w
    return type(x).of(x.n + y.n, amps, COMPLEX)


# ---------------------------------------------------------------------------
# The two-member reference automaton.
# ---------------------------------------------------------------------------


def test_reference_language_is_exactly_two_states(ref_automaton):
    got = enumerate_language(ref_automaton, 2)
    want = frozenset({
        vec(2, {"00": "1/sqrt2", "01": "-1/sqrt2"}),
        vec(2, {"10": "i/sqrt2", "11": "-i/sqrt2"}),
    })
    assert got == want


def test_reference_size_and_leaf_count(ref_automaton):
    assert ref_automaton.size == 10
    assert n_leaves(ref_automaton) == 5


def test_membership_agrees_with_enumeration(ref_automaton):
    assert membership(ref_automaton, vec(2, {"00": "1/sqrt2", "01": "-1/sqrt2"}))
    assert not membership(ref_automaton, vec(2, {"00": "1/sqrt2", "01": "1/sqrt2"}))
    assert not membership(ref_automaton, vec(2, {"00": "1"}))


def test_reference_validates(ref_automaton):
    validate(ref_automaton)


# ---------------------------------------------------------------------------
# Structural invariants.
# ---------------------------------------------------------------------------


def test_choice_overlap_is_rejected():
    bad = mk_lsta(
        COMPLEX,
        root=0,
        internal=[Internal(0, ONE, 1, 1), Internal(0, frozenset({1, 2}), 1, 1)],
        leaves=[Leaf(1, ONE, cpoly("1"))],
    )
    with pytest.raises(ChoiceOverlapError):
        validate(bad)


def test_dangling_root_is_rejected():
    bad = Lsta(COMPLEX, frozenset({0}), 5, (), ())
    with pytest.raises(DanglingStateError):
        validate(bad)


def test_enumeration_limit_is_enforced(ref_automaton):
    with pytest.raises(LimitExceededError):
        enumerate_language(ref_automaton, 2, limit=1)


# ---------------------------------------------------------------------------
# Union.
# ---------------------------------------------------------------------------


def test_union_language_is_the_set_union(ref_automaton):
    b = tensor(single_member({"0": "1", "1": "0"}),
               single_member({"0": "1/sqrt2", "1": "1/sqrt2"}))
    u = union(ref_automaton, b)
    validate(u)
    assert enumerate_language(u, 2) == (
        enumerate_language(ref_automaton, 2) | enumerate_language(b, 2))


def test_union_size_stays_within_the_additive_bound(ref_automaton):
    u = union(ref_automaton, ref_automaton)
    # One fresh root re-emits both roots' transition sets.
    assert u.size <= 2 * ref_automaton.size + 4
    assert enumerate_language(u, 2) == enumerate_language(ref_automaton, 2)


def test_union_keeps_operand_languages_apart():
    a = single_member({"0": "1", "1": "0"})
    b = single_member({"0": "0", "1": "i"})
    u = union(a, b)
    validate(u)
    assert enumerate_language(u, 1) == {vec(1, {"0": "1"}), vec(1, {"1": "i"})}


# ---------------------------------------------------------------------------
# Tensor product.
# ---------------------------------------------------------------------------


def test_tensor_language_is_the_pairwise_product(ref_automaton):
    b = union(single_member({"0": "1", "1": "0"}),
              single_member({"0": "1/sqrt2", "1": "-1/sqrt2"}))
    t = tensor(ref_automaton, b)
    validate(t)
    want = frozenset(
        tensor_vec(x, y)
        for x in enumerate_language(ref_automaton, 2)
        for y in enumerate_language(b, 1)
    )
    assert enumerate_language(t, 3) == want


def test_tensor_size_bound_in_raw_operand_sizes(ref_automaton):
    b = single_member({"0": "1/sqrt2", "1": "1/sqrt2"})
    t = tensor(ref_automaton, b)
    assert t.size <= ref_automaton.size + n_leaves(ref_automaton) * b.size


def test_tensor_chains_stay_valid_and_bounded():
    a = single_member({"0": "1/sqrt2", "1": "i/sqrt2"})
    t = a
    for _ in range(9):
        bound = t.size + n_leaves(t) * a.size
        t = tensor(t, a)
        validate(t)
        assert t.size <= bound
    assert len(enumerate_language(t, 10)) == 1


# ---------------------------------------------------------------------------
# Leaf rewriting and state-vector helpers.
# ---------------------------------------------------------------------------


def test_map_leaves_rescales_the_language(ref_automaton):
    scaled = map_leaves(ref_automaton, lambda v: v * cpoly("i"))
    got = enumerate_language(scaled, 2)
    assert vec(2, {"00": "i/sqrt2", "01": "-i/sqrt2"}) in got


def test_permute_state_reorders_positions():
    psi = vec(3, {"100": "1"})
    assert permute_state(psi, (2, 3, 1)) == vec(3, {"001": "1"})
    assert permute_state(psi, (1, 2, 3)) == psi


def test_substitute_state_drops_vanishing_entries():
    sv = StateVector.of(1, {"0": AmplitudePoly.var("a"),
                            "1": AmplitudePoly.from_int(1)}, COMPLEX)
    out = substitute_state(sv, {"a": cpoly("0").constant_value})
    assert out == vec(1, {"1": "1"})


# ---------------------------------------------------------------------------
# Serialization.
# ---------------------------------------------------------------------------


def test_write_lsta_is_deterministic(ref_automaton):
    a = write_lsta(ref_automaton, 2)
    b = write_lsta(ref_automaton, 2)
    assert a == b
    assert a.splitlines()[0] == "lsta v1"
    assert "semiring complex" in a
    assert "qubits 2" in a


def test_write_lsta_lists_each_transition_once(ref_automaton):
    text = write_lsta(ref_automaton, 2)
    body = [ln for ln in text.splitlines() if ln.startswith(("i ", "l "))]
    assert len(body) == ref_automaton.size
    assert any("-> 1/sqrt2" in ln for ln in body)


def test_write_lsta_carries_the_constraint_line(ref_automaton):
    text = write_lsta(ref_automaton, 2, constraint="re(a) = 0")
    assert "constraint re(a) = 0" in text
