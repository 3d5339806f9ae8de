"""The brute-force denotation and the differential comparison loop."""

from __future__ import annotations

import pytest

from lstaq import ast as A
from lstaq.amplitude import COMPLEX
from lstaq.errors import CapExceededError, UnboundComplexVarError
from lstaq.lsta import StateVector
from lstaq.oracle import (
    _compare,
    amplitude_vars,
    ccons_eval,
    denote,
    differential_check,
    sample_thetas,
    satisfying_theta,
    varcon_holds,
)
from lstaq.parser import parse, parse_constant, parse_many
from lstaq.preprocess import canonicalize
from tests.conftest import vec


# ---------------------------------------------------------------------------
# Direct denotations.
# ---------------------------------------------------------------------------


def test_single_dirac_denotes_one_state():
    got = denote(parse("{ (1/sqrt2)|0 0> + (1/sqrt2)|1 1> }"))
    assert got == {vec(2, {"00": "1/sqrt2", "11": "1/sqrt2"})}


def test_tensor_power_squares_the_set():
    assert denote(parse("{ |0> } ^ 2")) == {vec(2, {"00": "1"})}
    got = denote(parse("{ |0> } \\/ { |1> } ^ 2"))
    assert got == {vec(2, {b: "1"}) for b in ("00", "01", "10", "11")}


def test_excluded_control_patterns_enumerate_members():
    got = denote(parse("{ |i 0 t> : |i| = 2, |t| = 1, i != 11 }"))
    want = {vec(4, {f"{i:02b}0{t}": "1"}) for i in range(3) for t in (0, 1)}
    assert got == want


def test_summation_collapses_each_member_to_one_vector():
    theta = {"ah": parse_constant("i/2"), "al": parse_constant("1/2")}
    got = denote(parse("{ ah |s s> + al sum[ i != s ] |s i> : |s| = 1 }"),
                 theta=theta)
    want = {
        vec(2, {"00": "i/2", "01": "1/2"}),
        vec(2, {"11": "i/2", "10": "1/2"}),
    }
    assert got == want


def test_recurrence_and_complement_bits():
    got = denote(parse("{ sum[ |v| = 2 ] |v ~v> }"))
    (psi,) = got
    assert {s for s, _ in psi.entries} == {"0011", "0110", "1001", "1100"}


def test_dead_summations_leave_zero_members():
    got = denote(parse("{ sum[ p = 0 ] |p q> : |p| = 1, |q| = 1 }"))
    assert StateVector.of(2, {}, COMPLEX) in got
    assert len(got) == 3


def test_denotation_is_invariant_under_canonicalization():
    sources = [
        "{ |i 0 0> : |i| = 2 } (x) { |0> } \\/ { |1> } ^ 2",
        "{ |00 0 i>, |11 1 i> : |i| = 1 } (x) { |0> } (x) { |0> }",
        "{ sum[ |v| = 1 ] |v ~v> } ^ 2",
    ]
    for src in sources:
        ast = parse(src)
        assert denote(ast) == denote(canonicalize(ast))


def test_enumeration_cap_is_enforced():
    with pytest.raises(CapExceededError) as exc:
        denote(parse("{ sum[ |i| = 4 ] |i i i i> }"), cap=12)
    assert exc.value.exit_code == 4


# ---------------------------------------------------------------------------
# Constraint evaluation over exact arithmetic.
# ---------------------------------------------------------------------------


def test_varcon_holds_truth_table():
    phi = {"u": "01", "v": "01", "w": "10"}
    assert varcon_holds(A.Len("u", 2), phi)
    assert not varcon_holds(A.Len("u", 3), phi)
    assert varcon_holds(A.EqConst("u", "01"), phi)
    assert varcon_holds(A.NeqConst("u", "11"), phi)
    assert not varcon_holds(A.NeqVar("u", "v"), phi)
    assert varcon_holds(A.NeqVar("u", "w"), phi)


def formula_of(src: str) -> A.CCons:
    return parse(f"bigU[ {src} ] {{ a |0> + b |1> }}").constraint


def test_ccons_eval_compares_exactly():
    theta = {"a": parse_constant("1/sqrt2"), "b": parse_constant("i/2")}
    assert ccons_eval(formula_of("|a|^2 = 1/2"), theta)
    assert ccons_eval(formula_of("im(a) = 0 && re(b) = 0"), theta)
    assert ccons_eval(formula_of("re(a) > im(b) || 1 < 0"), theta)
    assert ccons_eval(formula_of("!(|b|^2 >= |a|^2)"), theta)
    assert not ccons_eval(formula_of("2 * re(a) <= 1"), theta)
    assert ccons_eval(formula_of("5/8 < |a|^2 + |b|^2"), theta)


def test_ccons_eval_requires_bound_names():
    with pytest.raises(UnboundComplexVarError):
        ccons_eval(formula_of("re(zz) = 0"), {})


def test_satisfying_theta_searches_the_pool():
    c = formula_of("|a|^2 > 7/8 && im(a) = 0")
    theta = satisfying_theta(c, ["a", "b"])
    assert theta is not None and ccons_eval(c, theta)
    assert set(theta) == {"a", "b"}
    assert satisfying_theta(formula_of("|a|^2 < 0"), ["a"]) is None


def test_sample_thetas_covers_amplitude_names():
    asts = parse_many("bigU[ |ah|^2 > 1/2 ] { ah |0> + al |1> }")
    assert amplitude_vars(asts) == ["ah", "al"]
    thetas = sample_thetas(asts)
    assert len(thetas) >= 3
    assert all(set(t) == {"ah", "al"} for t in thetas)
    assert sample_thetas(parse_many("{ |0> }")) == []


# ---------------------------------------------------------------------------
# Differential comparison.
# ---------------------------------------------------------------------------


def test_differential_check_passes_concrete_and_symbolic_specs():
    report = differential_check(parse_many(
        "{ sum[ |i| = 2, i != 10 ] |i 1> } ;; { |0 0 0> - |1 1 1> }"))
    assert report.ok
    assert all(r.ok for r in report.assertions)

    sym = differential_check(parse_many("bigU[ im(a) = 0 ] { a |0 0> + a |1 1> }"))
    assert sym.ok
    assert "valuations agree" in sym.assertions[0].detail


def test_differential_check_reports_witnesses(monkeypatch):
    import lstaq.build as build_mod

    real = build_mod.translate
    wrong = parse("{ |0 1> }")

    monkeypatch.setattr(build_mod, "translate", lambda _asts: real([wrong]))
    report = differential_check(parse_many("{ |0 0> }"))
    assert not report.ok
    assert "automaton" in report.assertions[0].detail
    assert "misses" in report.assertions[0].detail or "adds" in report.assertions[0].detail


def test_compare_ignores_zero_members_on_both_sides():
    zero = StateVector.of(1, {}, COMPLEX)
    ok, detail = _compare({zero, vec(1, {"0": "1"})}, {vec(1, {"0": "1"})})
    assert ok and "1 members" in detail
    ok, _ = _compare({zero}, set())
    assert ok


def test_report_renders_one_line_per_assertion():
    report = differential_check(parse_many("{ |0> } ;; { |1> }"))
    lines = str(report).splitlines()
    assert len(lines) == 2 and all("ok" in ln for ln in lines)
