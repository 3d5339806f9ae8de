"""Surface syntax: tokens, precedence, round-tripping, error positions."""

from __future__ import annotations

import pytest

from lstaq import ast as A
from lstaq.amplitude import AC_I, AC_ONE, AC_SQRT2, AlgebraicComplex
from lstaq.errors import SpecSyntaxError
from lstaq.parser import (
    parse,
    parse_constant,
    parse_many,
    render,
    render_many,
)

CORPUS = [
    "{ |0 0> }",
    "{ (1/sqrt2) |0 0> + (1/sqrt2) |1 1> }",
    "{ sum[ |i| = 2 ] |i 0> : |j| = 1, j != 0 } \\/ { |1 1 1 1> }",
    "{ |i 0 0> : |i| = 2 } (x) { |0> } \\/ { |1> } ^ 2",
    "{ |00 0 i>, |11 1 i> : |i| = 1 } (x) { |0> } (x) { |0> }",
    "{ sum[ |i| = 3, i != 101 ] |i ~i> }",
    "bigU[ im(ah) = 0 && |ah|^2 > 7/8 ] { ah |s s> + al sum[ i != s ] |s i> : |s| = 1, |i| = 1 }",
    "{ a |0> - b |1> } ;; { |1> }",
    "{ (1 + i)/sqrt2 ^ 3 sum[ |i| = 2 ] |i> }",
]


@pytest.mark.parametrize("src", CORPUS)
def test_render_parse_round_trip(src):
    asts = parse_many(src)
    again = parse_many(render_many(asts))
    assert again == asts


def test_power_binds_looser_than_union():
    assert parse("{ |0> } \\/ { |1> } ^ 2") == parse("( { |0> } \\/ { |1> } ) ^ 2")
    ast = parse("{ |0> } \\/ { |1> } ^ 2")
    (pset,) = ast.segments
    assert pset.power == 2 and len(pset.base.alternatives) == 2


def test_tensor_is_the_loosest_set_operator():
    ast = parse("{ |0> } \\/ { |1> } (x) { |0> }")
    assert len(ast.segments) == 2
    assert len(ast.segments[0].base.alternatives) == 2
    assert len(ast.segments[1].base.alternatives) == 1


def test_parenthesised_tensor_groups_flatten():
    ast = parse("( { |0> } (x) { |1> } ) (x) { |0> }")
    assert len(ast.segments) == 3


def test_powers_of_tensor_groups_are_rejected():
    with pytest.raises(SpecSyntaxError):
        parse("( { |0> } (x) { |1> } ) ^ 2")


def test_ket_runs_expand_and_vanish():
    ast = parse("{ |1 0^3 i 0^0> : |i| = 1 }")
    (sq,) = list(ast.setqs())
    (term,) = sq.diracs[0]
    kinds = [type(a).__name__ for a in term.pattern]
    assert kinds == ["ConstBit", "ConstBit", "ConstBit", "ConstBit", "Var"]
    assert [a.bit for a in term.pattern[:4]] == [1, 0, 0, 0]


def test_complement_atoms_parse_and_render():
    ast = parse("{ sum[ |v| = 2 ] |v ~v> }")
    (sq,) = list(ast.setqs())
    (term,) = sq.diracs[0]
    assert isinstance(term.pattern[1], A.Compl) and term.pattern[1].name == "v"
    assert "~v" in render(ast)


def test_minus_between_terms_negates_the_amplitude():
    ast = parse("{ |0> - |1> }")
    (sq,) = list(ast.setqs())
    t0, t1 = sq.diracs[0]
    assert t1.amplitude == -t0.amplitude


def test_multi_dirac_sets_keep_their_members():
    ast = parse("{ |0 0>, |1 1> }")
    (sq,) = list(ast.setqs())
    assert len(sq.diracs) == 2


def test_amplitude_arithmetic_is_exact():
    assert parse_constant("1/sqrt2 * sqrt2") == AC_ONE
    assert parse_constant("(1 + i) / sqrt2") == AlgebraicComplex(0, 1, 0, 0, 0)
    assert parse_constant("i ^ 2") == -AC_ONE
    assert parse_constant("0.5 * 2") == AC_ONE
    assert parse_constant("2 - 3") == -AC_ONE
    assert parse_constant("-i * i") == AC_ONE
    assert parse_constant("sqrt2 ^ 3") == AC_SQRT2 * AlgebraicComplex.from_int(2)


def test_amplitude_variables_not_allowed_in_constants():
    with pytest.raises(SpecSyntaxError):
        parse_constant("ah / 2")


def test_formula_comma_means_conjunction():
    a = parse("bigU[ re(a) = 0, im(a) = 0 ] { a |0> }")
    b = parse("bigU[ re(a) = 0 && im(a) = 0 ] { a |0> }")
    assert a.constraint == b.constraint


def test_formula_connectives_and_not():
    ast = parse("bigU[ !(re(a) < 0) || |a|^2 = 1 ] { a |0> }")
    c = ast.constraint
    assert isinstance(c, A.CBin) and c.op == "||"
    assert isinstance(c.left, A.CNot)
    assert isinstance(c.right, A.CCmp) and isinstance(c.right.left, A.CAbsSq)


def test_comments_and_separators():
    asts = parse_many("// leading note\n{ |0> } ;; // tail\n{ |1> } ;;")
    assert len(asts) == 2


def test_syntax_errors_carry_positions():
    with pytest.raises(SpecSyntaxError) as exc:
        parse("{ |0>\n  + @ }")
    assert exc.value.line == 2
    assert exc.value.exit_code == 1


def test_error_on_nonbinary_ket_digits():
    with pytest.raises(SpecSyntaxError):
        parse("{ |2> }")


def test_error_on_empty_ket():
    with pytest.raises(SpecSyntaxError):
        parse("{ |0^0> }")


def test_division_by_zero_reports_at_the_expression():
    with pytest.raises(SpecSyntaxError):
        parse("{ (1/0) |0> }")


def test_render_many_joins_with_separators():
    text = render_many(parse_many("{ |0> } ;; { |1> }"))
    assert ";;" in text
