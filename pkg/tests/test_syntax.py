import pytest

from pcfv.corpus import EQUIVALENT, GROUND, INEQUIVALENT, REC
from pcfv.syntax import (
    NAT, CaseSum, Inl, Lam, ParseError, Ret, Star, Suc, Var, Zero, free_vars, parse,
    parse_context, parse_type, pretty, type_order,
)


def test_numeral_desugars():
    assert parse("return 2") == Ret(Suc(Suc(Zero())))


def test_lambda_binder():
    t = parse("fn x : nat => return x")
    assert t == Lam("x", NAT, Ret(Var("x")))
    assert free_vars(t) == frozenset()


def test_case_sum():
    t = parse("case inl star of { inl x => return x | inr y => return y }")
    assert isinstance(t, CaseSum)
    assert t.scrutinee == Inl(Star())
    assert (t.left_var, t.right_var) == ("x", "y")


def test_print_examples():
    assert pretty(Ret(Zero())) == "return 0"
    assert pretty(Lam("x", NAT, Ret(Var("x")))) == "fn x : nat => return x"


@pytest.mark.parametrize("src", [s for s, _ in GROUND] + REC
                         + [s for pair in EQUIVALENT + INEQUIVALENT for s in pair[:2]])
def test_print_parse_print(src):
    once = pretty(parse(src))
    assert pretty(parse(once)) == once
    assert parse(once) == parse(src)


def test_types_and_order():
    ty = parse_type("(nat -> nat) -> 1 + nat * nat")
    assert pretty(ty) == "(nat -> nat) -> 1 + nat * nat"
    assert type_order(ty) == 2
    assert type_order(parse_type("nat * 1")) == 0


@pytest.mark.parametrize("bad", ["return", "fn x => return x", "case 0 of { zero => return 0 }",
                                 "let x = return 0", "return (1, )", "inl"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse(bad)


def test_value_where_computation_is_required():
    with pytest.raises(ParseError):
        parse("let x = 0 in return x")


def test_context_needs_one_hole():
    c = parse_context("let y = [] in return 0", NAT)
    assert pretty(c.body) == "let y = [] in return 0"
    with pytest.raises((ParseError, ValueError)):
        parse_context("return 0", NAT)
