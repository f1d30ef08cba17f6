import pytest

from pcfv.syntax import NAT, ONE_T, ZERO_T, TArrow, TProd, parse, parse_comp, parse_type, parse_value
from pcfv.typecheck import TypeCheckError, check, check_comp, check_context, check_value
from pcfv.syntax import parse_context


def test_rec_rule():
    assert check_value((), parse_value("rec f (x:nat) : nat => f x")) == TArrow(NAT, NAT)


def test_pair_of_stars():
    assert check_value((), parse_value("(star, star)")) == TProd(ONE_T, ONE_T)


def test_suc_of_star_rejected():
    with pytest.raises(TypeCheckError):
        check_value((), parse_value("suc star"))


def test_let_suc():
    t = parse_comp("let y = return x in return (suc y)")
    assert check_comp((("x", NAT),), t) == NAT


def test_absurd_takes_expected_type():
    t = parse_comp("absurd x")
    for ty in (NAT, ONE_T, parse_type("nat -> 1")):
        assert check_comp((("x", ZERO_T),), t, ty) == ty


def test_application_argument():
    with pytest.raises(TypeCheckError):
        check_comp((), parse_comp("(fn x:nat => return x) star"))


# one derivable and one underivable judgment per rule
RULES = [
    ("var", "return x", [("x", NAT)], "nat", "return y"),
    ("star", "return star", [], "1", "return (suc star)"),
    ("zero/suc", "return (suc 0)", [], "nat", "return (suc (0, 0))"),
    ("inl", "return (inl 0)", [], "nat + 1", "return (inl 0)"),
    ("inr", "return (inr star)", [], "nat + 1", "return (inr 0)"),
    ("pair", "return (0, star)", [], "nat * 1", "return (star, 0)"),
    ("fn", "return (fn x : nat => return x)", [], "nat -> nat", "return (fn x : 1 => return (suc x))"),
    ("rec", "return (rec f (x : nat) : 1 => f x)", [], "nat -> 1", "return (rec f (x : nat) : 1 => return x)"),
    ("return", "return 0", [], "nat", "return 0"),
    ("let", "let y = return 0 in return (suc y)", [], "nat", "let y = return star in return (suc y)"),
    ("app", "(fn x : nat => return x) 0", [], "nat", "0 0"),
    ("fst", "fst (0, star)", [], "nat", "fst 0"),
    ("snd", "snd (0, star)", [], "1", "snd star"),
    ("case-nat", "case 2 of { zero => return 0 | suc k => return k }", [], "nat",
     "case star of { zero => return 0 | suc k => return k }"),
    ("case-sum", "case inl 0 of { inl a => return a | inr b => return 0 }", [], "nat",
     "case 0 of { inl a => return a | inr b => return 0 }"),
    ("absurd", "absurd z", [("z", ZERO_T)], "nat", "absurd z"),
]


@pytest.mark.parametrize("rule,good,ctx,ty,bad", RULES, ids=[r[0] for r in RULES])
def test_each_rule(rule, good, ctx, ty, bad):
    ty = parse_type(ty)
    assert check(ctx, parse(good), ty) == ty
    wrong_ty = ty
    if rule == "inl":
        wrong_ty = parse_type("1 + nat")
    elif rule == "return":
        wrong_ty = ONE_T
    elif rule == "absurd":
        ctx = [("z", NAT)]
    with pytest.raises(TypeCheckError):
        check(ctx, parse(bad), wrong_ty)


def test_shadowing_uses_innermost():
    t = parse_comp("let x = return star in return x")
    assert check_comp((("x", NAT),), t) == ONE_T


def test_context_hole():
    c = parse_context("let g = [] in g 1", parse_type("nat -> nat"))
    assert check_context(c) == NAT
