from pcfv.opsem import Converged, Exhausted, evaluate, plug, subst
from pcfv.syntax import NAT, ONE_T, Star, free_vars, numeral, parse, parse_context, parse_value, pretty


def test_subst_examples():
    assert subst(parse("return x"), {"x": numeral(3)}) == parse("return 3")
    lam = parse("fn x : nat => return x")
    assert subst(lam, {"x": numeral(3)}) == lam
    r = parse_value("rec f (x:1) : nat => f x")
    assert pretty(subst(parse("f y"), {"f": r, "y": Star()})) == "(rec f (x : 1) : nat => f x) star"


def test_subst_avoids_capture():
    out = subst(parse("fn y : nat => return (x, y)"), {"x": parse_value("y")})
    assert out.var != "y"
    assert free_vars(out) == frozenset({"y"})
    closed = subst(parse("let f = return g in f 0"), {"g": subst(out, {"y": numeral(7)})})
    assert evaluate(closed, 100).value == parse_value("(7, 0)")


def test_eval_examples():
    r = evaluate(parse("(fn x:nat => return x) 5"), 100)
    assert isinstance(r, Converged) and r.value == numeral(5)
    r = evaluate(parse("let x = return 1 in return (suc x)"), 100)
    assert isinstance(r, Converged) and r.value == numeral(2)
    assert isinstance(evaluate(parse("(rec f (x:1):nat => f x) star"), 10_000), Exhausted)


def test_return_is_one_step():
    assert evaluate(parse("return (1, star)"), 1) == Converged(parse_value("(1, star)"), 1)


def test_fuel_is_a_bound_only():
    t = parse("let x = return 1 in return (suc x)")
    need = evaluate(t, 100).steps
    assert isinstance(evaluate(t, need - 1), Exhausted)
    assert evaluate(t, need).value == numeral(2)


def test_plug_examples():
    c = parse_context("let y = [] in return 0", ONE_T)
    assert pretty(plug(c, parse("return star"))) == "let y = return star in return 0"
    assert plug(parse_context("[]", NAT), parse("return 4")) == parse("return 4")


def test_plug_captures():
    c = parse_context("let x = return 1 in [·]", NAT, (("x", NAT),))
    t = parse("return x")
    assert plug(c, t) == parse("let x = return 1 in return x")
    # the captured program observes the binder; a renaming plug would leave x free
    assert evaluate(plug(c, t), 100).value == numeral(1)
