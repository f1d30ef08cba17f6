import pytest

from pcfv.opsem import Converged, Exhausted, evaluate, plug, subst
from pcfv.syntax import NAT, ONE_T, ZERO_T, App, TArrow, numeral, parse, parse_type, parse_value, pretty
from pcfv.termgen import diverge
from pcfv.truncation import (
    BasisCache, ConfirmedDifferent, NatP, NoDifferenceFound, UnitP, approx_chain_check, basis,
    count_points, enumerate_points, observe, point_leq, point_str, psi, realize, same_point,
    tabulate, equiv,
)
from pcfv.truncation import BOT, conv
from pcfv.typecheck import check_comp

NN = TArrow(NAT, NAT)


def test_diverge():
    assert isinstance(evaluate(diverge(NAT), 10_000), Exhausted)
    assert check_comp((), diverge(ONE_T), ONE_T) == ONE_T
    assert check_comp((), diverge(NN)) == NN


def test_psi_nat_truncates():
    p = psi(NAT, 2)
    assert isinstance(evaluate(subst(p, {"x": numeral(3)}), 10_000), Exhausted)
    assert evaluate(subst(p, {"x": numeral(1)}), 10_000).value == numeral(1)


def test_psi_unit_is_return():
    for n in range(4):
        assert pretty(psi(ONE_T, n)) == "return x"


def test_psi_arrow_truncates_outputs():
    g = evaluate(subst(psi(NN, 0), {"x": parse_value("fn x : nat => return (suc x)")}), 1000).value
    assert isinstance(evaluate(App(g, numeral(0)), 10_000), Exhausted)


@pytest.mark.parametrize("ty,n,expected", [
    ("nat", 2, ["0", "1", "2"]),
    ("0", 5, []),
    ("1 -> 1", 0, ["{*↦⊥}", "{*↦*}"]),
])
def test_enumerate_points(ty, n, expected):
    assert [point_str(p) for p in enumerate_points(parse_type(ty), n)] == expected


def test_point_str_independent_of_registered_bases():
    before = [point_str(p) for p in enumerate_points(NN, 1)]
    BasisCache(1).get(NAT)
    assert [point_str(p) for p in enumerate_points(NN, 1)] == before
    assert before[:2] == ["{0↦⊥, 1↦⊥}", "{0↦⊥, 1↦0}"]


def test_nat_to_nat_has_nine_points():
    pts = enumerate_points(NN, 1)
    assert len(pts) == 9 == count_points(NN, 1)
    assert len({point_str(p) for p in pts}) == 9


def test_realize_examples():
    assert realize(NatP(3), NAT, 5) == numeral(3)
    top = enumerate_points(parse_type("1 -> 1"), 0)[1]
    assert pretty(realize(top, parse_type("1 -> 1"), 0)) == "fn x : 1 => return star"


def test_realize_partial_map_round_trip():
    # {0↦1, 1↦⊥}
    p = [q for q in enumerate_points(NN, 1) if point_str(q) == "{0↦1, 1↦⊥}"][0]
    v = realize(p, NN, 1)
    assert evaluate(App(v, numeral(0)), 1000).value == numeral(1)
    assert isinstance(evaluate(App(v, numeral(1)), 1000), Exhausted)
    assert same_point(observe(v, NN, 1), p)


def test_basis_examples():
    b = basis(NAT, 2)
    assert b.exact and len(b) == 3
    b = basis(parse_type("0 -> 1"), 0)
    assert len(b) == 1
    ty = parse_type("(nat -> nat) -> nat")
    b = basis(ty, 1, 12, 10_000)
    assert not b.exact
    cache = BasisCache(1, 12, 10_000)
    named = ["fn g : nat -> nat => g 0", "fn g : nat -> nat => g 1",
             "fn g : nat -> nat => return 0", "fn g : nat -> nat => " + pretty(diverge(NAT))]
    pts = [cache.observe(parse_value(s), ty) for s in named]
    assert len({point_str(p) for p in pts}) == 4
    have = {point_str(p) for p in cache.get(ty).points()}
    assert all(point_str(p) in have for p in pts)


def test_tabulate_examples():
    t = tabulate(parse("return x"), NAT, 2, ctx=[("x", NAT)])
    assert [(point_str(i[0]), point_str(o.point)) for i, o in t.entries] == [("0", "0"), ("1", "1"), ("2", "2")]
    t = tabulate(parse("return (fn x:nat => return 0)"), NN, 1)
    assert len(t.entries) == 1
    assert t.entries[0][1].point.outs == (conv(NatP(0)), conv(NatP(0)))
    t = tabulate(diverge(NAT), NAT, 0)
    assert len(t.entries) == 1 and t.entries[0][1].tag == "exhausted"


def test_equiv_examples():
    ident = parse("return (fn x:nat => return x)")
    cases = parse("return (fn x:nat => case x of { zero => return zero | suc y => return (suc y) })")
    assert isinstance(equiv(ident, cases, NN, 2), NoDifferenceFound)
    assert isinstance(equiv(ident, ident, NN, 1), NoDifferenceFound)
    r = equiv(parse("return (fn x:nat => return 0)"), ident, NN, 1)
    assert isinstance(r, ConfirmedDifferent)
    assert r.path[0] == ("app", 1)
    assert (r.observation_left, r.observation_right) == (numeral(0), numeral(1))
    a = evaluate(plug(r.witness, parse("return (fn x:nat => return 0)")), 100_000)
    b = evaluate(plug(r.witness, ident), 100_000)
    assert isinstance(a, Converged) and isinstance(b, Converged) and a.value != b.value


def test_chain_examples():
    rep = approx_chain_check(NAT, 2)
    assert rep.ok
    for k in range(3):
        assert evaluate(subst(psi(NAT, 3), {"x": numeral(k)}), 1000).value == numeral(k)
    assert approx_chain_check(ONE_T, 3).ok
    assert evaluate(subst(psi(ONE_T, 5), {"x": parse_value("star")}), 10).value == parse_value("star")
    assert approx_chain_check(NN, 1).ok


def test_chain_lower_level_loses_outputs():
    ident = parse_value("fn x : nat => return x")
    g = evaluate(subst(psi(NN, 0), {"x": ident}), 1000).value
    got = observe(g, NN, 1).outs
    assert same_point(got[0], conv(NatP(0))) and same_point(got[1], BOT)


def test_raising_fuel_only_resolves():
    t = parse("return (fn x : nat => case x of { zero => return 0 | suc y => return (suc y) })")
    lo = tabulate(t, NN, 1, fuel=8)
    hi = tabulate(t, NN, 1, fuel=10_000)
    for (_, a), (_, b) in zip(lo.entries, hi.entries):
        # converged stays converged; only the undecided parts may fill in
        if a.tag == "converged":
            assert b.tag == "converged" and point_leq(a, b)


def test_realizer_round_trip_exhaustive():
    for src in ["nat", "1", "0", "1 + 1", "nat * 1", "nat -> 1", "1 -> nat", "1 + nat", "nat -> nat"]:
        ty = parse_type(src)
        for n in range(3):
            cache = BasisCache(n)
            for p in enumerate_points(ty, n):
                assert same_point(cache.observe(realize(p, ty, n), ty), p)
