import itertools

from pcfv.finmodel import (
    BOT, FnTable, Val, all_tables, bind, fix, idempotent_split, kleisli_compose, lattice_height,
    leq, rec_functional, unit,
)
from pcfv.syntax import NAT, App, TArrow, Var, parse_value
from pcfv.truncation import NatP, psi, tabulate

LIFTED = [BOT, Val(0), Val(1), Val(2)]
FUNS = [lambda x: BOT, lambda x: Val(x), lambda x: Val((x + 1) % 3), lambda x: Val(0) if x else BOT]


def test_monad_laws_exhaustive():
    for p in range(3):
        for k in FUNS:
            assert bind(unit(p), k) == k(p)
    for l in LIFTED:
        assert bind(l, unit) == l
        for k, h in itertools.product(FUNS, FUNS):
            assert bind(bind(l, k), h) == bind(l, lambda x: bind(k(x), h))
    assert all(bind(BOT, k) is BOT for k in FUNS)


def test_flat_order():
    assert leq(BOT, Val(1)) and leq(Val(1), Val(1))
    assert not leq(Val(1), Val(2)) and not leq(Val(1), BOT)


def h_nat(m, n):
    """ψ^nat_m as a table at level n."""
    return FnTable.from_table(tabulate(psi(NAT, m), NAT, n, ctx=[("x", NAT)]))


def test_kleisli_examples():
    idt = FnTable.identity(NAT, 2)
    h1 = h_nat(1, 2)
    assert kleisli_compose(h1, idt) == h1 and kleisli_compose(idt, h1) == h1
    bot = FnTable.bottom(NAT, NAT, 2)
    assert kleisli_compose(bot, h1).outs == bot.outs
    assert kleisli_compose(h1, bot).outs == bot.outs
    both = kleisli_compose(h1, h_nat(2, 2))
    assert both.outs == h1.outs == (Val(NatP(0)), Val(NatP(1)), BOT)


def test_fix_identity_is_bottom():
    r = fix(lambda t: t, FnTable.bottom(NAT, NAT, 2))
    assert r.table.outs == (BOT,) * 3 and r.iterations == 1


def test_fix_constant():
    t0 = FnTable.identity(NAT, 2)
    r = fix(lambda t: t0, FnTable.bottom(NAT, NAT, 2))
    assert r.table == t0 and r.iterations <= 2


def test_fix_of_rec_functional():
    rec = parse_value("rec f (x:nat):nat => case x of { zero => return zero | suc y => f y }")
    phi = rec_functional(rec, 2)
    r = fix(phi, FnTable.bottom(NAT, NAT, 2))
    assert r.table.outs == (Val(NatP(0)),) * 3
    assert r.iterations <= 4 <= lattice_height(NAT, NAT, 2) + 1
    direct = FnTable.from_table(tabulate(App(rec, Var("x")), NAT, 2, ctx=[("x", NAT)]))
    assert direct.outs == r.table.outs


def test_fix_is_least_by_brute_force():
    rec = parse_value("rec f (x:nat):nat => case x of { zero => return 1 | suc y => f 0 }")
    phi = rec_functional(rec, 1)
    least = fix(phi, FnTable.bottom(NAT, NAT, 1)).table
    fixed = [t for t in all_tables(NAT, NAT, 1) if phi(t).outs == t.outs]
    assert any(t.outs == least.outs for t in fixed)
    assert all(least.leq(t) for t in fixed)


def test_idempotent_split():
    assert idempotent_split(h_nat(1, 2)) == [NatP(0), NatP(1)]
    assert idempotent_split(FnTable.identity(NAT, 2)) == [NatP(0), NatP(1), NatP(2)]
    assert idempotent_split(FnTable.bottom(NAT, NAT, 2)) == []


def test_table_count():
    assert sum(1 for _ in all_tables(NAT, NAT, 1)) == 9
    assert lattice_height(NAT, NAT, 1) == 3
    assert TArrow(NAT, NAT) is not None
