"""Property tests over generated inputs."""
import os
import random

from hypothesis import HealthCheck, given, settings, strategies as st

from pcfv import sites as S
from pcfv.opsem import Converged, evaluate, subst
from pcfv.ssp import check_axioms, closure, partial_partitions
from pcfv.syntax import (
    NAT, ONE_T, ZERO_T, Absurd, App, CaseNat, CaseSum, Inl, Inr, Lam, Let, Pair, Proj1, Proj2,
    Rec, Ret, Star, Suc, TArrow, TProd, TSum, Var, Zero, free_vars, numeral, parse, pretty,
)
from pcfv.termgen import comps_upto, var_name
from pcfv.truncation import BasisCache, psi, same_point, tabulate
from pcfv.typecheck import check_comp
from pcfv import vnat as V

SLOW = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])

# ---------------------------------------------------------------------------
# syntax

names = st.sampled_from(["x", "y", "f", "g", "k1"])
types = st.recursive(st.sampled_from([ZERO_T, ONE_T, NAT]),
                     lambda c: st.builds(TSum, c, c) | st.builds(TProd, c, c) | st.builds(TArrow, c, c),
                     max_leaves=4)


def _values(d):
    base = st.one_of(st.builds(Var, names), st.just(Star()), st.just(Zero()))
    if d == 0:
        return base
    v, c = _values(d - 1), _comps(d - 1)
    return st.one_of(base, st.builds(Inl, v), st.builds(Inr, v), st.builds(Pair, v, v),
                     st.builds(Suc, v), st.builds(Lam, names, types, c),
                     st.builds(Rec, names, names, types, types, c))


def _comps(d):
    if d == 0:
        return st.builds(Ret, _values(0))
    v, c = _values(d - 1), _comps(d - 1)
    return st.one_of(st.builds(Ret, v), st.builds(App, v, v), st.builds(Proj1, v),
                     st.builds(Proj2, v), st.builds(Absurd, v), st.builds(Let, names, c, c),
                     st.builds(CaseSum, v, names, c, names, c),
                     st.builds(CaseNat, v, c, names, c))


terms = st.one_of(_values(5), _comps(5))


@given(terms)
@settings(max_examples=300, deadline=None)
def test_parse_print_round_trip(t):
    back = parse(pretty(t))
    assert back == t
    assert free_vars(back) == free_vars(t)


# ---------------------------------------------------------------------------
# typing and evaluation over enumerated well-typed terms

OPEN = [(t, ty) for ty in (NAT, TSum(ONE_T, NAT), TArrow(NAT, NAT))
        for t in comps_upto((NAT,), ty, 6, 2, 300)]
CLOSED = [t for ty in (NAT, TProd(NAT, ONE_T)) for t in comps_upto((), ty, 7, 2, 400)]


@given(st.sampled_from(OPEN), st.integers(0, 4))
@settings(max_examples=200, deadline=None)
def test_substitution_lemma(pair, k):
    t, ty = pair
    assert check_comp(((var_name(0), NAT),), t, ty) == ty
    assert check_comp((), subst(t, {var_name(0): numeral(k)}), ty) == ty


@given(st.sampled_from(CLOSED), st.integers(1, 60), st.integers(0, 500))
@settings(max_examples=300, deadline=None)
def test_fuel_monotone(t, k, extra):
    r = evaluate(t, k)
    if isinstance(r, Converged):
        r2 = evaluate(t, k + extra)
        assert isinstance(r2, Converged) and r2.value == r.value


@given(st.sampled_from(CLOSED))
@settings(max_examples=100, deadline=None)
def test_return_of_value_is_one_step(t):
    r = evaluate(t, 10_000)
    if isinstance(r, Converged):
        assert evaluate(Ret(r.value), 1) == Converged(r.value, 1)


def test_tabulation_independent_of_threads(monkeypatch):
    t = parse("return (fn x : nat => case x of { zero => return 1 | suc y => return y })")
    ty = TArrow(NAT, NAT)
    outs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("PCFV_THREADS", threads)
        outs.append(tabulate(t, ty, 2).entries)
    assert outs[0] == outs[1]
    monkeypatch.setenv("PCFV_THREADS", "4")
    assert tabulate(parse("return x"), NAT, 3, ctx=[("x", NAT)]).entries == \
        tabulate(parse("return x"), NAT, 3, ctx=[("x", NAT)]).entries


small_types = st.recursive(st.sampled_from([ZERO_T, ONE_T, NAT]),
                           lambda c: st.builds(TSum, c, c) | st.builds(TProd, c, c),
                           max_leaves=3)


@given(small_types.flatmap(lambda a: st.tuples(st.just(a), small_types)), st.integers(0, 2))
@SLOW
def test_psi_idempotent_first_order(tys, n):
    ty = TArrow(*tys)
    # large function spaces are sampled rather than enumerated
    cache = BasisCache(n, exact_limit=64, sample=12)
    once = psi(ty, n, "x")
    twice = Let("y", once, psi(ty, n, "y"))
    a = tabulate(once, ty, n, ctx=[("x", ty)], cache=cache)
    b = tabulate(twice, ty, n, ctx=[("x", ty)], cache=cache)
    assert all(same_point(o1, o2) for (_, o1), (_, o2) in zip(a.entries, b.entries))


# ---------------------------------------------------------------------------
# SSP

PPS3 = partial_partitions(frozenset("abc"))


@given(st.lists(st.sampled_from(PPS3), max_size=4), st.sampled_from(PPS3))
@settings(max_examples=150, deadline=None)
def test_closure_laws(gens, extra):
    c = closure("abc", gens)
    assert check_axioms(c.carrier, c.system) is None
    assert closure("abc", c.system) == c
    assert set(gens) <= c.system
    assert c.system <= closure("abc", gens + [extra]).system


# ---------------------------------------------------------------------------
# vertical naturals

nats = st.one_of(st.integers(0, 8), st.just(V.INF))


@st.composite
def endos(draw):
    vals = sorted(draw(st.lists(st.integers(0, 6), min_size=1, max_size=5)))
    if draw(st.booleans()) and draw(st.booleans()):
        cut = draw(st.integers(0, len(vals) - 1))
        vals = vals[:cut] + [V.INF] * (len(vals) - cut)
    return V.EndoV(tuple(vals[:-1]), vals[-1], draw(st.integers(0, 1)))


def same(e1, e2):
    return all(V.apply(e1, k) == V.apply(e2, k) for k in V.sample_points())


@given(endos(), endos(), endos())
@settings(max_examples=500, deadline=None)
def test_vnat_monoid(a, b, c):
    assert same(V.compose(a, V.compose(b, c)), V.compose(V.compose(a, b), c))
    assert V.compose(a, V.identity()) == a == V.compose(V.identity(), a)
    assert all(V.apply(V.compose(a, b), k) == V.apply(a, V.apply(b, k)) for k in V.sample_points())


@given(nats, endos(), endos())
@settings(max_examples=500, deadline=None)
def test_delta_contravariant(t, e1, e2):
    assert V.delta_action(t, V.identity()) == t
    assert V.delta_action(t, V.compose(e1, e2)) == V.delta_action(V.delta_action(t, e1), e2)


lifted_delta = st.one_of(st.just(V.VBOT), st.builds(V.At, st.integers(0, 5), nats))
lifted_bar = st.one_of(st.just(V.VBOT), st.builds(V.At, st.integers(0, 5), endos()))


@given(st.one_of(st.tuples(st.just("delta"), lifted_delta), st.tuples(st.just("bar"), lifted_bar)),
       endos(), endos())
@settings(max_examples=500, deadline=None)
def test_lift_functorial(tagged, e1, e2):
    kind, x = tagged
    act = V.delta_action if kind == "delta" else V.omegabar_action
    assert V.lift_action(x, V.identity(), act) == x
    assert V.lift_action(V.lift_action(x, e1, act), e2, act) == V.lift_action(x, V.compose(e1, e2), act)


@given(endos(), st.integers(0, 10))
def test_succ_infinity_and_i(e, n):
    assert V.succ(V.infinity()) == V.infinity()
    assert V.omegabar_action(V.infinity(), e) == V.infinity()
    x = V.const(n)
    assert V.i_embed(V.omegabar_action(x, e)) == V.omegabar_action(V.i_embed(x), e)
    if V.is_omega(e):
        assert V.is_omega(V.succ(e))


# ---------------------------------------------------------------------------
# sites


def relabel(site, tag="r"):
    """An isomorphic copy with every object renamed and hom lists reversed."""
    ren = {a: (tag, i) for i, a in enumerate(site.objects)}
    star = ren[site.star]

    def fn(f):
        return S.Fn(ren[f.src], ren[f.tgt], f.images)

    homs = {(ren[a], ren[b]): [fn(f) for f in reversed(fs)] for (a, b), fs in site.homs.items()}
    covers = [(ren[a], tuple(fn(f) for f in legs)) for a, legs in reversed(site.covers)]
    points = {ren[a]: site.points[a] for a in site.objects}
    new = S.FiniteSite([ren[a] for a in reversed(site.objects)], points, homs, covers, star)
    return new, ren


def moved(P, new, ren):
    back = {v: k for k, v in ren.items()}

    def act(f, x):
        return P.act(S.Fn(back[f.src], back[f.tgt], f.images), x)

    return S.FinitePresheaf(new, {ren[a]: P.values[a] for a in P.site.objects}, act)


@given(st.integers(0, 10_000))
@SLOW
def test_sheaf_check_is_invariant_under_relabeling(seed):
    rng = random.Random(seed)
    site = S.build_site(S.random_cf(rng, max_objects=2, max_carrier=2, max_morphisms=6))
    new, ren = relabel(site)
    assert S.check_site(new).ok == S.check_site(site).ok
    presheaves = [S.set_presheaf(site, (0, 1)), S.random_subpresheaf(site, (0, 1), rng, 2)]
    presheaves += [S.representable(site, c) for c in site.objects[-2:]]
    for P in presheaves:
        assert (S.is_sheaf(P) is None) == (S.is_sheaf(moved(P, new, ren)) is None)


def concrete_where_pointed(P):
    site = P.site
    for a in site.objects:
        pts = site.hom(site.star, a)
        if not pts:
            continue
        keys = [tuple(P.act(x, s) for x in pts) for s in P.values[a]]
        if len(set(keys)) != len(keys):
            return False
    return True


@given(st.integers(0, 10_000))
@SLOW
def test_products_and_coproducts_stay_concrete(seed):
    rng = random.Random(seed)
    site = S.build_site(S.random_cf(rng, max_objects=2, max_carrier=2, max_morphisms=6))
    P = S.random_subpresheaf(site, (0, 1), rng, 2)
    Q = S.representable(site, rng.choice(site.objects))
    assert S.is_concrete_presheaf(P) and S.is_concrete_presheaf(Q)
    prod = S.product_presheaf(P, Q)
    assert S.check_presheaf(prod).ok and S.is_concrete_presheaf(prod)
    # the pointwise coproduct is separated wherever there are points to separate with
    co = S.coproduct_presheaf(P, Q)
    assert S.check_presheaf(co).ok and concrete_where_pointed(co)
    im = S.concrete_image(co)
    assert S.check_presheaf(im).ok and S.is_concrete_presheaf(im)
    for a in site.objects:
        if site.points[a]:
            assert len(im.values[a]) == len(co.values[a])


@given(st.integers(0, 10_000))
@SLOW
def test_delta_on_generated_sites(seed):
    site = S.build_site(S.random_cf(random.Random(seed), max_objects=2, max_carrier=2, max_morphisms=6))
    assert S.is_sheaf(S.delta_site(site)) is None
    assert S.check_generic_semidecidable(site).ok
