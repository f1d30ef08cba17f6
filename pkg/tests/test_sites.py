import random

import pytest

from pcfv.sites import (
    STAR, FiniteSite, Fn, OmegaPresheaf, build_site, check_concrete_site, check_coverage,
    check_generic_semidecidable, check_ML, check_presheaf, check_site, delta_site,
    is_concrete_presheaf, is_sheaf, lift_presheaf, omega_site, omegabar_site, random_cf,
    representable, set_presheaf, sheafify_representable, site_from_basis, site_from_json,
    site_to_json, sum_sites, terminal_presheaf, restrict_presheaf, coproduct_presheaf,
    concrete_image,
)
from pcfv.ssp import full_ssp, pp
from pcfv.syntax import NAT, ONE_T

from conftest import two_atom_cf

S = "s"
AB = ("s", frozenset("ab"))


def test_five_objects(five_site):
    assert five_site.objects == (STAR, ("s", frozenset()), ("s", frozenset("a")),
                                 ("s", frozenset("b")), AB)


def test_partition_cover(five_site):
    legs = {frozenset(f.src for f in legs) for a, legs in five_site.covers if a == AB}
    assert frozenset({("s", frozenset("a")), ("s", frozenset("b"))}) in legs
    assert five_site.covers_of(STAR) == [(Fn(STAR, STAR, ("*",)),)]


def test_five_site_passes(five_site):
    rep = check_site(five_site)
    assert rep.ok, str(rep)


def test_star_is_only_covered_by_identity():
    rng = random.Random(3)
    for _ in range(10):
        site = build_site(random_cf(rng))
        assert site.covers_of(STAR) == [(site.identity(STAR),)]


def trivial(site):
    return FiniteSite(site.objects, site.points, site.homs,
                      [(a, (site.identity(a),)) for a in site.objects], site.star,
                      site.delta, site.subobj, "trivial")


def test_trivial_coverage(five_site):
    t = trivial(five_site)
    assert check_ML(t).ok and check_coverage(t).ok and check_concrete_site(t).ok


def test_sheafify_trivial_is_unchanged(five_site):
    t = trivial(five_site)
    for c in t.objects:
        assert sheafify_representable(t, c).values == representable(t, c).values


def test_non_surjective_cover_is_reported(five_site):
    a = ("s", frozenset("a"))
    broken = FiniteSite(five_site.objects, five_site.points, five_site.homs,
                        five_site.covers + [(AB, (Fn(a, AB, ("a",)),))], five_site.star)
    rep = check_concrete_site(broken)
    assert not rep.ok and any("surjective" in v.detail for v in rep.violations)


def test_set_presheaf_is_sheaf(five_site):
    P = set_presheaf(five_site, (0, 1))
    assert check_presheaf(P).ok and is_concrete_presheaf(P)
    assert is_sheaf(P) is None


def test_delta_examples(five_site):
    D = delta_site(five_site)
    assert D.values[STAR] == (frozenset(), frozenset({"*"}))
    assert set(D.values[AB]) == {frozenset(), frozenset("a"), frozenset("b"), frozenset("ab")}
    assert is_sheaf(D) is None
    assert check_generic_semidecidable(five_site).ok


def test_representable_is_not_a_sheaf(five_site):
    y = representable(five_site, AB)
    fail = is_sheaf(y)
    assert fail is not None and fail.kind == "no amalgamation"
    # the identity family does glue; the swap family is the one with no amalgamation
    assert fail.cover[0] == AB
    assert sorted(fail.family) == [("a",), ("b",)]
    legs = fail.cover[1]
    glued = {five_site.apply(f, f.images[0]): s[0] for f, s in zip(legs, fail.family)}
    assert glued == {"a": "b", "b": "a"}


def test_sheafification_gains_the_swap(five_site):
    y = representable(five_site, AB)
    s = sheafify_representable(five_site, AB)
    gained = set(s.values[AB]) - set(y.values[AB])
    assert gained == {("b", "a")}
    assert is_sheaf(s) is None


def test_lift_of_terminal(five_site):
    L = lift_presheaf(terminal_presheaf(five_site))
    assert len(L.values[STAR]) == 2
    assert check_presheaf(L).ok


def test_omega_at_star(five_site):
    w = omega_site(five_site)
    assert w.points_at_star(5) == [0, 1, 2, 3, 4]
    assert [t for (t,), _ in w.elements(STAR, 4)] == [0, 1, 2, 3]
    wb = omegabar_site(five_site)
    assert wb.points_at_star(3)[-1] == OmegaPresheaf.INF


def test_omegabar_constant_a(five_site):
    wb = omegabar_site(five_site)
    inf = OmegaPresheaf.INF
    # a is in every position, b in none, nothing at infinity
    assert ((inf, 0), (0, 0)) in wb.elements(AB, 3)
    assert check_presheaf(wb.truncated(3)).ok


def test_omega_embeds(five_site):
    w, wb = omega_site(five_site), omegabar_site(five_site)
    barred = set(wb.elements(AB, 3))
    for x in w.elements(AB, 3):
        assert wb.embed(x) in barred
    inf = wb.infinity(AB)
    assert wb.succ(AB, inf) == inf


def test_sum_examples(five_site):
    one = sum_sites([five_site])
    assert len(one.objects) == len(five_site.objects) and check_site(one).ok
    two = sum_sites([five_site, five_site])
    assert len(two.objects) == 9
    assert check_site(two).ok


def test_sum_sheaf_iff_restrictions(five_site):
    two = sum_sites([five_site, five_site])
    for P in (set_presheaf(two, (0, 1)), representable(two, (0, AB)), representable(two, STAR)):
        parts = [restrict_presheaf(P, i) for i in range(2)]
        assert (is_sheaf(P) is None) == all(is_sheaf(Q) is None for Q in parts)
        assert all(is_concrete_presheaf(Q) for Q in parts) == is_concrete_presheaf(P)


def test_coproduct_at_point_free_object(five_site):
    one = terminal_presheaf(five_site)
    co = coproduct_presheaf(one, one)
    empty = ("s", frozenset())
    # two elements and no points to tell them apart
    assert len(co.values[empty]) == 2 and not is_concrete_presheaf(co)
    assert is_sheaf(co) is not None
    im = concrete_image(co)
    assert len(im.values[empty]) == 1 and is_concrete_presheaf(im)
    assert len(im.values[AB]) == len(co.values[AB]) == 2


def test_json_round_trip(five_site):
    back = site_from_json(site_to_json(five_site))
    assert len(back.objects) == 5 and check_site(back).ok
    assert site_to_json(back)["covers"] == site_to_json(five_site)["covers"]


def test_build_rejects_non_faithful():
    cf = two_atom_cf()
    cf.morphisms.append(("copy", "s", "s", {"a": "a", "b": "b"}))
    with pytest.raises(ValueError):
        build_site(cf)


def test_from_basis_unit():
    cf = site_from_basis(0, budget=6, types=[ONE_T])
    assert list(cf.objects) == ["1"]
    o = cf.objects["1"]
    assert len(o.carrier) == 1
    assert o.system == {pp(), frozenset([frozenset(o.carrier)])}
    assert check_site(build_site(cf)).ok


def test_from_basis_nat():
    cf = site_from_basis(1, budget=10, types=[NAT])
    o = cf.objects["nat"]
    assert o == full_ssp(o.carrier) and len(o.carrier) == 2
    site = build_site(cf)
    assert check_site(site).ok and check_generic_semidecidable(site).ok
