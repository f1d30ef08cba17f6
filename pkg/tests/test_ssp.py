import itertools
import random

import pytest

from pcfv.ssp import (
    BOTTOM, SSPMorphism, SSPObject, check_axioms, check_morphism, closure, full_ssp,
    kleisli_compose_ssp, lift_ssp, minimal_ssp, partial_partitions, pp, preimage_partition, ssp_from_json, ssp_to_json,
)

AB = frozenset("ab")
ABC = frozenset("abc")


def all_objects(carrier):
    """Every valid system on ``carrier``, by brute force over subsets."""
    pps = partial_partitions(carrier)
    floor = {frozenset(), pp(carrier) if carrier else frozenset()}
    rest = [p for p in pps if p not in floor]
    out = []
    for bits in itertools.product((0, 1), repeat=len(rest)):
        system = floor | {p for p, b in zip(rest, bits) if b}
        if check_axioms(carrier, system) is None:
            out.append(SSPObject(carrier, system))
    return out


@pytest.fixture(scope="module")
def small_objects():
    return [o for k in range(4) for o in all_objects(frozenset("abc"[:k]))]


def test_axiom_examples():
    assert check_axioms(AB, {pp(), pp("ab")}) is None
    assert len(partial_partitions(AB)) == 5
    assert check_axioms(AB, partial_partitions(AB)) is None
    bad = check_axioms(AB, {pp("ab"), pp("a", "b")})
    assert bad is not None and bad.axiom == 1


def test_closure_examples():
    assert closure(AB, [pp("a", "b")]).system == frozenset(partial_partitions(AB))
    assert closure(AB).system == {pp(), pp("ab")}
    got = closure(ABC, [pp("a", "bc")]).system
    assert got == {pp(), pp("a"), pp("bc"), pp("abc"), pp("a", "bc")}


def test_closure_is_idempotent_and_monotone_on_two_atoms():
    pps = partial_partitions(AB)
    for k in range(len(pps) + 1):
        for gens in itertools.combinations(pps, k):
            c = closure(AB, gens)
            assert c.check() is None
            assert closure(AB, c.system) == c
            for extra in pps:
                assert c.system <= closure(AB, gens + (extra,)).system


def test_small_object_counts(small_objects):
    # one system on ∅ and on a singleton; the 2-atom systems are found by brute force
    sizes = {k: sum(1 for o in small_objects if len(o.carrier) == k) for k in range(4)}
    assert sizes[0] == 1 and sizes[1] == 1
    assert sizes[2] == len(all_objects(AB)) >= 2


def test_identity_morphisms(small_objects):
    for o in small_objects:
        assert check_morphism({a: a for a in o.carrier}, o, o) is None


def test_constant_maps_always_pass(small_objects):
    for src, tgt in itertools.product(small_objects, repeat=2):
        for y in tgt.carrier:
            assert check_morphism({a: y for a in src.carrier}, src, tgt) is None


def test_identity_from_minimal_to_full_fails():
    ce = check_morphism({"a": "a", "b": "b"}, minimal_ssp(AB), full_ssp(AB))
    assert ce is not None and ce.axiom == 4
    assert preimage_partition({"a": "a", "b": "b"}, pp("a", "b")) not in minimal_ssp(AB).system


def _passing(src, tgt):
    out = []
    atoms = src.atoms()
    for imgs in itertools.product(tgt.atoms(), repeat=len(atoms)):
        f = dict(zip(atoms, imgs))
        if check_morphism(f, src, tgt) is None:
            out.append(f)
    return out


def _composes(objs):
    for a, b, c in objs:
        for f in _passing(a, b):
            for g in _passing(b, c):
                assert check_morphism({x: g[f[x]] for x in f}, a, c) is None


def test_morphisms_compose_up_to_two_atoms():
    objs = [o for k in range(3) for o in all_objects(frozenset("ab"[:k]))]
    _composes(itertools.product(objs, repeat=3))


def test_morphisms_compose_three_atoms_sampled(small_objects):
    rng = random.Random(7)
    three = [o for o in small_objects if len(o.carrier) == 3]
    _composes([tuple(rng.choice(three) for _ in range(3)) for _ in range(150)])


def test_lift_of_one_atom():
    lo = lift_ssp(minimal_ssp({"a"}))
    assert lo.carrier == {"a", BOTTOM}
    assert lo.system == {pp(), pp("a"), frozenset([frozenset(["a", BOTTOM])])}
    assert lo.check() is None


def test_kleisli_examples():
    o = full_ssp(AB)
    ident = SSPMorphism.of(o, o, {"a": "a", "b": "b"}, partial=True)
    f = SSPMorphism.of(o, o, {"a": "b"}, partial=True)
    assert kleisli_compose_ssp(ident, f) == f
    assert kleisli_compose_ssp(f, ident) == f
    never = SSPMorphism.of(o, o, {}, partial=True)
    assert kleisli_compose_ssp(never, never).mapping == ()
    assert never.check() is None


def test_json_round_trip():
    o = closure(ABC, [pp("a", "bc")])
    carrier, system = ssp_from_json(ssp_to_json(o))
    assert SSPObject(carrier, system) == o
