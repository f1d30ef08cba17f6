"""Finite systems of partitions (SSP objects), their morphisms and lifting.

A partial partition is a frozenset of disjoint non-empty frozensets of
atoms.  A system is a frozenset of partial partitions.  Atoms can be any
hashable, sortable-by-``repr`` values; the lifting adds the ``BOTTOM`` atom.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

__all__ = [
    "BOTTOM", "SSPObject", "SSPMorphism", "Counterexample", "partial_partitions",
    "check_axioms", "closure", "check_morphism", "lift_ssp", "kleisli_compose_ssp",
    "full_ssp", "minimal_ssp", "pp", "is_partial_partition", "preimage_partition",
    "ssp_from_json", "ssp_to_json", "atom_key",
]


class _Bottom:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "⊥"

    def __reduce__(self):
        return (_Bottom, ())


BOTTOM = _Bottom()


def atom_key(a):
    if a is BOTTOM:
        return (2, "")
    if isinstance(a, int):
        return (0, f"{a:012d}")
    return (1, repr(a))


def _block_key(b):
    return tuple(sorted(atom_key(a) for a in b))


def _pp_key(p):
    return tuple(sorted(_block_key(b) for b in p))


def pp(*blocks) -> frozenset:
    """Build a partial partition from iterables of atoms."""
    return frozenset(frozenset(b) for b in blocks)


def is_partial_partition(p, carrier) -> bool:
    seen = set()
    for b in p:
        if not b or not b <= carrier or seen & b:
            return False
        seen |= b
    return True


def partial_partitions(carrier) -> list:
    """Every partial partition of ``carrier`` in canonical order."""
    atoms = sorted(carrier, key=atom_key)
    out = []
    # assign each atom to "unused" or a block index (restricted growth)
    def rec(i, blocks):
        if i == len(atoms):
            out.append(frozenset(frozenset(b) for b in blocks))
            return
        a = atoms[i]
        rec(i + 1, blocks)
        for b in blocks:
            b.append(a)
            rec(i + 1, blocks)
            b.pop()
        blocks.append([a])
        rec(i + 1, blocks)
        blocks.pop()
    rec(0, [])
    return sorted(out, key=lambda p: (len(p), _pp_key(p)))


@dataclass(frozen=True)
class Counterexample:
    axiom: int  # 0: malformed, 1: {w}/∅ missing, 2: refinement, 3: merge, 4: morphism preimage
    detail: str
    witness: tuple = ()

    def __str__(self):
        return f"axiom {self.axiom}: {self.detail}"


@dataclass(frozen=True)
class SSPObject:
    carrier: frozenset
    system: frozenset

    def __post_init__(self):
        object.__setattr__(self, "carrier", frozenset(self.carrier))
        object.__setattr__(self, "system", frozenset(frozenset(frozenset(b) for b in p)
                                                     for p in self.system))

    def atoms(self) -> list:
        return sorted(self.carrier, key=atom_key)

    def partitions(self) -> list:
        return sorted(self.system, key=lambda p: (len(p), _pp_key(p)))

    def semidecidable(self) -> list:
        """Subsets U with ``{U}`` in the system, plus the empty set."""
        subs = {frozenset()}
        for p in self.system:
            if len(p) == 1:
                subs.add(next(iter(p)))
        return sorted(subs, key=lambda u: (len(u), _block_key(u)))

    def check(self) -> Optional[Counterexample]:
        return check_axioms(self.carrier, self.system)

    def to_json(self) -> dict:
        return ssp_to_json(self)

    def __str__(self):
        def blk(b):
            return "{" + ",".join(str(a) for a in sorted(b, key=atom_key)) + "}"
        parts = ["{" + ", ".join(blk(b) for b in sorted(p, key=_block_key)) + "}"
                 for p in self.partitions()]
        return f"SSP({blk(self.carrier)}; " + ", ".join(parts) + ")"


def _top(carrier) -> frozenset:
    return frozenset([frozenset(carrier)]) if carrier else frozenset()


def _refine(p, u, q):
    return (p - {u}) | frozenset(u & v for v in q if u & v)


def _merge(p, u, v):
    return (p - {u, v}) | {u | v}


def check_axioms(carrier, system) -> Optional[Counterexample]:
    """None if the system satisfies the axioms, else the first failure found."""
    carrier = frozenset(carrier)
    system = frozenset(frozenset(frozenset(b) for b in p) for p in system)
    for p in sorted(system, key=_pp_key):
        if not is_partial_partition(p, carrier):
            return Counterexample(0, "not a partial partition of the carrier", (p,))
    if frozenset() not in system:
        return Counterexample(1, "the empty partition is missing")
    if _top(carrier) not in system:
        return Counterexample(1, "the one-block partition of the carrier is missing")
    ordered = sorted(system, key=_pp_key)
    for p in ordered:
        blocks = sorted(p, key=_block_key)
        for u, v in itertools.combinations(blocks, 2):
            m = _merge(p, u, v)
            if m not in system:
                return Counterexample(3, "merge missing", (p, u, v, m))
    for p in ordered:
        for u in sorted(p, key=_block_key):
            for q in ordered:
                r = _refine(p, u, q)
                if r not in system:
                    return Counterexample(2, "refinement missing", (p, u, q, r))
    return None


def closure(carrier, generators: Iterable = ()) -> SSPObject:
    """Least system containing the generators, closed under the axioms."""
    carrier = frozenset(carrier)
    system = {frozenset(), _top(carrier)}
    for g in generators:
        g = frozenset(frozenset(b) for b in g)
        if not is_partial_partition(g, carrier):
            raise ValueError(f"generator is not a partial partition: {sorted(map(sorted, g))}")
        system.add(g)
    while True:
        new = set()
        cur = list(system)
        for p in cur:
            for u, v in itertools.combinations(p, 2):
                m = _merge(p, u, v)
                if m not in system:
                    new.add(m)
        for p in cur:
            for u in p:
                for q in cur:
                    r = _refine(p, u, q)
                    if r not in system:
                        new.add(r)
        if not new:
            return SSPObject(carrier, frozenset(system))
        system |= new


def full_ssp(carrier) -> SSPObject:
    carrier = frozenset(carrier)
    return SSPObject(carrier, frozenset(partial_partitions(carrier)))


def minimal_ssp(carrier) -> SSPObject:
    return closure(carrier)


# ---------------------------------------------------------------------------
# morphisms


def preimage_partition(f: Mapping, p) -> frozenset:
    """``{f⁻¹(W) | W ∈ p} ∖ {∅}``; atoms missing from ``f`` are undefined."""
    out = set()
    for w in p:
        pre = frozenset(a for a, b in f.items() if b in w)
        if pre:
            out.add(pre)
    return frozenset(out)


@dataclass(frozen=True)
class SSPMorphism:
    """A function on carriers; when ``partial`` the missing atoms are undefined."""
    src: SSPObject
    tgt: SSPObject
    mapping: tuple  # sorted ((atom, image), ...)
    partial: bool = False

    @classmethod
    def of(cls, src, tgt, mapping: Mapping, partial: bool = False):
        items = tuple(sorted(((a, b) for a, b in mapping.items() if b is not BOTTOM),
                             key=lambda ab: atom_key(ab[0])))
        return cls(src, tgt, items, partial)

    def as_dict(self) -> dict:
        return dict(self.mapping)

    def domain(self) -> frozenset:
        return frozenset(a for a, _ in self.mapping)

    def __call__(self, a):
        return self.as_dict().get(a, BOTTOM)

    def check(self) -> Optional[Counterexample]:
        if self.partial:
            return check_morphism(self.total(), self.src, lift_ssp(self.tgt))
        return check_morphism(self.as_dict(), self.src, self.tgt)

    def total(self) -> dict:
        """The corresponding total map into the lifted target."""
        d = self.as_dict()
        return {a: d.get(a, BOTTOM) for a in self.src.carrier}


def check_morphism(f: Mapping, src: SSPObject, tgt: SSPObject) -> Optional[Counterexample]:
    """None iff the total function ``f`` pulls every target partition back into the source system."""
    f = dict(f)
    if set(f) != set(src.carrier):
        return Counterexample(0, "function is not total on the source carrier")
    for a, b in f.items():
        if b not in tgt.carrier:
            return Counterexample(0, f"image {b!r} of {a!r} is outside the target carrier")
    for p in tgt.partitions():
        pre = preimage_partition(f, p)
        if pre not in src.system:
            return Counterexample(4, "preimage partition missing from the source system", (p, pre))
    return None


def lift_ssp(o: SSPObject) -> SSPObject:
    """Add ⊥ to the carrier and the single partition ``{w ⊔ {⊥}}``."""
    carrier = o.carrier | {BOTTOM}
    return SSPObject(carrier, o.system | {frozenset([frozenset(carrier)])})


def kleisli_compose_ssp(g: SSPMorphism, f: SSPMorphism) -> SSPMorphism:
    """``g ∘ f`` as partial maps: defined where ``f`` is and ``g`` is at ``f``'s value."""
    if f.tgt != g.src:
        raise ValueError("cannot compose: endpoints differ")
    gd = g.as_dict()
    out = {}
    for a, b in f.mapping:
        if b in gd:
            out[a] = gd[b]
    return SSPMorphism.of(f.src, g.tgt, out, partial=True)


# ---------------------------------------------------------------------------
# JSON


def _atom_to_json(a):
    return "⊥" if a is BOTTOM else a


def _atom_from_json(a):
    if a == "⊥":
        return BOTTOM
    if isinstance(a, list):
        return tuple(_atom_from_json(x) for x in a)
    return a


def ssp_to_json(o: SSPObject) -> dict:
    return {
        "carrier": [_atom_to_json(a) for a in o.atoms()],
        "system": [[[_atom_to_json(a) for a in sorted(b, key=atom_key)]
                    for b in sorted(p, key=_block_key)] for p in o.partitions()],
    }


def ssp_from_json(data) -> tuple:
    """``(carrier, system)`` as read; the system is not checked here."""
    if isinstance(data, str):
        data = json.loads(data)
    carrier = frozenset(_atom_from_json(a) for a in data["carrier"])
    system = frozenset(frozenset(frozenset(_atom_from_json(a) for a in b) for b in p)
                       for p in data.get("system", []))
    return carrier, system
