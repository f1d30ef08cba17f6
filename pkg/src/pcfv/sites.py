"""Finite concrete sites, presheaves on them and the sheaf condition.

Sites here are concrete: every object has a finite point set and a
morphism *is* a function between point sets, stored as the tuple of images
of the source points in their canonical order.  That makes equality and
composition of morphisms decidable and cheap.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .ssp import (
    BOTTOM, SSPObject, atom_key, check_morphism, closure, lift_ssp, partial_partitions,
    preimage_partition,
)

__all__ = [
    "STAR", "Fn", "FiniteSite", "FinitePresheaf", "CFPresentation", "Violation", "SiteReport",
    "SheafFailure", "TooLarge", "build_site", "check_category", "check_coverage",
    "check_concrete_site", "check_ML", "check_site", "is_sheaf", "is_concrete_presheaf",
    "check_presheaf", "set_presheaf", "representable", "function_presheaf",
    "sheafify_representable", "delta_site", "check_generic_semidecidable", "lift_presheaf",
    "terminal_presheaf", "omega_site", "omegabar_site", "OmegaPresheaf", "sum_sites",
    "restrict_presheaf", "concrete_image", "product_presheaf", "coproduct_presheaf", "site_from_basis",
    "random_cf", "random_subpresheaf", "site_to_json", "site_from_json", "close_category",
]

STAR = "⋆"
MAX_LEGS = 8
MAX_VALUES = 64


class TooLarge(ValueError):
    """An exhaustive check would exceed its declared caps."""


@dataclass(frozen=True, slots=True)
class Fn:
    src: object
    tgt: object
    images: tuple

    def __repr__(self):
        return f"Fn({_show(self.src)}→{_show(self.tgt)}: {list(self.images)})"


def _show(o) -> str:
    if o == STAR:
        return STAR
    if isinstance(o, tuple) and len(o) == 2 and isinstance(o[1], frozenset):
        return f"({o[0]},{{{','.join(str(a) for a in sorted(o[1], key=atom_key))}}})"
    if isinstance(o, tuple) and len(o) == 2 and isinstance(o[0], int):
        return f"{o[0]}:{_show(o[1])}"
    return str(o)


# ---------------------------------------------------------------------------
# sites


class FiniteSite:
    """A finite concrete category with a coverage.

    ``homs[(a, b)]`` lists the morphisms ``a -> b``; ``covers`` lists pairs
    ``(a, legs)``.  ``delta`` optionally gives the semidecidable subsets of each
    object and ``subobj`` the object carried by each of them (``None`` for the
    empty subset of the terminal object).
    """

    def __init__(self, objects, points: Mapping, homs: Mapping, covers: Sequence,
                 star=STAR, delta: Optional[Mapping] = None, subobj: Optional[Mapping] = None,
                 name: str = ""):
        self.objects = tuple(objects)
        self.points = {a: tuple(points[a]) for a in self.objects}
        self.star = star
        self.homs = {(a, b): tuple(homs.get((a, b), ())) for a in self.objects for b in self.objects}
        self.covers = [(a, tuple(legs)) for a, legs in covers]
        self.delta = dict(delta) if delta is not None else None
        self.subobj = dict(subobj) if subobj is not None else None
        self.name = name
        self._pidx = {a: {p: i for i, p in enumerate(self.points[a])} for a in self.objects}
        self._homset = {k: frozenset(v) for k, v in self.homs.items()}
        self._covers_at = {}
        for a, legs in self.covers:
            self._covers_at.setdefault(a, []).append(legs)

    # category structure
    def identity(self, a) -> Fn:
        return Fn(a, a, self.points[a])

    def compose(self, g: Fn, f: Fn) -> Fn:
        """``g ∘ f``."""
        if f.tgt != g.src:
            raise ValueError(f"cannot compose {g!r} after {f!r}")
        idx = self._pidx[g.src]
        gi = g.images
        return Fn(f.src, g.tgt, tuple(gi[idx[y]] for y in f.images))

    def hom(self, a, b) -> tuple:
        return self.homs[(a, b)]

    def has(self, f: Fn) -> bool:
        return f in self._homset.get((f.src, f.tgt), ())

    def apply(self, f: Fn, p):
        return f.images[self._pidx[f.src][p]]

    def covers_of(self, a) -> list:
        return self._covers_at.get(a, [])

    def into(self, a) -> list:
        """All morphisms with codomain ``a``."""
        return [f for b in self.objects for f in self.homs[(b, a)]]

    def point_map(self, a, p) -> Fn:
        return Fn(self.star, a, (p,))

    def n_morphisms(self) -> int:
        return sum(len(v) for v in self.homs.values())

    def __repr__(self):
        return (f"FiniteSite({self.name or 'site'}: {len(self.objects)} objects, "
                f"{self.n_morphisms()} morphisms, {len(self.covers)} covers)")


@dataclass
class Violation:
    check: str
    detail: str
    witness: tuple = ()

    def __str__(self):
        return f"{self.check}: {self.detail}"


@dataclass
class SiteReport:
    violations: list = field(default_factory=list)
    checked: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, check, detail, *witness):
        self.violations.append(Violation(check, detail, witness))

    def merge(self, other: "SiteReport"):
        self.violations.extend(other.violations)
        for k, v in other.checked.items():
            self.checked[k] = self.checked.get(k, 0) + v
        return self

    def __str__(self):
        if self.ok:
            return "ok (" + ", ".join(f"{k}={v}" for k, v in self.checked.items()) + ")"
        return "\n".join(str(v) for v in self.violations)


def check_category(site: FiniteSite) -> SiteReport:
    """Identities, closure under composition, well-typed morphisms, terminal object."""
    r = SiteReport()
    n = 0
    for a in site.objects:
        if site.identity(a) not in site._homset[(a, a)]:
            r.add("category", "identity missing", a)
        to_star = site.hom(a, site.star)
        if len(to_star) != 1:
            r.add("category", "terminal object has the wrong number of maps in", a, len(to_star))
    for (a, b), fs in site.homs.items():
        pb = set(site.points[b])
        for f in fs:
            if f.src != a or f.tgt != b or len(f.images) != len(site.points[a]) \
                    or not set(f.images) <= pb:
                r.add("category", "malformed morphism", f)
    for a in site.objects:
        for b in site.objects:
            for f in site.homs[(a, b)]:
                for c in site.objects:
                    hs = site._homset[(a, c)]
                    for g in site.homs[(b, c)]:
                        n += 1
                        if site.compose(g, f) not in hs:
                            r.add("category", "not closed under composition", g, f)
                            return r
    r.checked["compositions"] = n
    return r


def check_concrete_site(site: FiniteSite) -> SiteReport:
    """Points of ``a`` are the maps from the terminal object; morphisms are
    determined by their action on points; covers are jointly surjective."""
    r = SiteReport()
    star = site.star
    if len(site.points[star]) != 1:
        r.add("concrete", "terminal object must have exactly one point")
    for a in site.objects:
        pts = site.hom(star, a)
        if {f.images for f in pts} != {(p,) for p in site.points[a]} \
                or len(pts) != len(site.points[a]):
            r.add("concrete", "points do not match maps out of the terminal object", a)
    for (a, b), fs in site.homs.items():
        seen = {}
        for f in fs:
            key = tuple(site.compose(f, x) for x in site.hom(star, a))
            if key in seen and seen[key] != f:
                r.add("concrete", "two morphisms agree on points", seen[key], f)
            seen[key] = f
    for a, legs in site.covers:
        hit = set()
        for f in legs:
            if f.tgt != a:
                r.add("concrete", "cover leg has the wrong codomain", a, f)
            for x in site.hom(star, f.src):
                hit.add(site.compose(f, x))
        if hit != set(site.hom(star, a)):
            r.add("concrete", "cover is not jointly surjective on points", a, legs)
    r.checked["covers"] = len(site.covers)
    return r


def check_coverage(site: FiniteSite) -> SiteReport:
    """Every cover pulls back along every morphism into a refining cover."""
    r = SiteReport()
    n = 0
    for a, legs in site.covers:
        # composites through the legs, per source object
        reach = {}
        for f in legs:
            for b in site.objects:
                bucket = reach.setdefault(b, set())
                for k in site.hom(b, f.src):
                    bucket.add(site.compose(f, k))
        for g in site.into(a):
            n += 1
            b = g.src
            ok = False
            for legs2 in site.covers_of(b):
                if all(site.compose(g, h) in reach.get(h.src, ()) for h in legs2):
                    ok = True
                    break
            if not ok:
                r.add("coverage", "no refining cover after pulling back", a, legs, g)
    r.checked["pullbacks"] = n
    return r


def check_ML(site: FiniteSite) -> SiteReport:
    """(M): identity families cover; (L): covers compose."""
    r = SiteReport()
    cover_set = {(a, frozenset(legs)) for a, legs in site.covers}
    for a in site.objects:
        if (a, frozenset([site.identity(a)])) not in cover_set:
            r.add("M", "identity family is not a cover", a)
    n = 0
    for a, legs in site.covers:
        options = [site.covers_of(f.src) for f in legs]
        if any(not o for o in options):
            r.add("L", "a leg's domain has no cover", a, legs)
            continue
        for choice in itertools.product(*options):
            n += 1
            comp = frozenset(site.compose(f, g) for f, sub in zip(legs, choice) for g in sub)
            if (a, comp) not in cover_set:
                r.add("L", "composite family is not a cover", a, legs, choice)
                break
    r.checked["composites"] = n
    return r


def check_site(site: FiniteSite) -> SiteReport:
    r = SiteReport()
    r.merge(check_category(site))
    r.merge(check_coverage(site))
    r.merge(check_ML(site))
    r.merge(check_concrete_site(site))
    return r


# ---------------------------------------------------------------------------
# presheaves


class FinitePresheaf:
    """Finite sets ``values[a]`` with a contravariant action ``act(f, x)``.

    ``act`` maps ``f : a -> b`` and ``x`` in ``values[b]`` to an element of
    ``values[a]``.
    """

    def __init__(self, site: FiniteSite, values: Mapping, act: Callable, name: str = ""):
        self.site = site
        self.values = {a: tuple(values[a]) for a in site.objects}
        self._act = act
        self.name = name
        self._memo = {}

    def act(self, f: Fn, x):
        key = (f, x)
        y = self._memo.get(key)
        if y is None:
            y = self._act(f, x)
            self._memo[key] = y
        return y

    def size(self) -> int:
        return sum(len(v) for v in self.values.values())

    def __repr__(self):
        return f"FinitePresheaf({self.name or '?'}: {self.size()} elements)"


def _precompose(site):
    def act(f, x):
        idx = site._pidx[f.tgt]
        return tuple(x[idx[y]] for y in f.images)
    return act


def function_presheaf(site: FiniteSite, values: Mapping, name: str = "") -> FinitePresheaf:
    """Elements at ``a`` are functions ``|a| -> X`` (tuples over the points); action precomposes."""
    return FinitePresheaf(site, values, _precompose(site), name)


def set_presheaf(site: FiniteSite, A: Sequence, name: str = "") -> FinitePresheaf:
    """``Set(|-|, A)``."""
    A = tuple(A)
    values = {a: tuple(itertools.product(A, repeat=len(site.points[a]))) for a in site.objects}
    return function_presheaf(site, values, name or f"Set(|-|,{len(A)})")


def terminal_presheaf(site: FiniteSite) -> FinitePresheaf:
    return set_presheaf(site, ("*",), "1")


def representable(site: FiniteSite, c) -> FinitePresheaf:
    """``C(-, c)`` as a subfunctor of ``Set(|-|, |c|)``."""
    values = {a: tuple(sorted({f.images for f in site.hom(a, c)}, key=_tkey)) for a in site.objects}
    return function_presheaf(site, values, f"y({_show(c)})")


def _tkey(t):
    return tuple(atom_key(x) if not isinstance(x, tuple) else (3, repr(x)) for x in t)


def check_presheaf(P: FinitePresheaf) -> SiteReport:
    """Closure of the action, identity law and composition law, exhaustively."""
    r = SiteReport()
    site = P.site
    vals = {a: set(v) for a, v in P.values.items()}
    n = 0
    for a in site.objects:
        ida = site.identity(a)
        for x in P.values[a]:
            if P.act(ida, x) != x:
                r.add("presheaf", "identity acts non-trivially", a, x)
    for (a, b), fs in site.homs.items():
        for f in fs:
            for x in P.values[b]:
                if P.act(f, x) not in vals[a]:
                    r.add("presheaf", "action leaves the value set", f, x)
                    return r
    for a in site.objects:
        for b in site.objects:
            for f in site.homs[(a, b)]:
                for c in site.objects:
                    for g in site.homs[(b, c)]:
                        gf = site.compose(g, f)
                        for x in P.values[c]:
                            n += 1
                            if P.act(gf, x) != P.act(f, P.act(g, x)):
                                r.add("presheaf", "action is not functorial", f, g, x)
                                return r
    r.checked["functoriality"] = n
    return r


def is_concrete_presheaf(P: FinitePresheaf) -> bool:
    """Elements are separated by their restrictions along points."""
    site = P.site
    for a in site.objects:
        pts = site.hom(site.star, a)
        seen = set()
        for x in P.values[a]:
            key = tuple(P.act(p, x) for p in pts)
            if key in seen:
                return False
            seen.add(key)
    return True


@dataclass
class SheafFailure:
    cover: tuple
    family: tuple
    kind: str  # "no amalgamation" or "not unique"
    amalgamations: tuple = ()

    def __str__(self):
        a, legs = self.cover
        return f"{self.kind} over a cover of {_show(a)} with {len(legs)} legs"


def _compatible_pairs(P, site, fi, fj):
    """Pairs (s, t) in P(dom fi) x P(dom fj) agreeing on every span with fi∘g = fj∘h."""
    ai, aj = fi.src, fj.src
    spans = []
    for b in site.objects:
        by_comp = {}
        for g in site.hom(b, ai):
            by_comp.setdefault(site.compose(fi, g), []).append(g)
        for h in site.hom(b, aj):
            for g in by_comp.get(site.compose(fj, h), ()):
                spans.append((g, h))
    ok = set()
    for s in P.values[ai]:
        for t in P.values[aj]:
            if all(P.act(g, s) == P.act(h, t) for g, h in spans):
                ok.add((s, t))
    return ok


def matching_families(P: FinitePresheaf, a, legs) -> Iterable[tuple]:
    """All matching families over the cover ``legs`` of ``a`` (backtracking)."""
    site = P.site
    k = len(legs)
    if k > MAX_LEGS:
        raise TooLarge(f"cover with {k} legs exceeds the cap of {MAX_LEGS}")
    for f in legs:
        if len(P.values[f.src]) > MAX_VALUES:
            raise TooLarge(f"value set of size {len(P.values[f.src])} exceeds the cap of {MAX_VALUES}")
    comp = {}
    for i in range(k):
        for j in range(i, k):
            comp[(i, j)] = _compatible_pairs(P, site, legs[i], legs[j])
    choice = []

    def rec(i):
        if i == k:
            yield tuple(choice)
            return
        for s in P.values[legs[i].src]:
            if (s, s) not in comp[(i, i)]:
                continue
            if all((choice[j], s) in comp[(j, i)] for j in range(i)):
                choice.append(s)
                yield from rec(i + 1)
                choice.pop()

    yield from rec(0)


def is_sheaf(P: FinitePresheaf, site: Optional[FiniteSite] = None) -> Optional[SheafFailure]:
    """None if every matching family on every cover has exactly one amalgamation."""
    site = site or P.site
    for a, legs in site.covers:
        if len(P.values[a]) > MAX_VALUES:
            raise TooLarge(f"value set of size {len(P.values[a])} exceeds the cap of {MAX_VALUES}")
        restr = {}
        for s in P.values[a]:
            restr.setdefault(tuple(P.act(f, s) for f in legs), []).append(s)
        for fam in matching_families(P, a, legs):
            hits = restr.get(fam, [])
            if len(hits) != 1:
                kind = "no amalgamation" if not hits else "not unique"
                return SheafFailure((a, legs), fam, kind, tuple(hits))
    return None


def sheafify_representable(site: FiniteSite, c, check_ml: bool = True) -> FinitePresheaf:
    """Close ``C(-, c)`` under amalgamation inside ``Set(|-|, |c|)`` in one pass."""
    if check_ml:
        rep = check_ML(site)
        if not rep.ok:
            raise ValueError(f"site fails (M)/(L): {rep}")
    P0 = representable(site, c)
    P1 = _amalgamation_pass(site, P0)
    P2 = _amalgamation_pass(site, P1)
    if P2.values != P1.values:
        raise AssertionError("a second amalgamation pass added sections")
    P1.name = f"a{P0.name}"
    return P1


def _amalgamation_pass(site, P):
    """Add, at each object, the glued function of every matching family."""
    values = {a: set(v) for a, v in P.values.items()}
    for a, legs in site.covers:
        for fam in matching_families(P, a, legs):
            glued = {}
            ok = True
            for f, s in zip(legs, fam):
                for p, v in zip(site.points[f.src], s):
                    q = site.apply(f, p)
                    if glued.setdefault(q, v) != v:
                        ok = False
            if ok and len(glued) == len(site.points[a]):
                values[a].add(tuple(glued[q] for q in site.points[a]))
    return function_presheaf(site, {a: sorted(v, key=_tkey) for a, v in values.items()}, P.name)


# ---------------------------------------------------------------------------
# Δ, lifting, ω and ω̄


def delta_site(site: FiniteSite) -> FinitePresheaf:
    """Semidecidable subsets, acted on by preimage."""
    if site.delta is None:
        raise ValueError("site carries no semidecidable-subset structure")

    def act(f, u):
        return frozenset(p for p in site.points[f.src] if site.apply(f, p) in u)

    values = {a: tuple(site.delta[a]) for a in site.objects}
    return FinitePresheaf(site, values, act, "Δ")


def check_generic_semidecidable(site: FiniteSite) -> SiteReport:
    """Δ classifies: each element names a distinct subfunctor of the representable,
    top and bottom are preserved, and every such subfunctor is closed under precomposition."""
    r = SiteReport()
    D = delta_site(site)
    n = 0
    for a in site.objects:
        whole = frozenset(site.points[a])
        if whole not in D.values[a] or frozenset() not in D.values[a]:
            r.add("Δ", "top or bottom subset missing", a)
        seen = {}
        for u in D.values[a]:
            sub = {b: frozenset(f for f in site.hom(b, a) if D.act(f, u) == frozenset(site.points[b]))
                   for b in site.objects}
            for b in site.objects:
                for f in sub[b]:
                    for c in site.objects:
                        for g in site.hom(c, b):
                            n += 1
                            if site.compose(f, g) not in sub[c]:
                                r.add("Δ", "classified family is not a subfunctor", a, u)
            key = tuple(sorted((_show(b), tuple(sorted(map(repr, fs)))) for b, fs in sub.items()))
            if key in seen:
                r.add("Δ", "two subsets classify the same subobject", a, seen[key], u)
            seen[key] = u
        for b in site.objects:
            for f in site.hom(b, a):
                if D.act(f, whole) != frozenset(site.points[b]):
                    r.add("Δ", "top is not preserved", f)
                if D.act(f, frozenset()) != frozenset():
                    r.add("Δ", "bottom is not preserved", f)
    r.checked["subfunctor checks"] = n
    return r


def lift_presheaf(A: FinitePresheaf) -> FinitePresheaf:
    """Elements ``(U', s)`` with ``U'`` semidecidable and ``s`` in ``A`` at the object ``U'``
    carries; at the terminal object ``(∅, None)`` is ⊥."""
    site = A.site
    if site.delta is None or site.subobj is None:
        raise ValueError("site carries no semidecidable-subset structure")
    values = {}
    for a in site.objects:
        elems = []
        for u in site.delta[a]:
            o = site.subobj[(a, u)]
            if o is None:
                elems.append((u, None))
            else:
                elems.extend((u, s) for s in A.values[o])
        values[a] = elems

    def act(f, x):
        u, s = x
        b = f.src
        v = frozenset(p for p in site.points[b] if site.apply(f, p) in u)
        ob = site.subobj[(b, v)]
        if ob is None:
            return (v, None)
        if s is None:
            # ⊥ pulled back to a non-terminal object: the empty part
            only = A.values[ob]
            if len(only) != 1:
                raise ValueError("lifting needs a single section over empty objects")
            return (v, only[0])
        oa = site.subobj[(f.tgt, u)]
        g = Fn(ob, oa, tuple(site.apply(f, p) for p in site.points[ob]))
        if not site.has(g):
            raise ValueError(f"restriction {g!r} is not a morphism")
        return (v, A.act(g, s))

    return FinitePresheaf(site, values, act, f"L{A.name}")


class OmegaPresheaf:
    """ω or ω̄ on a site, as functions from points to thresholds.

    An element at ``a`` assigns each point ``p`` the number ``t(p)`` of
    sequence positions containing it (``INF`` when it is in all of them);
    for ω̄ a point may additionally sit in the slot at infinity.  The sets
    ``{p | t(p) > i}`` and the slot must be semidecidable.  Elements whose
    finite thresholds are all below ``bound`` form a finite sub-presheaf.
    """

    INF = "∞"

    def __init__(self, site: FiniteSite, bar: bool):
        if site.delta is None:
            raise ValueError("site carries no semidecidable-subset structure")
        self.site = site
        self.bar = bar

    def _ok(self, a, t, slot):
        semis = set(self.site.delta[a])
        pts = self.site.points[a]
        finite = sorted({x for x in t if x != self.INF})
        for i in [-1] + finite:
            up = frozenset(p for p, x in zip(pts, t) if x == self.INF or x > i)
            if up not in semis:
                return False
        if slot is not None:
            s = frozenset(p for p, b in zip(pts, slot) if b)
            if s not in semis:
                return False
        return True

    def elements(self, a, bound: int) -> list:
        pts = self.site.points[a]
        choices = list(range(bound)) + ([self.INF] if self.bar else [])
        out = []
        for t in itertools.product(choices, repeat=len(pts)):
            slots = [None]
            if self.bar:
                infs = [i for i, x in enumerate(t) if x == self.INF]
                slots = []
                for m in itertools.product((0, 1), repeat=len(infs)):
                    s = [0] * len(pts)
                    for i, b in zip(infs, m):
                        s[i] = b
                    slots.append(tuple(s))
            for slot in slots:
                if self._ok(a, t, slot):
                    out.append((t, slot))
        return out

    def act(self, f: Fn, x):
        t, slot = x
        idx = self.site._pidx[f.tgt]
        t2 = tuple(t[idx[y]] for y in f.images)
        s2 = None if slot is None else tuple(slot[idx[y]] for y in f.images)
        return (t2, s2)

    def truncated(self, bound: int) -> FinitePresheaf:
        values = {a: self.elements(a, bound) for a in self.site.objects}
        return FinitePresheaf(self.site, values, self.act, ("ω̄" if self.bar else "ω") + f"<{bound}")

    # the structure maps, at the level of representations
    def succ(self, a, x):
        t, slot = x
        return (tuple(v if v == self.INF else v + 1 for v in t), slot)

    def infinity(self, a):
        n = len(self.site.points[a])
        return ((self.INF,) * n, (1,) * n if self.bar else None)

    def embed(self, x):
        """ω → ω̄: the slot at infinity is the eventual value (empty for ω)."""
        t, _ = x
        return (t, tuple(0 for _ in t))

    def points_at_star(self, bound: int) -> list:
        """Threshold readings at the terminal object, with ``∞`` last for ω̄."""
        out = list(range(bound))
        if self.bar:
            out.append(self.INF)
        return out

    def threshold_sequence(self, t, length: int) -> list:
        """The descending sequence of subsets of the terminal point named by a threshold."""
        return [frozenset(self.site.points[self.site.star]) if (t == self.INF or i < t) else frozenset()
                for i in range(length)]


def omega_site(site: FiniteSite) -> OmegaPresheaf:
    return OmegaPresheaf(site, bar=False)


def omegabar_site(site: FiniteSite) -> OmegaPresheaf:
    return OmegaPresheaf(site, bar=True)


# ---------------------------------------------------------------------------
# I_{C,F}


@dataclass
class CFPresentation:
    """A category of finite types and partial maps, already interpreted in SSP_⊥.

    ``objects`` maps each object to its SSP object; ``morphisms`` lists
    ``(name, src, tgt, mapping)`` with ``mapping`` a partial function on atoms
    (missing atoms are undefined).
    """
    objects: dict
    morphisms: list

    def fn(self, m) -> tuple:
        _, src, tgt, mapping = m
        return (src, tgt, tuple(sorted(mapping.items(), key=lambda kv: atom_key(kv[0]))))


def close_category(cf: CFPresentation, limit: int = 10_000) -> CFPresentation:
    """Add identities and composites until closed under composition."""
    seen = {}
    for m in cf.morphisms:
        seen.setdefault(cf.fn(m), m)
    for c, o in cf.objects.items():
        m = (f"id_{c}", c, c, {a: a for a in o.carrier})
        seen.setdefault(cf.fn(m), m)
    changed = True
    while changed:
        changed = False
        items = list(seen.values())
        for (n1, s1, t1, f1) in items:
            for (n2, s2, t2, f2) in items:
                if t1 != s2:
                    continue
                comp = {a: f2[b] for a, b in f1.items() if b in f2}
                m = (f"{n2}∘{n1}", s1, t2, comp)
                key = cf.fn(m)
                if key not in seen:
                    seen[key] = m
                    changed = True
                    if len(seen) > limit:
                        raise TooLarge("composition closure exceeds the morphism limit")
    return CFPresentation(dict(cf.objects), list(seen.values()))


def build_site(cf: CFPresentation, check: bool = True) -> FiniteSite:
    """The site of pairs ``(c, U)`` with ``U`` semidecidable in ``F(c)``, plus ``⋆``."""
    objs = cf.objects
    if check:
        keys = {}
        for m in cf.morphisms:
            k = cf.fn(m)
            if k in keys:
                raise ValueError(f"F is not faithful: {keys[k]} and {m[0]} have the same image")
            keys[k] = m[0]
            name, src, tgt, mapping = m
            total = {a: mapping.get(a, BOTTOM) for a in objs[src].carrier}
            bad = check_morphism(total, objs[src], lift_ssp(objs[tgt]))
            if bad:
                raise ValueError(f"{name} is not a partial SSP map: {bad}")
        for c in objs:
            if (c, c, tuple(sorted(((a, a) for a in objs[c].carrier), key=lambda kv: atom_key(kv[0])))) not in keys:
                raise ValueError(f"identity on {c} missing")
        for (n1, s1, t1, f1) in cf.morphisms:
            for (n2, s2, t2, f2) in cf.morphisms:
                if t1 == s2:
                    comp = {a: f2[b] for a, b in f1.items() if b in f2}
                    if (s1, t2, tuple(sorted(comp.items(), key=lambda kv: atom_key(kv[0])))) not in keys:
                        raise ValueError(f"composite {n2}∘{n1} missing")

    objects = [STAR]
    points = {STAR: ("*",)}
    delta = {STAR: (frozenset(), frozenset({"*"}))}
    subobj = {(STAR, frozenset()): None, (STAR, frozenset({"*"})): STAR}
    for c in sorted(objs, key=atom_key):
        semis = objs[c].semidecidable()
        for u in semis:
            o = (c, u)
            objects.append(o)
            points[o] = tuple(sorted(u, key=atom_key))
        for u in semis:
            o = (c, u)
            delta[o] = tuple(v for v in semis if v <= u)
            for v in delta[o]:
                subobj[(o, v)] = (c, v)

    homs = {}
    for a in objects:
        for b in objects:
            fs = set()
            pa, pb = points[a], points[b]
            if a == STAR or b == STAR:
                fs = {Fn(a, b, imgs) for imgs in itertools.product(pb, repeat=len(pa))}
            else:
                if not pa:
                    fs.add(Fn(a, b, ()))
                else:
                    fs.update(Fn(a, b, (y,) * len(pa)) for y in pb)
                c, u = a
                d, v = b
                for (_, s, t, mapping) in cf.morphisms:
                    if s == c and t == d and all(x in mapping for x in u) \
                            and all(mapping[x] in v for x in u):
                        fs.add(Fn(a, b, tuple(mapping[x] for x in pa)))
            homs[(a, b)] = sorted(fs, key=lambda f: _tkey(f.images))

    covers = [(STAR, (Fn(STAR, STAR, ("*",)),))]
    for a in objects[1:]:
        c, u = a
        for p in objs[c].partitions():
            union = frozenset().union(*p) if p else frozenset()
            if union != u:
                continue
            legs = tuple(Fn((c, blk), a, tuple(sorted(blk, key=atom_key)))
                         for blk in sorted(p, key=lambda b: tuple(sorted(atom_key(x) for x in b))))
            covers.append((a, legs))
        if not u:
            # the identity family, so that (M) holds at the empty objects too
            covers.append((a, (Fn(a, a, ()),)))
    return FiniteSite(objects, points, homs, covers, STAR, delta, subobj, "I_CF")


# ---------------------------------------------------------------------------
# sums


def sum_sites(sites: Sequence[FiniteSite]) -> FiniteSite:
    """Identify the terminal objects; across summands keep only constant maps."""
    if not sites:
        raise ValueError("need at least one site")
    objects = [STAR]
    points = {STAR: ("*",)}
    origin = {}
    for i, s in enumerate(sites):
        for a in s.objects:
            if a == s.star:
                continue
            o = (i, a)
            objects.append(o)
            points[o] = s.points[a]
            origin[o] = (i, a)

    def lift_obj(i, a):
        return STAR if a == sites[i].star else (i, a)

    def lift_fn(i, f):
        return Fn(lift_obj(i, f.src), lift_obj(i, f.tgt),
                  ("*",) * len(f.images) if f.tgt == sites[i].star else f.images)

    homs = {}
    for a in objects:
        for b in objects:
            ia = origin[a][0] if a != STAR else None
            ib = origin[b][0] if b != STAR else None
            pa, pb = points[a], points[b]
            if ia is not None and ib is not None and ia != ib:
                if not pa:
                    fs = [Fn(a, b, ())]
                else:
                    fs = [Fn(a, b, (y,) * len(pa)) for y in pb]
            else:
                i = ia if ia is not None else ib
                if i is None:
                    fs = [Fn(STAR, STAR, ("*",))]
                else:
                    s = sites[i]
                    sa = origin[a][1] if a != STAR else s.star
                    sb = origin[b][1] if b != STAR else s.star
                    fs = [lift_fn(i, f) for f in s.hom(sa, sb)]
            homs[(a, b)] = fs
    covers = [(STAR, (Fn(STAR, STAR, ("*",)),))]
    for i, s in enumerate(sites):
        for a, legs in s.covers:
            if a == s.star:
                continue
            covers.append(((i, a), tuple(lift_fn(i, f) for f in legs)))
    delta = subobj = None
    if all(s.delta is not None and s.subobj is not None for s in sites):
        delta = {STAR: (frozenset(), frozenset({"*"}))}
        subobj = {(STAR, frozenset()): None, (STAR, frozenset({"*"})): STAR}
        for o, (i, a) in origin.items():
            delta[o] = sites[i].delta[a]
            for u in delta[o]:
                so = sites[i].subobj[(a, u)]
                subobj[(o, u)] = None if so is None else lift_obj(i, so)
    site = FiniteSite(objects, points, homs, covers, STAR, delta, subobj, "Σ")
    site.summands = list(sites)
    site.origin = origin
    return site


def restrict_presheaf(P: FinitePresheaf, summand: int) -> FinitePresheaf:
    """Precompose a presheaf on a sum with the inclusion of one summand."""
    big = P.site
    small = big.summands[summand]

    def o(a):
        return STAR if a == small.star else (summand, a)

    def fn(f):
        return Fn(o(f.src), o(f.tgt), ("*",) * len(f.images) if f.tgt == small.star else f.images)

    values = {a: P.values[o(a)] for a in small.objects}
    return FinitePresheaf(small, values, lambda f, x: P.act(fn(f), x), f"{P.name}|{summand}")


def product_presheaf(P: FinitePresheaf, Q: FinitePresheaf) -> FinitePresheaf:
    site = P.site
    values = {a: tuple(itertools.product(P.values[a], Q.values[a])) for a in site.objects}
    return FinitePresheaf(site, values, lambda f, x: (P.act(f, x[0]), Q.act(f, x[1])),
                          f"{P.name}×{Q.name}")


def coproduct_presheaf(P: FinitePresheaf, Q: FinitePresheaf) -> FinitePresheaf:
    site = P.site
    values = {a: tuple([(0, x) for x in P.values[a]] + [(1, y) for y in Q.values[a]])
              for a in site.objects}

    def act(f, x):
        return (0, P.act(f, x[1])) if x[0] == 0 else (1, Q.act(f, x[1]))

    return FinitePresheaf(site, values, act, f"{P.name}+{Q.name}")



def concrete_image(P: FinitePresheaf) -> FinitePresheaf:
    """The image of ``P`` in ``Set(|-|, |P|)``: elements replaced by their point restrictions.

    On sites with point-free objects the pointwise coproduct of concrete
    presheaves need not be concrete; its image is the coproduct among
    concrete presheaves.
    """
    site = P.site
    pts = {a: site.hom(site.star, a) for a in site.objects}
    values = {a: sorted({tuple(P.act(x, s) for x in pts[a]) for s in P.values[a]}, key=repr)
              for a in site.objects}
    return function_presheaf(site, values, f"im {P.name}")

# ---------------------------------------------------------------------------
# generators


def random_cf(rng: random.Random, max_objects: int = 3, max_carrier: int = 3,
              max_morphisms: int = 12) -> CFPresentation:
    """A random faithful (C, F): small SSP objects and partial SSP maps, closed under composition."""
    atoms = "abc"
    while True:
        k = rng.randint(1, max_objects)
        objs = {}
        for i in range(k):
            size = rng.randint(0, max_carrier)
            carrier = frozenset(atoms[:size])
            pps = partial_partitions(carrier)
            gens = rng.sample(pps, min(len(pps), rng.randint(0, 3)))
            objs[f"c{i}"] = closure(carrier, gens)
        morphisms = []
        names = sorted(objs)
        for j in range(rng.randint(0, 6)):
            s, t = rng.choice(names), rng.choice(names)
            src, tgt = objs[s], objs[t]
            mapping = {}
            for a in src.atoms():
                choice = [None] + tgt.atoms()
                y = rng.choice(choice)
                if y is not None:
                    mapping[a] = y
            total = {a: mapping.get(a, BOTTOM) for a in src.carrier}
            if check_morphism(total, src, lift_ssp(tgt)) is None:
                morphisms.append((f"m{j}", s, t, mapping))
        try:
            cf = close_category(CFPresentation(objs, morphisms), limit=max_morphisms)
        except TooLarge:
            continue
        if len(cf.morphisms) <= max_morphisms:
            return cf


def random_subpresheaf(site: FiniteSite, A: Sequence, rng: random.Random, gens: int = 3) -> FinitePresheaf:
    """The subfunctor of ``Set(|-|, A)`` generated by a few random sections."""
    full = set_presheaf(site, A)
    values = {a: set() for a in site.objects}
    for _ in range(gens):
        a = rng.choice(site.objects)
        if full.values[a]:
            values[a].add(rng.choice(full.values[a]))
    # the empty object's unique section and the terminal points keep it non-trivial
    act = full.act
    frontier = [(a, x) for a, xs in values.items() for x in xs]
    while frontier:
        b, x = frontier.pop()
        for a in site.objects:
            for f in site.hom(a, b):
                y = act(f, x)
                if y not in values[a]:
                    values[a].add(y)
                    frontier.append((a, y))
    return function_presheaf(site, {a: sorted(v, key=_tkey) for a, v in values.items()}, "S")


# ---------------------------------------------------------------------------
# the pipeline from tabulated terms


def site_from_basis(n: int, fuel: int = 10_000, budget: int = 6, types: Sequence = (),
                    max_terms: int = 5_000, cache=None) -> CFPresentation:
    """Objects are the listed types; morphisms are total tables of enumerated terms;
    each type's system is generated by the fibres of enumerated nat-observations."""
    from .opsem import subst
    from .syntax import NAT
    from .termgen import comps_upto, var_name
    from .truncation import BasisCache, CONVERGED, erase

    cache = cache or BasisCache(n, budget, fuel)
    types = list(types)
    bases = {ty: cache.get(ty) for ty in types}
    carriers = {ty: [erase(p) for p in bases[ty].points()] for ty in types}
    x = var_name(0)

    def table(src, tgt, term):
        outs = []
        for r in bases[src].reps():
            outs.append(cache.run(subst(term, {x: r}), tgt))
        return outs

    morphisms = {}
    for s in types:
        for t in types:
            allowed = set(carriers[t])
            for term in comps_upto((s,), t, budget, n, max_terms):
                outs = table(s, t, term)
                if any(o.tag != CONVERGED for o in outs):
                    continue
                imgs = [erase(o.point) for o in outs]
                if not set(imgs) <= allowed:
                    continue
                mapping = dict(zip(carriers[s], imgs))
                key = (s, t, tuple(imgs))
                morphisms.setdefault(key, (f"t{len(morphisms)}", s, t, mapping))
    gens = {ty: set() for ty in types}
    for s in types:
        for term in comps_upto((s,), NAT, budget, n, max_terms):
            outs = table(s, NAT, term)
            fib = {}
            for p, o in zip(carriers[s], outs):
                if o.tag == CONVERGED:
                    fib.setdefault(o.point, set()).add(p)
            gens[s].add(frozenset(frozenset(v) for v in fib.values()))
    names = {ty: str(ty) for ty in types}
    cf = CFPresentation({names[ty]: SSPObject(frozenset(carriers[ty]), frozenset()) for ty in types},
                        [(nm, names[s], names[t], m) for (nm, s, t, m) in morphisms.values()])
    cf = close_category(cf)
    systems = {ty: closure(carriers[ty], gens[ty]) for ty in types}
    while True:
        changed = False
        for (nm, s, t, m) in cf.morphisms:
            sty = next(ty for ty in types if names[ty] == s)
            tty = next(ty for ty in types if names[ty] == t)
            extra = {preimage_partition(m, p) for p in systems[tty].system} - systems[sty].system
            if extra:
                systems[sty] = closure(carriers[sty], systems[sty].system | extra)
                changed = True
        if not changed:
            break
    return CFPresentation({names[ty]: systems[ty] for ty in types}, cf.morphisms)


# ---------------------------------------------------------------------------
# JSON


def _jsonable(x):
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    if isinstance(x, (tuple, list)):
        return [_jsonable(y) for y in x]
    if isinstance(x, frozenset):
        return sorted((_jsonable(y) for y in x), key=repr)
    try:
        from .truncation import point_str
        return point_str(x)
    except TypeError:
        return str(x)


def site_to_json(site: FiniteSite) -> dict:
    ids = {a: _show(a) for a in site.objects}
    morphs = []
    index = {}
    for (a, b), fs in site.homs.items():
        for f in fs:
            index[f] = len(morphs)
            morphs.append({"src": ids[a], "tgt": ids[b], "map": [_jsonable(y) for y in f.images]})
    out = {
        "star": ids[site.star],
        "objects": [{"id": ids[a], "points": [_jsonable(p) for p in site.points[a]]}
                    for a in site.objects],
        "morphisms": morphs,
        "covers": [{"object": ids[a], "legs": [index[f] for f in legs]} for a, legs in site.covers],
    }
    if site.delta is not None:
        out["delta"] = {ids[a]: [_jsonable(u) for u in site.delta[a]] for a in site.objects}
    return out


def _freeze(x):
    if isinstance(x, list):
        return tuple(_freeze(y) for y in x)
    return x


def site_from_json(data) -> FiniteSite:
    if isinstance(data, str):
        data = json.loads(data)
    objects = [o["id"] for o in data["objects"]]
    points = {o["id"]: tuple(_freeze(p) for p in o["points"]) for o in data["objects"]}
    morphs = [Fn(m["src"], m["tgt"], tuple(_freeze(y) for y in m["map"])) for m in data["morphisms"]]
    homs = {}
    for f in morphs:
        homs.setdefault((f.src, f.tgt), []).append(f)
    covers = [(c["object"], tuple(morphs[i] for i in c["legs"])) for c in data["covers"]]
    delta = subobj = None
    if "delta" in data:
        delta = {a: tuple(frozenset(_freeze(p) for p in u) for u in us) for a, us in data["delta"].items()}
    return FiniteSite(objects, points, homs, covers, data.get("star", STAR), delta, subobj, "json")
