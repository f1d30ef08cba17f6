"""Property suites, one per acceptance criterion.

Each ``criterion_k`` returns a ``SuiteResult``; ``run_all`` runs them in
order.  Randomised parts take an explicit seed.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import corpus
from .finmodel import FnTable, all_tables, fix, idempotent_split, lattice_height, rec_functional
from .opsem import Converged, evaluate, plug, subst
from .sites import (
    build_site, check_generic_semidecidable, check_site, delta_site, is_concrete_presheaf,
    is_sheaf, lift_presheaf, random_cf, random_subpresheaf, representable, restrict_presheaf,
    set_presheaf, sheafify_representable, site_from_basis, sum_sites, terminal_presheaf,
)
from .ssp import check_axioms, closure, full_ssp
from .syntax import (
    NAT, ONE_T, ZERO_T, App, Let, TArrow, TProd, TSum, Var, _nodes, as_numeral, parse, parse_comp,
    parse_type, type_depth, type_order,
)
from .truncation import (
    BasisCache, ConfirmedDifferent, NoDifferenceFound, approx_chain_check,
    conv, count_points, equiv, psi, realize, sample_points, tabulate,
)
from . import vnat

__all__ = ["SuiteResult", "CRITERIA", "run_all", "types_upto"] + [f"criterion_{k}" for k in range(1, 13)]


@dataclass
class SuiteResult:
    number: int
    title: str
    passed: bool
    checked: int = 0
    violations: list = field(default_factory=list)
    seconds: float = 0.0
    limit: Optional[float] = None
    notes: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f", {len(self.violations)} violations" if self.violations else ""
        return (f"[{status}] criterion {self.number:2d}: {self.title} "
                f"({self.checked} checks{extra}, {self.seconds:.1f}s)")


def _timed(number: int, title: str, limit: Optional[float]):
    def wrap(fn: Callable):
        def run(*args, **kwargs) -> SuiteResult:
            t0 = time.perf_counter()
            res = SuiteResult(number, title, True, limit=limit)
            fn(res, *args, **kwargs)
            res.seconds = time.perf_counter() - t0
            if limit is not None and res.seconds > limit:
                res.notes.append(f"over the time limit of {limit:.0f}s")
                res.passed = False
            if res.violations:
                res.passed = False
            return res
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def types_upto(depth: int) -> list:
    """Every type over 0, 1 and nat built with +, * and -> up to the given depth."""
    levels = [[ZERO_T, ONE_T, NAT]]
    seen = list(levels[0])
    for _ in range(depth - 1):
        new = []
        for a in seen:
            for b in seen:
                if max(type_depth(a), type_depth(b)) < len(levels):
                    continue
                new.extend([TSum(a, b), TProd(a, b), TArrow(a, b)])
        levels.append(new)
        seen = seen + new
    return seen


def _max_numeral(values) -> int:
    best = 0
    for v in values:
        for node in _nodes(v):
            k = as_numeral(node)
            if k is not None and k > best:
                best = k
    return best


# ---------------------------------------------------------------------------
# 1, 2: soundness and adequacy at ground type


def _ground_runs(fuel: int = 100_000):
    out = []
    for src, ty_src in corpus.GROUND:
        t = parse_comp(src)
        ty = parse_type(ty_src)
        trace = []
        res = evaluate(t, fuel, trace)
        # the level only matters for programs that produce a value
        n = _max_numeral(trace) + 1 if isinstance(res, Converged) else 1
        out.append((src, t, ty, res, n))
    return out


@_timed(1, "soundness: converging programs tabulate to their value", 60)
def criterion_1(res: SuiteResult, fuel: int = 100_000):
    converged = 0
    for src, t, ty, out, n in _ground_runs(fuel):
        if not isinstance(out, Converged):
            continue
        converged += 1
        cache = BasisCache(n, fuel=fuel)
        table = tabulate(t, ty, n, fuel, cache=cache)
        want = conv(cache.observe(out.value, ty))
        res.checked += 1
        if table.entries[0][1] != want:
            res.violations.append((src, str(table), want))
    res.notes.append(f"{converged} of {len(corpus.GROUND)} corpus programs converge")


@_timed(2, "adequacy: tabulated values are reached operationally", 60)
def criterion_2(res: SuiteResult, fuel: int = 100_000):
    for src, t, ty, out, n in _ground_runs(fuel):
        cache = BasisCache(n, fuel=fuel)
        o = tabulate(t, ty, n, fuel, cache=cache).entries[0][1]
        if o.tag != "converged":
            continue
        res.checked += 1
        if not isinstance(out, Converged) or out.value != realize(o.point, ty, n):
            res.violations.append((src, o, out))


# ---------------------------------------------------------------------------
# 3: idempotence of the truncations


def _idem_inputs(ty, cache: BasisCache, k: int, budget: int):
    m = cache.n
    if type_order(ty) <= 1:
        if count_points(ty, m) <= 64:
            return [v for _, v in cache.get(ty).entries]
        return [realize(p, ty, m) for p in sample_points(ty, m, k)]
    return [v for _, v in cache.get(ty).entries[:k]]


@_timed(3, "idempotence of ψ on bases, and n+1 fixed points at nat", 300)
def criterion_3(res: SuiteResult, levels=(0, 1, 2, 3), depth: int = 3, fuel: int = 2_000,
                per_type: int = 6, budget: int = 4):
    """Inputs come from level n+1 and results are observed at level n+1, so ψ at
    level n genuinely truncates; large point sets are sampled."""
    types = [t for t in types_upto(depth) if type_order(t) <= 2]
    moved = 0
    for n in levels:
        m = n + 1
        cache = BasisCache(m, budget=budget, fuel=fuel, exact_limit=64, sample=12)
        for ty in types:
            once = psi(ty, n, "x")
            twice = Let("y", once, psi(ty, n, "y"))
            for r in _idem_inputs(ty, cache, per_type, budget):
                a = cache.run(subst(twice, {"x": r}), ty)
                b = cache.run(subst(once, {"x": r}), ty)
                res.checked += 1
                if a != b:
                    res.violations.append((str(ty), n, r, a, b))
                elif b != cache.run(subst(_ret_x(), {"x": r}), ty):
                    moved += 1
        h = FnTable.from_table(tabulate(psi(NAT, n), NAT, m, fuel, ctx=[("x", NAT)]))
        fixed = idempotent_split(h)
        res.checked += 1
        if len(fixed) != n + 1:
            res.violations.append(("fixed points", n, fixed))
    res.notes.append(f"{len(types)} types; ψ changed its input in {moved} checks")


def _ret_x():
    from .syntax import Ret
    return Ret(Var("x"))


# ---------------------------------------------------------------------------
# 4: Kleene fixed points against direct tabulation


@_timed(4, "fixed points of tabulated functionals", 300)
def criterion_4(res: SuiteResult, levels=(0, 1, 2, 3), fuel: int = 10_000):
    for src in corpus.REC:
        rec = parse(src)
        for n in levels:
            cache = BasisCache(n, fuel=fuel)
            phi = rec_functional(rec, n, fuel, cache)
            result = fix(phi, FnTable.bottom(NAT, NAT, n))
            direct = FnTable.from_table(tabulate(App(rec, Var("x")), NAT, n, fuel, cache=cache,
                                                 ctx=[("x", NAT)]))
            res.checked += 1
            if result.table.outs != direct.outs:
                res.violations.append((src, n, str(result.table), str(direct)))
            if result.iterations > lattice_height(NAT, NAT, n):
                res.violations.append((src, n, "iterations", result.iterations))
            if n <= 1:
                for t in all_tables(NAT, NAT, n):
                    if phi(t).outs == t.outs:
                        res.checked += 1
                        if not result.table.leq(t):
                            res.violations.append((src, n, "not least", str(t)))


# ---------------------------------------------------------------------------
# 5: the chain lemma


@_timed(5, "chain lemma at point level", None)
def criterion_5(res: SuiteResult, levels=(0, 1, 2), fuel: int = 10_000):
    for ty in types_upto(2):
        if type_order(ty) > 1:
            continue
        for n in levels:
            rep = approx_chain_check(ty, n, fuel)
            res.checked += rep.checked
            res.violations.extend((str(ty), n, v) for v in rep.violations)


# ---------------------------------------------------------------------------
# 6: SSP axioms against an independent bitmask oracle


def _oracle_valid(nbits: int, system) -> bool:
    """Direct reading of the axioms on blocks encoded as bitmasks."""
    full = (1 << nbits) - 1
    if frozenset() not in system:
        return False
    if full and frozenset([full]) not in system:
        return False
    for p in system:
        blocks = list(p)
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                merged = (p - {blocks[i], blocks[j]}) | {blocks[i] | blocks[j]}
                if merged not in system:
                    return False
        for u in blocks:
            for q in system:
                refined = (p - {u}) | {u & w for w in q if u & w}
                if refined not in system:
                    return False
    return True


def _oracle_pps(nbits: int) -> list:
    out = []

    def rec(i, blocks):
        if i == nbits:
            out.append(frozenset(blocks))
            return
        rec(i + 1, blocks)
        for k in range(len(blocks)):
            old = blocks[k]
            blocks[k] = old | (1 << i)
            rec(i + 1, blocks)
            blocks[k] = old
        blocks.append(1 << i)
        rec(i + 1, blocks)
        blocks.pop()

    rec(0, [])
    return out


def _to_sets(p, atoms):
    return frozenset(frozenset(a for i, a in enumerate(atoms) if b >> i & 1) for b in p)


def _oracle_min(nbits, valid, gens):
    sup = [s for s in valid if gens <= s]
    best = min(sup, key=len)
    assert all(best <= s for s in sup)
    return best


@_timed(6, "SSP axioms and closure against the oracle", 600)
def criterion_6(res: SuiteResult, seed: int = 0, samples: int = 100):
    atoms = ("a", "b", "c")
    pps = _oracle_pps(3)
    valid3 = []
    for mask in range(1 << len(pps)):
        system = frozenset(p for i, p in enumerate(pps) if mask >> i & 1)
        want = _oracle_valid(3, system)
        got = check_axioms(frozenset(atoms), [_to_sets(p, atoms) for p in system]) is None
        res.checked += 1
        if want != got:
            res.violations.append(("axioms", sorted(map(sorted, system)), want, got))
        if want:
            valid3.append(system)
    res.notes.append(f"{len(valid3)} valid systems over 3 atoms")
    # closure: 2 atoms exhaustively, 3 atoms sampled
    pps2 = _oracle_pps(2)
    valid2 = [frozenset(p for i, p in enumerate(pps2) if mask >> i & 1)
              for mask in range(1 << len(pps2))]
    valid2 = [s for s in valid2 if _oracle_valid(2, s)]
    rng = random.Random(seed)
    jobs = [(2, valid2, frozenset(p for i, p in enumerate(pps2) if mask >> i & 1))
            for mask in range(1 << len(pps2))]
    for _ in range(samples):
        jobs.append((3, valid3, frozenset(p for p in pps if rng.random() < 0.2)))
    for nbits, valid, gens in jobs:
        ats = atoms[:nbits]
        want = _oracle_min(nbits, valid, gens)
        got = closure(frozenset(ats), [_to_sets(p, ats) for p in gens]).system
        res.checked += 1
        if got != frozenset(_to_sets(p, ats) for p in want):
            res.violations.append(("closure", nbits, sorted(map(sorted, gens))))


# ---------------------------------------------------------------------------
# 7-9: sites


def generated_family(seed: int = 0, count: int = 120) -> list:
    """A deterministic family of random faithful (C, F) pairs."""
    rng = random.Random(seed)
    return [random_cf(rng) for _ in range(count)]


def _site_checks(site):
    rep = check_site(site)
    rep.merge(check_generic_semidecidable(site))
    bad = list(rep.violations)
    fail = is_sheaf(delta_site(site))
    if fail is not None:
        bad.append(("Δ is not a sheaf", str(fail)))
    return rep, bad


@_timed(7, "I_CF sites: coverage, (M), (L), concreteness, Δ", None)
def criterion_7(res: SuiteResult, seed: int = 0, count: int = 120):
    for i, cf in enumerate(generated_family(seed, count)):
        site = build_site(cf)
        rep, bad = _site_checks(site)
        res.checked += sum(rep.checked.values()) + 1
        res.violations.extend((i, v) for v in bad)
    res.notes.append(f"{count} (C,F) pairs")


@_timed(8, "Set(|-|,A) is a sheaf; one-step sheafification", None)
def criterion_8(res: SuiteResult, seed: int = 0, count: int = 120):
    for i, cf in enumerate(generated_family(seed, count)):
        site = build_site(cf)
        res.checked += 1
        fail = is_sheaf(set_presheaf(site, (0, 1)))
        if fail is not None:
            res.violations.append((i, "Set(|-|,2)", str(fail)))
        for c in site.objects:
            res.checked += 1
            try:
                sh = sheafify_representable(site, c)
            except AssertionError as e:
                res.violations.append((i, c, str(e)))
                continue
            fail = is_sheaf(sh)
            if fail is not None:
                res.violations.append((i, c, "sheafification is not a sheaf", str(fail)))


def _sum_instances(seed: int, count: int):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        a = build_site(random_cf(rng, max_objects=2))
        b = build_site(random_cf(rng, max_objects=2))
        s = sum_sites([a, b])
        kind = len(out) % 5
        if kind == 0:
            P = set_presheaf(s, (0, 1))
        elif kind == 1:
            P = delta_site(s)
        elif kind == 2:
            P = lift_presheaf(terminal_presheaf(s))
        elif kind == 3:
            big = max(len(s.points[o]) for o in s.objects)
            P = representable(s, rng.choice([o for o in s.objects if len(s.points[o]) == big]))
        else:
            P = random_subpresheaf(s, (0, 1), rng, gens=rng.randint(1, 2))
        out.append((s, P))
    return out


@_timed(9, "sums: sheaf iff both restrictions are", None)
def criterion_9(res: SuiteResult, seed: int = 0, count: int = 50):
    sheaves = 0
    for i, (s, P) in enumerate(_sum_instances(seed, count)):
        rep = check_site(s)
        res.violations.extend((i, v) for v in rep.violations)
        whole = is_sheaf(P) is None
        parts = [restrict_presheaf(P, k) for k in range(2)]
        both = all(is_sheaf(Q) is None for Q in parts)
        sheaves += whole
        res.checked += 1
        if whole != both:
            res.violations.append((i, P.name, whole, both))
        if is_concrete_presheaf(P):
            for Q in parts:
                res.checked += 1
                if not is_concrete_presheaf(Q):
                    res.violations.append((i, P.name, "restriction is not concrete"))
    res.notes.append(f"{sheaves} of {count} presheaves are sheaves")


# ---------------------------------------------------------------------------
# 10: vertical naturals


@_timed(10, "vertical naturals: monoid, lifting action, Δ, succ/∞/i identities", 30)
def criterion_10(res: SuiteResult, seed: int = 0, samples: int = 10_000):
    rng = random.Random(seed)
    pts = vnat.sample_points()
    ident = vnat.identity()
    delta = vnat.delta_action
    wact = vnat.omegabar_action
    for _ in range(samples):
        a, b, c = (vnat.random_endo(rng) for _ in range(3))
        ab = vnat.compose(a, b)
        res.checked += 1
        if any(vnat.apply(ab, k) != vnat.apply(a, vnat.apply(b, k)) for k in pts):
            res.violations.append(("apply", a, b))
        if vnat.compose(ab, c) != vnat.compose(a, vnat.compose(b, c)):
            res.violations.append(("assoc", a, b, c))
        if vnat.compose(a, ident) != a or vnat.compose(ident, a) != a:
            res.violations.append(("unit", a))
        t = vnat.random_threshold(rng)
        if delta(t, ab) != delta(delta(t, a), b):
            res.violations.append(("Δ", t, a, b))
        x = vnat.At(rng.randint(0, 4), t) if rng.random() < 0.9 else vnat.VBOT
        y = vnat.At(rng.randint(0, 4), c) if rng.random() < 0.9 else vnat.VBOT
        for elem, act in ((x, delta), (y, wact)):
            if vnat.lift_action(elem, ident, act) != elem:
                res.violations.append(("lift identity", elem))
            lhs = vnat.lift_action(vnat.lift_action(elem, b, act), a, act)
            if lhs != vnat.lift_action(elem, vnat.compose(b, a), act):
                res.violations.append(("lift functoriality", elem, a, b))
        # the succ, ∞ and i identities on ω̄ representations
        w = vnat.random_endo(rng)
        if vnat.succ(vnat.infinity()) != vnat.infinity():
            res.violations.append(("succ ∞",))
        if vnat.is_omega(w):
            if vnat.i_embed(vnat.succ(w)) != vnat.succ(vnat.i_embed(w)):
                res.violations.append(("i equivariance", w))
            if vnat.i_embed(w) == vnat.infinity():
                res.violations.append(("∞ in the image of i", w))
        elif vnat.succ(w).bounded():
            res.violations.append(("ω̄ ∖ ω not closed under succ", w))


# ---------------------------------------------------------------------------
# 11: the equivalence engine


@_timed(11, "equivalence engine on curated pairs", 120)
def criterion_11(res: SuiteResult, fuel: int = 10_000, budget: int = 6):
    for a, b, ty_src in corpus.EQUIVALENT:
        ty = parse_type(ty_src)
        for n in (0, 1, 2):
            v = equiv(parse_comp(a), parse_comp(b), ty, n, fuel, budget)
            res.checked += 1
            if not isinstance(v, NoDifferenceFound):
                res.violations.append((a, b, n, str(v)))
    for a, b, ty_src in corpus.INEQUIVALENT:
        ty = parse_type(ty_src)
        t1, t2 = parse_comp(a), parse_comp(b)
        v = equiv(t1, t2, ty, 2, fuel, budget)
        res.checked += 1
        if not isinstance(v, ConfirmedDifferent):
            res.violations.append((a, b, str(v)))
            continue
        o1 = evaluate(plug(v.witness, t1), fuel * 10)
        o2 = evaluate(plug(v.witness, t2), fuel * 10)
        if not (isinstance(o1, Converged) and isinstance(o2, Converged) and o1.value != o2.value):
            res.violations.append((a, b, "witness does not separate", str(o1), str(o2)))


# ---------------------------------------------------------------------------
# 12: the pipeline from tabulated terms to a site


@_timed(12, "site from tabulated terms over [nat, nat->nat]", 120)
def criterion_12(res: SuiteResult, n: int = 1, budget: int = 6, fuel: int = 10_000):
    ft = parse_type("nat -> nat")
    cf = site_from_basis(n, fuel, budget, [NAT, ft])
    site = build_site(cf)
    rep, bad = _site_checks(site)
    res.checked += sum(rep.checked.values()) + 2
    res.violations.extend(bad)
    fnat = cf.objects["nat"]
    if fnat != full_ssp(fnat.carrier):
        res.violations.append(("F(nat) is not the full system", str(fnat)))
    res.notes.append(f"{len(site.objects)} objects, {site.n_morphisms()} morphisms, "
                     f"{len(site.covers)} covers")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]


def run_all(seed: int = 0, only=None, echo: Optional[Callable[[str], None]] = None) -> list:
    out = []
    for k, fn in enumerate(CRITERIA, 1):
        if only and k not in only:
            continue
        kwargs = {"seed": seed} if _takes_seed(fn) else {}
        r = fn(**kwargs)
        out.append(r)
        if echo:
            echo(r.line())
    return out


_SEEDED = {6, 7, 8, 9, 10}


def _takes_seed(fn) -> bool:
    return int(fn.__name__.rsplit("_", 1)[1]) in _SEEDED
