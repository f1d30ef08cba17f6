"""Finite partial types: truncation terms, points, bases, tables, equivalence.

A point of the level-``n`` partial type of ``σ`` is built from ``UnitP``,
``NatP(k)`` with ``k <= n``, injections, pairs and ``FunP``.  A ``FunP`` is a
table over the representatives of a ``Basis`` for the domain, each entry an
``Out``: converged to a point, certified ``bottom`` (only in analytically
built points) or ``exhausted`` (fuel ran out while tabulating).

Everything observable is computed by running the evaluator on ψ-wrapped
terms; no infinite object is ever materialised.
"""
from __future__ import annotations

import itertools
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

from .opsem import Converged, Exhausted, evaluate, plug, subst
from .syntax import (
    NAT, ONE_T, Absurd, App, CaseNat, CaseSum, Context, Hole, Inl, Inr, Lam, Let, Pair,
    Proj1, Proj2, Ret, Star, TArrow, TNat, TOne, TProd, TSum, TZero, Var, as_numeral,
    numeral, parse_type, pretty, pretty_type, type_order,
)
from .termgen import diverge, values_upto
from .typecheck import check_comp

__all__ = [
    "UnitP", "NatP", "InlP", "InrP", "PairP", "FunP", "Out", "CONVERGED", "BOTTOM", "EXHAUSTED",
    "Basis", "BasisCache", "Table", "ConfirmedDifferent", "CandidateDifferent", "NoDifferenceFound",
    "OrderTooHigh", "BasisTooLarge",
    "diverge", "psi", "enumerate_points", "count_points", "sample_points", "realize", "basis",
    "observe", "tabulate", "equiv", "approx_chain_check", "embed", "point_leq", "erase",
    "same_point", "point_to_json", "point_str", "table_to_json",
]

DEFAULT_FUEL = 10_000
DEFAULT_BUDGET = 8

# ---------------------------------------------------------------------------
# points


class _Pt:
    __slots__ = ()

    def __str__(self):
        return point_str(self)


@dataclass(frozen=True, slots=True)
class UnitP(_Pt):
    pass


@dataclass(frozen=True, slots=True)
class NatP(_Pt):
    k: int


@dataclass(frozen=True, slots=True)
class InlP(_Pt):
    point: object


@dataclass(frozen=True, slots=True)
class InrP(_Pt):
    point: object


@dataclass(frozen=True, slots=True)
class PairP(_Pt):
    first: object
    second: object


@dataclass(frozen=True, slots=True)
class FunP(_Pt):
    basis_id: str
    outs: tuple


CONVERGED = "converged"
BOTTOM = "bottom"
EXHAUSTED = "exhausted"


@dataclass(frozen=True, slots=True)
class Out:
    tag: str
    point: object = None

    @property
    def defined(self) -> bool:
        return self.tag == CONVERGED


BOT = Out(BOTTOM)
EXH = Out(EXHAUSTED)


def conv(p) -> Out:
    return Out(CONVERGED, p)


class OrderTooHigh(ValueError):
    pass


class BasisTooLarge(ValueError):
    pass


# registry used only for rendering FunP tables with their argument points
_BASES: dict = {}


def erase(p):
    """Identify ``exhausted`` with ``bottom`` throughout a point or an Out."""
    if isinstance(p, Out):
        if p.tag == CONVERGED:
            return Out(CONVERGED, erase(p.point))
        return BOT
    if isinstance(p, FunP):
        return FunP(p.basis_id, tuple(erase(o) for o in p.outs))
    if isinstance(p, InlP):
        return InlP(erase(p.point))
    if isinstance(p, InrP):
        return InrP(erase(p.point))
    if isinstance(p, PairP):
        return PairP(erase(p.first), erase(p.second))
    return p


def same_point(p, q) -> bool:
    """Equality with exhausted and bottom observed as the same thing."""
    return erase(p) == erase(q)


def point_leq(p, q) -> bool:
    """Flat information order, extended entrywise through tables."""
    if isinstance(p, Out) or isinstance(q, Out):
        if not isinstance(p, Out):
            p = conv(p)
        if not isinstance(q, Out):
            q = conv(q)
        if p.tag != CONVERGED:
            return True
        return q.tag == CONVERGED and point_leq(p.point, q.point)
    if isinstance(p, FunP) and isinstance(q, FunP):
        return (p.basis_id == q.basis_id and len(p.outs) == len(q.outs)
                and all(point_leq(a, b) for a, b in zip(p.outs, q.outs)))
    if isinstance(p, PairP) and isinstance(q, PairP):
        return point_leq(p.first, q.first) and point_leq(p.second, q.second)
    if isinstance(p, InlP) and isinstance(q, InlP):
        return point_leq(p.point, q.point)
    if isinstance(p, InrP) and isinstance(q, InrP):
        return point_leq(p.point, q.point)
    return p == q


def point_str(p) -> str:
    if isinstance(p, Out):
        if p.tag == CONVERGED:
            return point_str(p.point)
        return "⊥" if p.tag == BOTTOM else "exhausted"
    if isinstance(p, UnitP):
        return "*"
    if isinstance(p, NatP):
        return str(p.k)
    if isinstance(p, InlP):
        return f"inl {point_str(p.point)}"
    if isinstance(p, InrP):
        return f"inr {point_str(p.point)}"
    if isinstance(p, PairP):
        return f"({point_str(p.first)}, {point_str(p.second)})"
    if isinstance(p, FunP):
        b = _BASES.get(p.basis_id)
        keys = [point_str(k) for k, _ in b.entries] if b else _domain_keys(p.basis_id)
        if len(keys) != len(p.outs):  # foreign id
            keys = [f"#{i}" for i in range(len(p.outs))]
        return "{" + ", ".join(f"{k}↦{point_str(o)}" for k, o in zip(keys, p.outs)) + "}"
    raise TypeError(p)


def point_to_json(p):
    if isinstance(p, Out):
        if p.tag == CONVERGED:
            return {"tag": p.tag, "point": point_to_json(p.point)}
        return {"tag": p.tag}
    if isinstance(p, UnitP):
        return "*"
    if isinstance(p, NatP):
        return p.k
    if isinstance(p, InlP):
        return {"inl": point_to_json(p.point)}
    if isinstance(p, InrP):
        return {"inr": point_to_json(p.point)}
    if isinstance(p, PairP):
        return [point_to_json(p.first), point_to_json(p.second)]
    if isinstance(p, FunP):
        return {"fn": p.basis_id, "table": [point_to_json(o) for o in p.outs]}
    raise TypeError(p)


# ---------------------------------------------------------------------------
# truncation terms


class _Names:
    def __init__(self, avoid):
        self.avoid = set(avoid)
        self.i = 0

    def __call__(self, stem: str) -> str:
        while True:
            self.i += 1
            name = f"{stem}{self.i}"
            if name not in self.avoid:
                return name


@lru_cache(maxsize=None)
def psi(ty, n: int, var: str = "x"):
    """The truncation computation ψ at ``ty`` and level ``n``, free in ``var``."""
    if n < 0:
        raise ValueError("level must be non-negative")
    return _psi(ty, n, var, _Names({var}))


def _psi(ty, n, x, fresh):
    if isinstance(ty, (TZero, TOne)):
        return Ret(Var(x))
    if isinstance(ty, TNat):
        # n+1 peels; beyond n it diverges
        names = [x] + [fresh("p") for _ in range(n + 1)]
        c = diverge(NAT)
        for k in range(n, -1, -1):
            c = CaseNat(Var(names[k]), Ret(numeral(k)), names[k + 1], c)
        return c
    if isinstance(ty, TArrow):
        u, v, w = fresh("u"), fresh("v"), fresh("w")
        pre = _psi(ty.dom, n, u, fresh)
        post = _psi(ty.cod, n, w, fresh)
        return Ret(Lam(u, ty.dom, Let(v, pre, Let(w, App(Var(x), Var(v)), post))))
    if isinstance(ty, TSum):
        # branches re-inject so the case has type σ+τ
        y, z, y2, z2 = fresh("l"), fresh("r"), fresh("l"), fresh("r")
        return CaseSum(Var(x), y, Let(y2, _psi(ty.left, n, y, fresh), Ret(Inl(Var(y2)))),
                       z, Let(z2, _psi(ty.right, n, z, fresh), Ret(Inr(Var(z2)))))
    if isinstance(ty, TProd):
        y, z, y2, z2 = fresh("a"), fresh("b"), fresh("c"), fresh("d")
        return Let(y, Proj1(Var(x)), Let(z, Proj2(Var(x)),
               Let(y2, _psi(ty.left, n, y, fresh), Let(z2, _psi(ty.right, n, z, fresh),
               Ret(Pair(Var(y2), Var(z2)))))))
    raise TypeError(ty)


# ---------------------------------------------------------------------------
# enumeration of points (exact regime)


def count_points(ty, n: int) -> int:
    if isinstance(ty, TZero):
        return 0
    if isinstance(ty, TOne):
        return 1
    if isinstance(ty, TNat):
        return n + 1
    if isinstance(ty, TSum):
        return count_points(ty.left, n) + count_points(ty.right, n)
    if isinstance(ty, TProd):
        return count_points(ty.left, n) * count_points(ty.right, n)
    if type_order(ty) > 1:
        raise OrderTooHigh(f"{pretty_type(ty)} has order {type_order(ty)}; use basis()")
    return (1 + count_points(ty.cod, n)) ** count_points(ty.dom, n)


@lru_cache(maxsize=None)
def _domain_keys(bid: str) -> tuple:
    # an id without a suffix names the exact basis, whose order is canonical,
    # so the rendering does not depend on which bases happen to be registered
    ty_src, sep, rest = bid.rpartition("@")
    if not sep or not rest.isdigit():
        return ()
    try:
        return tuple(point_str(q) for q in enumerate_points(parse_type(ty_src), int(rest)))
    except ValueError:
        return ()


def _basis_id(ty, n, budget=None, fuel=None) -> str:
    if budget is None:
        return f"{pretty_type(ty)}@{n}"
    return f"{pretty_type(ty)}@{n}/b{budget}/f{fuel}"


def enumerate_points(ty, n: int, limit: int = 1_000_000) -> list:
    """All points of the level-``n`` partial type of ``ty`` in canonical order (order <= 1)."""
    if type_order(ty) > 1:
        raise OrderTooHigh(f"{pretty_type(ty)} has order {type_order(ty)}; use basis()")
    total = count_points(ty, n)
    if total > limit:
        raise BasisTooLarge(f"{pretty_type(ty)} at level {n} has {total} points (limit {limit})")
    return list(_enum(ty, n))


def _enum(ty, n):
    if isinstance(ty, TZero):
        return
    if isinstance(ty, TOne):
        yield UnitP()
    elif isinstance(ty, TNat):
        for k in range(n + 1):
            yield NatP(k)
    elif isinstance(ty, TSum):
        for p in _enum(ty.left, n):
            yield InlP(p)
        for p in _enum(ty.right, n):
            yield InrP(p)
    elif isinstance(ty, TProd):
        rights = list(_enum(ty.right, n))
        for a in _enum(ty.left, n):
            for b in rights:
                yield PairP(a, b)
    elif isinstance(ty, TArrow):
        dom = list(_enum(ty.dom, n))
        choices = [BOT] + [conv(q) for q in _enum(ty.cod, n)]
        bid = _basis_id(ty.dom, n)
        for outs in itertools.product(choices, repeat=len(dom)):
            yield FunP(bid, outs)


def sample_points(ty, n: int, k: int, seed: int = 0) -> list:
    """``k`` distinct pseudo-random points (all of them if there are at most ``k``)."""
    total = count_points(ty, n)
    if total <= k:
        return enumerate_points(ty, n)
    rng = random.Random(f"{pretty_type(ty)}|{n}|{k}|{seed}")
    seen, out = set(), []
    while len(out) < k:
        p = _random_point(ty, n, rng)
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def _random_point(ty, n, rng):
    if isinstance(ty, TOne):
        return UnitP()
    if isinstance(ty, TNat):
        return NatP(rng.randint(0, n))
    if isinstance(ty, TSum):
        nl, nr = count_points(ty.left, n), count_points(ty.right, n)
        if rng.randrange(nl + nr) < nl:
            return InlP(_random_point(ty.left, n, rng))
        return InrP(_random_point(ty.right, n, rng))
    if isinstance(ty, TProd):
        return PairP(_random_point(ty.left, n, rng), _random_point(ty.right, n, rng))
    if isinstance(ty, TArrow):
        m = count_points(ty.dom, n)
        c = count_points(ty.cod, n)
        outs = []
        for _ in range(m):
            if rng.randrange(c + 1) == 0:
                outs.append(BOT)
            else:
                outs.append(conv(_random_point(ty.cod, n, rng)))
        return FunP(_basis_id(ty.dom, n), tuple(outs))
    raise ValueError(f"no points of {pretty_type(ty)}")


# ---------------------------------------------------------------------------
# realizers


def realize(p, ty, n: int):
    """A closed value whose tabulation at level ``n`` is ``p`` (order <= 1)."""
    if type_order(ty) > 1:
        raise OrderTooHigh(f"{pretty_type(ty)} has order {type_order(ty)}; no realizer")
    return _realize(p, ty, n)


def _realize(p, ty, n):
    if isinstance(ty, TOne):
        return Star()
    if isinstance(ty, TNat):
        return numeral(p.k)
    if isinstance(ty, TSum):
        if isinstance(p, InlP):
            return Inl(_realize(p.point, ty.left, n))
        return Inr(_realize(p.point, ty.right, n))
    if isinstance(ty, TProd):
        return Pair(_realize(p.first, ty.left, n), _realize(p.second, ty.right, n))
    if isinstance(ty, TArrow):
        dom = enumerate_points(ty.dom, n)
        omega = diverge(ty.cod)
        table = dict(zip(dom, p.outs))

        def leaf(q):
            o = table[q]
            if o.tag == CONVERGED:
                return Ret(_realize(o.point, ty.cod, n))
            return omega

        fresh = _Names({"x"})
        return Lam("x", ty.dom, _dispatch("x", ty.dom, n, leaf, omega, fresh))
    raise ValueError(f"no points of {pretty_type(ty)}")


def _dispatch(x, ty, n, leaf, omega, fresh):
    """Decision tree on variable ``x : ty`` calling ``leaf(point)`` at each point."""
    if isinstance(ty, TZero):
        return Absurd(Var(x))
    if isinstance(ty, TOne):
        return leaf(UnitP())
    if isinstance(ty, TNat):
        c = omega
        names = [x] + [fresh("y") for _ in range(n + 1)]
        for k in range(n, -1, -1):
            z = leaf(NatP(k))
            if z == omega and c == omega:
                continue
            c = CaseNat(Var(names[k]), z, names[k + 1], c)
        return c
    if isinstance(ty, TSum):
        a, b = fresh("y"), fresh("y")
        left = _dispatch(a, ty.left, n, lambda q: leaf(InlP(q)), omega, fresh)
        right = _dispatch(b, ty.right, n, lambda q: leaf(InrP(q)), omega, fresh)
        if left == omega and right == omega:
            return omega
        return CaseSum(Var(x), a, left, b, right)
    if isinstance(ty, TProd):
        a, b = fresh("y"), fresh("y")
        inner = _dispatch(a, ty.left, n, lambda qa: _dispatch(
            b, ty.right, n, lambda qb: leaf(PairP(qa, qb)), omega, fresh), omega, fresh)
        if inner == omega:
            return omega
        return Let(a, Proj1(Var(x)), Let(b, Proj2(Var(x)), inner))
    raise OrderTooHigh("dispatch on a function type")


# ---------------------------------------------------------------------------
# bases


@dataclass
class Basis:
    ty: object
    level: int
    budget: Optional[int]
    entries: list  # [(Point, Value)]
    exact: bool
    id: str
    candidates: int = 0  # enumerated terms before deduplication

    def points(self) -> list:
        return [p for p, _ in self.entries]

    def reps(self) -> list:
        return [v for _, v in self.entries]

    def __len__(self):
        return len(self.entries)

    def index(self, p) -> int:
        key = erase(p)
        for i, (q, _) in enumerate(self.entries):
            if erase(q) == key:
                return i
        raise KeyError(point_str(p))


class BasisCache:
    """Builds and memoises bases for one (level, budget, fuel) setting."""

    def __init__(self, n: int, budget: int = DEFAULT_BUDGET, fuel: int = DEFAULT_FUEL,
                 exact_limit: int = 1_000_000, max_terms: int = 20_000,
                 sample: Optional[int] = None):
        self.n = n
        self.sample = sample
        self.budget = budget
        self.fuel = fuel
        self.exact_limit = exact_limit
        self.max_terms = max_terms
        self._bases: dict = {}
        self._obs: dict = {}

    def get(self, ty) -> Basis:
        b = self._bases.get(ty)
        if b is None:
            b = self._build(ty)
            self._bases[ty] = b
            _BASES[b.id] = b
        return b

    def _build(self, ty) -> Basis:
        n = self.n
        if type_order(ty) <= 1:
            if self.sample and isinstance(ty, TArrow) and count_points(ty, n) > self.exact_limit:
                # too many points to list: a fixed pseudo-random selection
                pts = sample_points(ty, n, self.sample)
                entries = [(p, _realize(p, ty, n)) for p in pts]
                return Basis(ty, n, None, entries, False, f"{pretty_type(ty)}@{n}/s{self.sample}",
                             len(entries))
            pts = enumerate_points(ty, n, self.exact_limit)
            entries = [(p, _realize(p, ty, n)) for p in pts]
            return Basis(ty, n, None, entries, True, _basis_id(ty, n), len(entries))
        entries, seen = [], set()
        count = 0
        wrap = psi(ty, n, "x")
        for v in values_upto((), ty, self.budget, n, self.max_terms):
            count += 1
            res = evaluate(subst(wrap, {"x": v}), self.fuel)
            if not isinstance(res, Converged):
                continue
            p = self.observe(res.value, ty)
            key = erase(p)
            if key in seen:
                continue
            seen.add(key)
            entries.append((p, res.value))
        return Basis(ty, n, self.budget, entries, False,
                     _basis_id(ty, n, self.budget, self.fuel), count)

    def observe(self, v, ty):
        """The point of an already-truncated closed value ``v : ty``."""
        if isinstance(ty, TOne):
            return UnitP()
        if isinstance(ty, TNat):
            k = as_numeral(v)
            if k is None:
                raise TypeError(f"not a numeral: {pretty(v)}")
            return NatP(k)
        if isinstance(ty, TSum):
            if isinstance(v, Inl):
                return InlP(self.observe(v.value, ty.left))
            return InrP(self.observe(v.value, ty.right))
        if isinstance(ty, TProd):
            return PairP(self.observe(v.first, ty.left), self.observe(v.second, ty.right))
        if isinstance(ty, TArrow):
            key = (v, ty)
            hit = self._obs.get(key)
            if hit is not None:
                return hit
            dom = self.get(ty.dom)
            outs = []
            for r in dom.reps():
                res = evaluate(App(v, r), self.fuel)
                if isinstance(res, Converged):
                    outs.append(conv(self.observe(res.value, ty.cod)))
                else:
                    outs.append(EXH)
            p = FunP(dom.id, tuple(outs))
            if len(self._obs) < 200_000:
                self._obs[key] = p
            return p
        raise TypeError(f"no values of {pretty_type(ty)}")

    def run(self, c, ty) -> Out:
        """Evaluate closed ``c`` followed by ψ and observe the result."""
        res = evaluate(Let("y", c, psi(ty, self.n, "y")), self.fuel)
        if isinstance(res, Converged):
            return conv(self.observe(res.value, ty))
        return EXH


def basis(ty, n: int, budget: int = DEFAULT_BUDGET, fuel: int = DEFAULT_FUEL,
          cache: Optional[BasisCache] = None) -> Basis:
    cache = cache or BasisCache(n, budget, fuel)
    return cache.get(ty)


# ---------------------------------------------------------------------------
# tables


@dataclass
class Table:
    level: int
    ctx: tuple  # ((name, type), ...)
    ty: object
    basis_ids: tuple
    entries: list  # [(tuple of input points, Out)]

    def outs(self) -> list:
        return [o for _, o in self.entries]

    def to_json(self) -> dict:
        return table_to_json(self)

    def __str__(self):
        lines = []
        for ins, o in self.entries:
            left = ", ".join(point_str(p) for p in ins) if ins else "·"
            lines.append(f"{left} ↦ {point_str(o)}")
        return "\n".join(lines)


def table_to_json(t: Table) -> dict:
    return {
        "type": pretty_type(t.ty),
        "level": t.level,
        "context": [[x, pretty_type(ty)] for x, ty in t.ctx],
        "basis": list(t.basis_ids),
        "entries": [{"in": [point_to_json(p) for p in ins], "out": point_to_json(o)}
                    for ins, o in t.entries],
    }


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("PCFV_THREADS", "1")))
    except ValueError:
        return 1


def _normalise_ctx(ctx) -> tuple:
    if ctx is None:
        return ()
    if isinstance(ctx, dict):
        return tuple(ctx.items())
    return tuple((x, t) for x, t in ctx)


def tabulate(t, ty, n: int, fuel: int = DEFAULT_FUEL, budget: int = DEFAULT_BUDGET,
             ctx=(), cache: Optional[BasisCache] = None, typecheck: bool = True) -> Table:
    """Table of ``ctx ⊢ t : ty`` at level ``n``: one entry per tuple of basis points."""
    ctx = _normalise_ctx(ctx)
    if typecheck:
        check_comp(ctx, t, ty)
    cache = cache or BasisCache(n, budget, fuel)
    bases = [cache.get(a) for _, a in ctx]
    inputs = list(itertools.product(*[b.entries for b in bases]))

    def one(combo):
        env = {x: v for (x, _), (_, v) in zip(ctx, combo)}
        return cache.run(subst(t, env), ty)

    threads = _threads()
    if threads > 1 and len(inputs) > 1:
        with ThreadPoolExecutor(threads) as ex:
            outs = list(ex.map(one, inputs))
    else:
        outs = [one(c) for c in inputs]
    entries = [(tuple(p for p, _ in combo), o) for combo, o in zip(inputs, outs)]
    return Table(n, ctx, ty, tuple(b.id for b in bases), entries)


def observe(v, ty, n: int, fuel: int = DEFAULT_FUEL, budget: int = DEFAULT_BUDGET,
            cache: Optional[BasisCache] = None):
    """Point of closed value ``v`` after truncation at level ``n``."""
    cache = cache or BasisCache(n, budget, fuel)
    o = cache.run(Ret(v), ty)
    return o.point if o.defined else o


# ---------------------------------------------------------------------------
# equivalence


@dataclass
class ConfirmedDifferent:
    witness: Context
    observation_left: object
    observation_right: object
    path: tuple = ()

    exit_code = 4

    def __str__(self):
        return (f"confirmed-different: {pretty(self.observation_left)} vs "
                f"{pretty(self.observation_right)}\nwitness: {pretty(self.witness.body)}")


@dataclass
class CandidateDifferent:
    entry_path: tuple

    exit_code = 5

    def __str__(self):
        return "candidate-different at " + " / ".join(self.entry_path)


@dataclass
class NoDifferenceFound:
    n: int
    fuel: int
    budget: int

    exit_code = 0

    def __str__(self):
        return f"no-difference-found level={self.n} fuel={self.fuel} budget={self.budget}"


def _diff(o1: Out, o2: Out, ty, cache, path):
    """First difference below a pair of outcomes.

    Returns ("confirmed", path) for a ground clash between two convergent
    results, ("candidate", path) when only definedness differs, or None.
    """
    if o1.tag != CONVERGED or o2.tag != CONVERGED:
        if (o1.tag == CONVERGED) != (o2.tag == CONVERGED):
            return ("candidate", path)
        return None
    return _diff_points(o1.point, o2.point, ty, cache, path)


def _diff_points(p, q, ty, cache, path):
    if p == q:
        return None
    if isinstance(ty, TNat):
        return ("confirmed", path + (("leaf",),))
    if isinstance(ty, TSum):
        if type(p) is not type(q):
            return ("confirmed", path + (("tag",),))
        side = "inl" if isinstance(p, InlP) else "inr"
        sub = ty.left if side == "inl" else ty.right
        return _diff_points(p.point, q.point, sub, cache, path + ((side,),))
    if isinstance(ty, TProd):
        found = _diff_points(p.first, q.first, ty.left, cache, path + (("fst",),))
        if found and found[0] == "confirmed":
            return found
        other = _diff_points(p.second, q.second, ty.right, cache, path + (("snd",),))
        return other if other and (other[0] == "confirmed" or not found) else found
    if isinstance(ty, TArrow):
        dom = cache.get(ty.dom)
        candidate = None
        for i, (a, b) in enumerate(zip(p.outs, q.outs)):
            found = _diff(a, b, ty.cod, cache, path + (("app", i),))
            if found and found[0] == "confirmed":
                return found
            candidate = candidate or found
        return candidate
    return None


def _describe(path, ctx_pts, cache, ty) -> tuple:
    parts = []
    if ctx_pts:
        parts.append("input " + ", ".join(point_str(p) for p in ctx_pts))
    cur = ty
    for step in path:
        if step[0] == "app":
            dom = cache.get(cur.dom)
            parts.append(f"applied to {point_str(dom.entries[step[1]][0])}")
            cur = cur.cod
        elif step[0] in ("fst", "snd"):
            parts.append(step[0])
            cur = cur.left if step[0] == "fst" else cur.right
        elif step[0] in ("inl", "inr"):
            parts.append(step[0])
            cur = cur.left if step[0] == "inl" else cur.right
    return tuple(parts) or ("result",)


def _witness(ctx, reps, ty, n, path, cache) -> Context:
    """``let x = return v in ... let y0 = [] in let y = ψ[y0] in OBS``."""
    names = {x for x, _ in ctx}
    fresh = _Names(names | {"y"})
    cur_var = fresh("o")
    cur_ty = ty

    def build(i, var, vty):
        if i == len(path):
            raise AssertionError("path must end at a leaf")
        step = path[i]
        kind = step[0]
        if kind == "leaf":
            return Ret(Var(var)), NAT
        if kind == "tag":
            a, b = fresh("t"), fresh("t")
            return CaseSum(Var(var), a, Ret(numeral(0)), b, Ret(numeral(1))), NAT
        if kind == "app":
            r = cache.get(vty.dom).entries[step[1]][1]
            z = fresh("o")
            body, oty = build(i + 1, z, vty.cod)
            return Let(z, App(Var(var), r), body), oty
        if kind in ("fst", "snd"):
            z = fresh("o")
            sub = vty.left if kind == "fst" else vty.right
            body, oty = build(i + 1, z, sub)
            proj = Proj1 if kind == "fst" else Proj2
            return Let(z, proj(Var(var)), body), oty
        if kind in ("inl", "inr"):
            z, d = fresh("o"), fresh("o")
            sub = vty.left if kind == "inl" else vty.right
            body, oty = build(i + 1, z, sub)
            other = diverge(oty)
            if kind == "inl":
                return CaseSum(Var(var), z, body, d, other), oty
            return CaseSum(Var(var), d, other, z, body), oty
        raise ValueError(step)

    obs, _ = build(0, cur_var, cur_ty)
    y0 = fresh("h")
    body = Let(y0, Hole(), Let(cur_var, psi(ty, n, y0), obs))
    for (x, _), v in reversed(list(zip(ctx, reps))):
        body = Let(x, Ret(v), body)
    return Context(body, ty, tuple(ctx))


def equiv(t1, t2, ty, n: int, fuel: int = DEFAULT_FUEL, budget: int = DEFAULT_BUDGET,
          ctx=(), cache: Optional[BasisCache] = None):
    """Compare two computations ``ctx ⊢ t : ty`` through their level-``n`` tables."""
    ctx = _normalise_ctx(ctx)
    cache = cache or BasisCache(n, budget, fuel)
    tab1 = tabulate(t1, ty, n, fuel, budget, ctx, cache)
    tab2 = tabulate(t2, ty, n, fuel, budget, ctx, cache)
    bases = [cache.get(a) for _, a in ctx]
    combos = list(itertools.product(*[b.entries for b in bases]))
    candidate = None
    for combo, (ins, o1), (_, o2) in zip(combos, tab1.entries, tab2.entries):
        found = _diff(o1, o2, ty, cache, ())
        if not found:
            continue
        kind, path = found
        if kind == "confirmed":
            reps = [v for _, v in combo]
            w = _witness(ctx, reps, ty, n, path, cache)
            verified = _verify(w, t1, t2, fuel, len(path))
            if verified:
                return ConfirmedDifferent(w, verified[0], verified[1], path)
            kind = "candidate"
        if candidate is None:
            candidate = CandidateDifferent(_describe(path, ins, cache, ty))
    return candidate or NoDifferenceFound(n, fuel, budget)


def _verify(w: Context, t1, t2, fuel: int, depth: int):
    budget = fuel * (depth + 3)
    r1 = evaluate(plug(w, t1), budget)
    r2 = evaluate(plug(w, t2), budget)
    if isinstance(r1, Converged) and isinstance(r2, Converged) and r1.value != r2.value:
        return r1.value, r2.value
    return None


# ---------------------------------------------------------------------------
# approximation chain


def embed(p, ty, n: int, m: int):
    """Image of a level-``n`` point in level ``m >= n``; new table rows are bottom."""
    if isinstance(p, Out):
        return Out(p.tag, embed(p.point, ty, n, m)) if p.tag == CONVERGED else p
    if isinstance(ty, TSum):
        if isinstance(p, InlP):
            return InlP(embed(p.point, ty.left, n, m))
        return InrP(embed(p.point, ty.right, n, m))
    if isinstance(ty, TProd):
        return PairP(embed(p.first, ty.left, n, m), embed(p.second, ty.right, n, m))
    if isinstance(ty, TArrow):
        small = {q: o for q, o in zip(enumerate_points(ty.dom, n), p.outs)}
        outs = []
        for q in enumerate_points(ty.dom, m):
            src = _restrict(q, ty.dom, n)
            if src is None or src not in small:
                outs.append(BOT)
            else:
                outs.append(embed(small[src], ty.cod, n, m))
        return FunP(_basis_id(ty.dom, m), tuple(outs))
    return p


def _restrict(q, ty, n):
    """The level-``n`` point equal to level-``m`` point ``q``, if any."""
    if isinstance(q, NatP):
        return q if q.k <= n else None
    if isinstance(q, UnitP):
        return q
    if isinstance(q, InlP):
        r = _restrict(q.point, ty.left, n)
        return None if r is None else InlP(r)
    if isinstance(q, InrP):
        r = _restrict(q.point, ty.right, n)
        return None if r is None else InrP(r)
    if isinstance(q, PairP):
        a, b = _restrict(q.first, ty.left, n), _restrict(q.second, ty.right, n)
        return None if a is None or b is None else PairP(a, b)
    # function-valued domains do not occur in the exact regime
    return None


@dataclass
class ChainReport:
    ty: object
    n: int
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def approx_chain_check(ty, n: int, fuel: int = DEFAULT_FUEL, extra: int = 3,
                       points: Optional[Sequence] = None) -> ChainReport:
    """ψ at levels m >= n fixes realized level-n points; lower levels only lose information."""
    report = ChainReport(ty, n)
    pts = enumerate_points(ty, n) if points is None else points
    caches = {}

    def cache(level):
        if level not in caches:
            caches[level] = BasisCache(level, fuel=fuel)
        return caches[level]

    for p in pts:
        r = realize(p, ty, n)
        for m in range(0, n + extra + 1):
            top = max(m, n)
            res = evaluate(subst(psi(ty, m, "x"), {"x": r}), fuel)
            got = conv(cache(top).observe(res.value, ty)) if isinstance(res, Converged) else EXH
            report.checked += 1
            if m >= n:
                want = conv(embed(p, ty, n, m))
                if not same_point(got, want):
                    report.violations.append((p, m, got, want))
            else:
                if not point_leq(erase(got), conv(p)):
                    report.violations.append((p, m, got, conv(p)))
    return report
