"""Bounded, type-directed enumeration of terms.

Terms are produced in order of ``syntax.size``.  Variables are named by
their position in the context (``v0``, ``v1``, ...), which keeps the output
deterministic and lets results be memoised per (context, type, size).

The grammar is deliberately narrow: eliminators only scrutinise variables,
``let`` only binds applications and projections, and numerals stop at the
ambient level.  ``diverge`` counts as a single node.
"""
from __future__ import annotations

from functools import lru_cache

from .syntax import (
    NAT, Absurd, App, CaseNat, CaseSum, Inl, Inr, Lam, Let, Pair, Proj1, Proj2, Ret,
    Star, Suc, TArrow, TNat, TOne, TProd, TSum, TZero, Var, numeral,
)

__all__ = ["var_name", "values_of_size", "comps_of_size", "values_upto", "comps_upto", "diverge"]


def var_name(i: int) -> str:
    return f"v{i}"


@lru_cache(maxsize=None)
def diverge(ty):
    """Omega at ``ty``: ``(rec f (x:1):ty => f x) star``."""
    from .syntax import ONE_T, Rec
    return App(Rec("f", "x", ONE_T, ty, App(Var("f"), Var("x"))), Star())


def _vars_of(ctx, ty):
    return [Var(var_name(i)) for i, t in enumerate(ctx) if t == ty]


@lru_cache(maxsize=None)
def values_of_size(ctx: tuple, ty, size: int, n: int) -> tuple:
    if size < 1:
        return ()
    out = []
    if size == 1:
        out.extend(_vars_of(ctx, ty))
        if isinstance(ty, TOne):
            out.append(Star())
        elif isinstance(ty, TNat):
            out.extend(numeral(k) for k in range(n + 1))
    if isinstance(ty, TNat) and size == 2:
        out.extend(Suc(v) for v in _vars_of(ctx, NAT))
    elif isinstance(ty, TSum):
        out.extend(Inl(v) for v in values_of_size(ctx, ty.left, size - 1, n))
        out.extend(Inr(v) for v in values_of_size(ctx, ty.right, size - 1, n))
    elif isinstance(ty, TProd):
        for a in range(1, size - 1):
            left = values_of_size(ctx, ty.left, a, n)
            if not left:
                continue
            right = values_of_size(ctx, ty.right, size - 1 - a, n)
            out.extend(Pair(x, y) for x in left for y in right)
    elif isinstance(ty, TArrow):
        inner = ctx + (ty.dom,)
        x = var_name(len(ctx))
        out.extend(Lam(x, ty.dom, c) for c in comps_of_size(inner, ty.cod, size - 1, n))
    return tuple(out)


@lru_cache(maxsize=None)
def comps_of_size(ctx: tuple, ty, size: int, n: int) -> tuple:
    if size < 1:
        return ()
    out = []
    if size == 1:
        out.append(diverge(ty))
    out.extend(Ret(v) for v in values_of_size(ctx, ty, size - 1, n))
    fresh = var_name(len(ctx))
    for i, t in enumerate(ctx):
        f = Var(var_name(i))
        if isinstance(t, TArrow):
            # f a, then let y = f a in c
            for asz in range(1, size - 1):
                args = values_of_size(ctx, t.dom, asz, n)
                if not args:
                    continue
                if t.cod == ty and asz == size - 2:
                    out.extend(App(f, a) for a in args)
                rest = size - 3 - asz
                if rest >= 1:
                    bodies = comps_of_size(ctx + (t.cod,), ty, rest, n)
                    out.extend(Let(fresh, App(f, a), b) for a in args for b in bodies)
        elif isinstance(t, TProd):
            if size == 2:
                if t.left == ty:
                    out.append(Proj1(f))
                if t.right == ty:
                    out.append(Proj2(f))
            if size > 3:
                for proj, comp_ty in ((Proj1, t.left), (Proj2, t.right)):
                    bodies = comps_of_size(ctx + (comp_ty,), ty, size - 3, n)
                    out.extend(Let(fresh, proj(f), b) for b in bodies)
        elif isinstance(t, TNat):
            for a in range(1, size - 2):
                zs = comps_of_size(ctx, ty, a, n)
                if not zs:
                    continue
                ss = comps_of_size(ctx + (NAT,), ty, size - 2 - a, n)
                out.extend(CaseNat(f, z, fresh, s) for z in zs for s in ss)
        elif isinstance(t, TSum):
            for a in range(1, size - 2):
                ls = comps_of_size(ctx + (t.left,), ty, a, n)
                if not ls:
                    continue
                rs = comps_of_size(ctx + (t.right,), ty, size - 2 - a, n)
                out.extend(CaseSum(f, fresh, l, fresh, r) for l in ls for r in rs)
        elif isinstance(t, TZero):
            if size == 2:
                out.append(Absurd(f))
    return tuple(out)


def values_upto(ctx: tuple, ty, budget: int, n: int, limit: int = None):
    """Values of size 1..budget in size order, at most ``limit`` of them."""
    count = 0
    for s in range(1, budget + 1):
        for v in values_of_size(tuple(ctx), ty, s, n):
            yield v
            count += 1
            if limit is not None and count >= limit:
                return


def comps_upto(ctx: tuple, ty, budget: int, n: int, limit: int = None):
    count = 0
    for s in range(1, budget + 1):
        for c in comps_of_size(tuple(ctx), ty, s, n):
            yield c
            count += 1
            if limit is not None and count >= limit:
                return
