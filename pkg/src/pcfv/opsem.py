"""Substitution and the fueled big-step evaluator.

``evaluate`` follows the big-step rules literally: closed values are
substituted into bodies, nothing is kept in an environment.  One unit of
fuel is charged per rule application, so a converged run reports the size
of its derivation tree.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .syntax import (
    Absurd, App, CaseNat, CaseSum, Context, Hole, Inl, Inr, Lam, Let, Pair, Proj1,
    Proj2, Rec, Ret, Star, Suc, Var, Zero, free_vars, fresh_name, pretty,
)

__all__ = [
    "Converged", "Exhausted", "EvalOutcome", "EvalStuck", "subst", "evaluate", "plug",
]

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


@dataclass(frozen=True)
class Converged:
    value: object
    steps: int

    def __str__(self):
        return f"converged {pretty(self.value)} steps={self.steps}"


@dataclass(frozen=True)
class Exhausted:
    fuel: int

    def __str__(self):
        return f"exhausted fuel={self.fuel}"


EvalOutcome = Union[Converged, Exhausted]


class EvalStuck(RuntimeError):
    """No rule applies; only reachable on ill-typed input."""


# ---------------------------------------------------------------------------
# substitution


def subst(t, bindings: Mapping[str, object]):
    """Simultaneous capture-avoiding substitution ``t[bindings]``."""
    if not bindings:
        return t
    fv = free_vars(t)
    live = {x: v for x, v in bindings.items() if x in fv}
    if not live:
        return t
    return _subst(t, live)


def _binders(names, body_fv, live):
    """Enter binders ``names``: drop shadowed bindings, rename any binder that would capture."""
    inner = {x: v for x, v in live.items() if x not in names and x in body_fv}
    if not inner:
        return list(names), inner
    value_fv = set()
    for v in inner.values():
        value_fv |= free_vars(v)
    out = list(names)
    avoid = None
    for i, b in enumerate(names):
        if b in value_fv:
            if avoid is None:
                avoid = value_fv | body_fv | set(inner) | set(names)
            new = fresh_name(b, avoid)
            avoid.add(new)
            out[i] = new
            inner[b] = Var(new)
    return out, inner


def _subst(t, live):
    if not live:
        return t
    fv = free_vars(t)
    if not any(x in fv for x in live):
        return t
    cls = type(t)
    if cls is Var:
        return live.get(t.name, t)
    if cls in (Inl, Inr, Suc, Ret, Proj1, Proj2, Absurd):
        return cls(_subst(t.value, live))
    if cls is Pair:
        return Pair(_subst(t.first, live), _subst(t.second, live))
    if cls is App:
        return App(_subst(t.fn, live), _subst(t.arg, live))
    if cls is Lam:
        (x,), inner = _binders((t.var,), free_vars(t.body), live)
        return Lam(x, t.ty, _subst(t.body, inner))
    if cls is Rec:
        (f, x), inner = _binders((t.fname, t.var), free_vars(t.body), live)
        return Rec(f, x, t.arg_ty, t.res_ty, _subst(t.body, inner))
    if cls is Let:
        (x,), inner = _binders((t.var,), free_vars(t.body), live)
        return Let(x, _subst(t.bound, live), _subst(t.body, inner))
    if cls is CaseNat:
        (y,), inner = _binders((t.pred_var,), free_vars(t.suc_branch), live)
        return CaseNat(_subst(t.scrutinee, live), _subst(t.zero_branch, live), y,
                       _subst(t.suc_branch, inner))
    if cls is CaseSum:
        (x,), li = _binders((t.left_var,), free_vars(t.left), live)
        (y,), ri = _binders((t.right_var,), free_vars(t.right), live)
        return CaseSum(_subst(t.scrutinee, live), x, _subst(t.left, li), y, _subst(t.right, ri))
    if cls in (Star, Zero, Hole):
        return t
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# evaluation


def evaluate(t, fuel: int, trace: Optional[list] = None) -> EvalOutcome:
    """Run closed computation ``t`` for at most ``fuel`` rule applications.

    When ``trace`` is a list, every value produced and every scrutinised
    value is appended to it.
    """
    if fuel < 1:
        raise ValueError("fuel must be at least 1")
    frames = []  # pending let bodies: (var, body)
    steps = 0
    c = t
    while True:
        if steps >= fuel:
            return Exhausted(fuel)
        steps += 1
        cls = type(c)
        if cls is Let:
            frames.append((c.var, c.body))
            c = c.bound
            continue
        if cls is Ret:
            v = c.value
        elif cls is App:
            fn = c.fn
            if type(fn) is Lam:
                c = subst(fn.body, {fn.var: c.arg})
            elif type(fn) is Rec:
                nxt = subst(fn.body, {fn.fname: fn, fn.var: c.arg})
                if type(nxt) is App and nxt.fn is fn and nxt.arg is c.arg:
                    # the machine state reproduces itself: it cannot stop
                    # before any fuel bound, so the outcome is already known
                    return Exhausted(fuel)
                c = nxt
            else:
                raise EvalStuck(f"application of non-function: {pretty(c)}")
            continue
        elif cls is CaseNat:
            s = c.scrutinee
            if trace is not None:
                trace.append(s)
            if type(s) is Zero:
                c = c.zero_branch
            elif type(s) is Suc:
                c = subst(c.suc_branch, {c.pred_var: s.value})
            else:
                raise EvalStuck(f"case on non-numeral: {pretty(c)}")
            continue
        elif cls is CaseSum:
            s = c.scrutinee
            if type(s) is Inl:
                c = subst(c.left, {c.left_var: s.value})
            elif type(s) is Inr:
                c = subst(c.right, {c.right_var: s.value})
            else:
                raise EvalStuck(f"case on non-injection: {pretty(c)}")
            continue
        elif cls is Proj1 or cls is Proj2:
            s = c.value
            if type(s) is not Pair:
                raise EvalStuck(f"projection from non-pair: {pretty(c)}")
            v = s.first if cls is Proj1 else s.second
        else:
            raise EvalStuck(f"no rule applies to {pretty(c)}")
        # a value has been produced: resume the innermost let
        if trace is not None:
            trace.append(v)
        if not frames:
            return Converged(v, steps)
        x, body = frames.pop()
        c = subst(body, {x: v})
        # the let rule itself was charged when it was entered; the body
        # evaluation is charged as it runs


def plug(ctx: Context, t):
    """Replace the hole of ``ctx`` by ``t`` without renaming (contexts capture)."""
    body = ctx.body if isinstance(ctx, Context) else ctx
    return _plug(body, t)


def _plug(c, t):
    cls = type(c)
    if cls is Hole:
        return t
    if cls is Let:
        return Let(c.var, _plug(c.bound, t), _plug(c.body, t))
    if cls is CaseNat:
        return CaseNat(c.scrutinee, _plug(c.zero_branch, t), c.pred_var, _plug(c.suc_branch, t))
    if cls is CaseSum:
        return CaseSum(c.scrutinee, c.left_var, _plug(c.left, t), c.right_var, _plug(c.right, t))
    if cls is Lam:
        return Lam(c.var, c.ty, _plug(c.body, t))
    if cls is Rec:
        return Rec(c.fname, c.var, c.arg_ty, c.res_ty, _plug(c.body, t))
    if cls in (Ret, Inl, Inr, Suc, Proj1, Proj2, Absurd):
        return cls(_plug(c.value, t))
    if cls is Pair:
        return Pair(_plug(c.first, t), _plug(c.second, t))
    if cls is App:
        return App(_plug(c.fn, t), _plug(c.arg, t))
    return c
