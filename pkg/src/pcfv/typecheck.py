"""Type checking for the two judgments: values and computations.

The rules are the declarative ones, made syntax-directed by the binder
annotations.  The only non-directed spots are ``inl``/``inr`` (the other
summand) and ``absurd`` (any result type); those get a type variable that
is solved by first-order unification against the surrounding term or the
caller's ``expected`` type.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .syntax import (
    NAT, ONE_T, Absurd, App, CaseNat, CaseSum, Hole, Inl, Inr, Lam, Let, Pair,
    Proj1, Proj2, Rec, Ret, Star, Suc, TArrow, TNat, TOne, TProd, TSum, TZero,
    Var, Zero, pretty, pretty_type,
)

__all__ = ["TypeCheckError", "TyCtx", "check_value", "check_comp", "check", "check_context"]


class TypeCheckError(Exception):
    def __init__(self, rule: str, term, message: str):
        self.rule = rule
        self.term = term
        self.message = message
        where = pretty(term) if term is not None else "?"
        if len(where) > 80:
            where = where[:77] + "..."
        super().__init__(f"[{rule}] {message} in `{where}`")


class TyCtx:
    """Ordered list of ``(name, type)`` bindings; lookup takes the rightmost."""

    __slots__ = ("bindings",)

    def __init__(self, bindings: Sequence = ()):
        self.bindings = tuple((str(x), t) for x, t in bindings)

    def extend(self, name: str, ty) -> "TyCtx":
        return TyCtx(self.bindings + ((name, ty),))

    def lookup(self, name: str):
        for x, t in reversed(self.bindings):
            if x == name:
                return t
        return None

    def names(self) -> list:
        return [x for x, _ in self.bindings]

    def __iter__(self):
        return iter(self.bindings)

    def __len__(self):
        return len(self.bindings)

    def __repr__(self):
        return "TyCtx(" + ", ".join(f"{x}:{pretty_type(t)}" for x, t in self.bindings) + ")"


@dataclass(frozen=True)
class _Meta:
    id: int


class _Checker:
    def __init__(self, holes=None):
        self.sol: dict = {}
        self.counter = itertools.count()
        self.holes = holes  # (hole type, hole ctx) when checking a context

    def fresh(self):
        return _Meta(next(self.counter))

    def resolve(self, t):
        while isinstance(t, _Meta) and t in self.sol:
            t = self.sol[t]
        return t

    def zonk(self, t, default=None):
        t = self.resolve(t)
        if isinstance(t, _Meta):
            return default if default is not None else t
        if isinstance(t, TSum):
            return TSum(self.zonk(t.left, default), self.zonk(t.right, default))
        if isinstance(t, TProd):
            return TProd(self.zonk(t.left, default), self.zonk(t.right, default))
        if isinstance(t, TArrow):
            return TArrow(self.zonk(t.dom, default), self.zonk(t.cod, default))
        return t

    def occurs(self, m, t) -> bool:
        t = self.resolve(t)
        if t == m:
            return True
        if isinstance(t, (TSum, TProd)):
            return self.occurs(m, t.left) or self.occurs(m, t.right)
        if isinstance(t, TArrow):
            return self.occurs(m, t.dom) or self.occurs(m, t.cod)
        return False

    def unify(self, a, b, rule, term, what="type mismatch"):
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if isinstance(a, _Meta):
            if self.occurs(a, b):
                raise TypeCheckError(rule, term, "infinite type")
            self.sol[a] = b
            return
        if isinstance(b, _Meta):
            self.unify(b, a, rule, term, what)
            return
        if type(a) is type(b):
            if isinstance(a, (TSum, TProd)):
                self.unify(a.left, b.left, rule, term, what)
                self.unify(a.right, b.right, rule, term, what)
                return
            if isinstance(a, TArrow):
                self.unify(a.dom, b.dom, rule, term, what)
                self.unify(a.cod, b.cod, rule, term, what)
                return
        raise TypeCheckError(rule, term, f"{what}: expected {self.show(b)}, got {self.show(a)}")

    def show(self, t) -> str:
        z = self.zonk(t)
        if _has_meta(z):
            return _show_meta(z)
        return pretty_type(z)

    # -- values
    def value(self, ctx: TyCtx, v):
        if isinstance(v, Var):
            t = ctx.lookup(v.name)
            if t is None:
                raise TypeCheckError("var", v, f"unbound variable {v.name}")
            return t
        if isinstance(v, Star):
            return ONE_T
        if isinstance(v, Zero):
            return NAT
        if isinstance(v, Suc):
            self.unify(self.value(ctx, v.value), NAT, "suc", v, "suc expects nat")
            return NAT
        if isinstance(v, Inl):
            return TSum(self.value(ctx, v.value), self.fresh())
        if isinstance(v, Inr):
            return TSum(self.fresh(), self.value(ctx, v.value))
        if isinstance(v, Pair):
            return TProd(self.value(ctx, v.first), self.value(ctx, v.second))
        if isinstance(v, Lam):
            body = self.comp(ctx.extend(v.var, v.ty), v.body)
            return TArrow(v.ty, body)
        if isinstance(v, Rec):
            fty = TArrow(v.arg_ty, v.res_ty)
            body = self.comp(ctx.extend(v.fname, fty).extend(v.var, v.arg_ty), v.body)
            self.unify(body, v.res_ty, "rec", v, "recursive body")
            return fty
        raise TypeCheckError("value", v, "not a value")

    # -- computations
    def comp(self, ctx: TyCtx, t):
        if isinstance(t, Ret):
            return self.value(ctx, t.value)
        if isinstance(t, Proj1) or isinstance(t, Proj2):
            a, b = self.fresh(), self.fresh()
            rule = "fst" if isinstance(t, Proj1) else "snd"
            self.unify(self.value(ctx, t.value), TProd(a, b), rule, t, f"{rule} expects a pair")
            return a if isinstance(t, Proj1) else b
        if isinstance(t, App):
            fty = self.value(ctx, t.fn)
            aty = self.value(ctx, t.arg)
            res = self.fresh()
            fr = self.resolve(fty)
            if not isinstance(fr, (TArrow, _Meta)):
                raise TypeCheckError("app", t, f"applying a non-function of type {self.show(fr)}")
            if isinstance(fr, TArrow):
                self.unify(aty, fr.dom, "app", t, "argument type")
                return fr.cod
            self.unify(fty, TArrow(aty, res), "app", t)
            return res
        if isinstance(t, Let):
            a = self.comp(ctx, t.bound)
            return self.comp(ctx.extend(t.var, a), t.body)
        if isinstance(t, CaseNat):
            self.unify(self.value(ctx, t.scrutinee), NAT, "case-nat", t, "scrutinee")
            z = self.comp(ctx, t.zero_branch)
            s = self.comp(ctx.extend(t.pred_var, NAT), t.suc_branch)
            self.unify(s, z, "case-nat", t, "branch types differ")
            return z
        if isinstance(t, CaseSum):
            a, b = self.fresh(), self.fresh()
            self.unify(self.value(ctx, t.scrutinee), TSum(a, b), "case-sum", t, "scrutinee")
            lt = self.comp(ctx.extend(t.left_var, a), t.left)
            rt = self.comp(ctx.extend(t.right_var, b), t.right)
            self.unify(rt, lt, "case-sum", t, "branch types differ")
            return lt
        if isinstance(t, Absurd):
            self.unify(self.value(ctx, t.value), TZero(), "absurd", t, "absurd expects 0")
            return self.fresh()
        if isinstance(t, Hole):
            if self.holes is None:
                raise TypeCheckError("hole", t, "hole outside a context")
            hty, hctx = self.holes
            for x, ty in hctx:
                have = ctx.lookup(x)
                if have is None:
                    raise TypeCheckError("hole", t, f"context does not bind hole variable {x}")
                self.unify(have, ty, "hole", t, f"binding of {x} at the hole")
            return hty
        raise TypeCheckError("comp", t, "not a computation")


def _has_meta(t) -> bool:
    if isinstance(t, _Meta):
        return True
    if isinstance(t, (TSum, TProd)):
        return _has_meta(t.left) or _has_meta(t.right)
    if isinstance(t, TArrow):
        return _has_meta(t.dom) or _has_meta(t.cod)
    return False


def _show_meta(t) -> str:
    if isinstance(t, _Meta):
        return f"?{t.id}"
    if isinstance(t, TSum):
        return f"({_show_meta(t.left)} + {_show_meta(t.right)})"
    if isinstance(t, TProd):
        return f"({_show_meta(t.left)} * {_show_meta(t.right)})"
    if isinstance(t, TArrow):
        return f"({_show_meta(t.dom)} -> {_show_meta(t.cod)})"
    return pretty_type(t)


def _as_ctx(ctx) -> TyCtx:
    if ctx is None:
        return TyCtx()
    if isinstance(ctx, TyCtx):
        return ctx
    if isinstance(ctx, dict):
        return TyCtx(list(ctx.items()))
    return TyCtx(ctx)


def _finish(ch: _Checker, ty, expected, term):
    if expected is not None:
        ch.unify(ty, expected, "expected", term)
    out = ch.zonk(ty)
    if _has_meta(out):
        raise TypeCheckError("ambiguous", term,
                             f"type {_show_meta(out)} is not determined; supply an expected type")
    return out


def check_value(ctx, v, expected=None):
    """Return the type of ``v`` under ``ctx`` or raise ``TypeCheckError``."""
    ch = _Checker()
    return _finish(ch, ch.value(_as_ctx(ctx), v), expected, v)


def check_comp(ctx, t, expected=None):
    """Return the type of computation ``t`` under ``ctx`` or raise ``TypeCheckError``.

    ``expected`` fixes types the term leaves open (``absurd``, a lone ``inl``).
    """
    ch = _Checker()
    return _finish(ch, ch.comp(_as_ctx(ctx), t), expected, t)


def check(ctx, term, expected=None):
    from .syntax import is_value
    if is_value(term):
        return check_value(ctx, term, expected)
    return check_comp(ctx, term, expected)


def check_context(context, ctx=None, expected=None):
    """Type of ``context.body`` when its hole is filled with something of the hole type."""
    ch = _Checker(holes=(context.hole_type, _as_ctx(context.hole_ctx)))
    return _finish(ch, ch.comp(_as_ctx(ctx), context.body), expected, context.body)
