"""Finite tables with an explicit lifting monad and Kleene fixed points.

The chain of approximants used for recursion is computed literally: start
from the everywhere-undefined table and apply the functional until the
table repeats.  The lattice of tables is finite, so this always stops.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .syntax import TArrow, TNat, TOne, TProd, TSum, TZero, pretty_type
from .truncation import CONVERGED, FunP, Out, Table, enumerate_points, erase, point_leq, point_str

__all__ = [
    "Bot", "BOT", "Val", "unit", "bind", "leq", "FnTable", "kleisli_compose", "fix",
    "FixResult", "MonotonicityError", "idempotent_split", "point_height", "lattice_height",
    "all_tables", "rec_functional",
]


class Bot:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Bot"

    def __reduce__(self):
        return (Bot, ())


BOT = Bot()


@dataclass(frozen=True)
class Val:
    value: object

    def __repr__(self):
        return f"Val({self.value!r})"


def unit(p) -> Val:
    return Val(p)


def bind(l, k: Callable):
    if l is BOT:
        return BOT
    return k(l.value)


def leq(a, b) -> bool:
    """Flat order on lifted values: ⊥ below everything, values only below themselves."""
    if a is BOT:
        return True
    if b is BOT:
        return False
    return a.value == b.value


def _lift_out(o: Out):
    if o.tag == CONVERGED:
        return Val(erase(o.point))
    return BOT


class MonotonicityError(AssertionError):
    def __init__(self, before, after, at):
        self.before, self.after, self.at = before, after, at
        super().__init__(f"functional is not monotone at {point_str(at)}: "
                         f"{before!r} then {after!r}")


@dataclass(frozen=True)
class FnTable:
    """A total map from the points of ``dom_ty`` at ``level`` to lifted points of ``cod_ty``."""
    dom: tuple
    outs: tuple
    level: int
    dom_ty: object = None
    cod_ty: object = None

    def __post_init__(self):
        if len(self.dom) != len(self.outs):
            raise ValueError("table is not total over its domain")

    def __call__(self, p):
        try:
            return self.outs[self._index()[p]]
        except KeyError:
            raise KeyError(f"{point_str(p)} is not in the domain") from None

    def _index(self):
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {p: i for i, p in enumerate(self.dom)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def leq(self, other: "FnTable") -> bool:
        return self.dom == other.dom and all(leq(a, b) for a, b in zip(self.outs, other.outs))

    def defined(self) -> int:
        return sum(1 for o in self.outs if o is not BOT)

    @classmethod
    def bottom(cls, dom_ty, cod_ty, level):
        dom = tuple(enumerate_points(dom_ty, level))
        return cls(dom, (BOT,) * len(dom), level, dom_ty, cod_ty)

    @classmethod
    def from_function(cls, dom_ty, cod_ty, level, fn: Callable):
        dom = tuple(enumerate_points(dom_ty, level))
        return cls(dom, tuple(fn(p) for p in dom), level, dom_ty, cod_ty)

    @classmethod
    def identity(cls, ty, level):
        return cls.from_function(ty, ty, level, Val)

    @classmethod
    def from_table(cls, table: Table):
        """From a one-variable table; exhausted entries become ⊥."""
        if len(table.ctx) != 1:
            raise ValueError("need a table with exactly one input variable")
        dom = tuple(erase(ins[0]) for ins, _ in table.entries)
        outs = tuple(_lift_out(o) for _, o in table.entries)
        return cls(dom, outs, table.level, table.ctx[0][1], table.ty)

    @classmethod
    def from_point(cls, p: FunP, dom_ty, cod_ty, level):
        dom = tuple(enumerate_points(dom_ty, level))
        return cls(dom, tuple(_lift_out(o) for o in p.outs), level, dom_ty, cod_ty)

    def to_point(self, basis_id: str) -> FunP:
        outs = tuple(Out("bottom") if o is BOT else Out(CONVERGED, o.value) for o in self.outs)
        return FunP(basis_id, outs)

    def __str__(self):
        parts = []
        for p, o in zip(self.dom, self.outs):
            parts.append(f"{point_str(p)}↦{'⊥' if o is BOT else point_str(o.value)}")
        return "{" + ", ".join(parts) + "}"


def kleisli_compose(f: FnTable, g: FnTable) -> FnTable:
    """``f† ∘ g``: run ``g``, then feed a defined result to ``f``."""
    if f.level != g.level:
        raise ValueError(f"level mismatch: {f.level} vs {g.level}")
    if g.cod_ty is not None and f.dom_ty is not None and g.cod_ty != f.dom_ty:
        raise TypeError(f"cannot compose: {pretty_type(g.cod_ty)} is not {pretty_type(f.dom_ty)}")
    outs = tuple(bind(o, f) for o in g.outs)
    return FnTable(g.dom, outs, g.level, g.dom_ty, f.cod_ty)


@dataclass
class FixResult:
    table: FnTable
    iterations: int
    chain: list

    def __iter__(self):
        return iter((self.table, self.iterations))


def fix(phi: Callable[[FnTable], FnTable], start: FnTable, max_iter: Optional[int] = None) -> FixResult:
    """Least fixed point of a monotone ``phi``, iterating from ``start`` (normally all-⊥).

    ``iterations`` counts applications of ``phi``; the last one is the
    application that returned its input unchanged.
    """
    cur = start
    chain = [cur]
    k = 0
    while True:
        nxt = phi(cur)
        k += 1
        if nxt.dom != cur.dom:
            raise ValueError("functional changed the table domain")
        for p, a, b in zip(cur.dom, cur.outs, nxt.outs):
            if not leq(a, b):
                raise MonotonicityError(a, b, p)
        if nxt == cur or nxt.outs == cur.outs:
            return FixResult(cur, k, chain)
        chain.append(nxt)
        cur = nxt
        if max_iter is not None and k >= max_iter:
            raise RuntimeError(f"no fixed point after {k} iterations")


def idempotent_split(h: FnTable) -> list:
    """Points fixed by an idempotent endomorphism ``h``."""
    if kleisli_compose(h, h).outs != h.outs:
        raise ValueError("table is not idempotent")
    return [p for p, o in zip(h.dom, h.outs) if o is not BOT and o.value == p]


def point_height(ty, n: int) -> int:
    """Length (in steps) of the longest strict chain of points of ``ty`` at level ``n``."""
    if isinstance(ty, (TZero, TOne, TNat)):
        return 0
    if isinstance(ty, TSum):
        return max(point_height(ty.left, n), point_height(ty.right, n))
    if isinstance(ty, TProd):
        return point_height(ty.left, n) + point_height(ty.right, n)
    if isinstance(ty, TArrow):
        from .truncation import count_points
        return count_points(ty.dom, n) * (1 + point_height(ty.cod, n))
    raise TypeError(ty)


def lattice_height(dom_ty, cod_ty, n: int) -> int:
    """Number of tables in the longest strict chain of lifted tables ``dom -> L cod``.

    This bounds the Kleene iteration: every iterate but the last is strictly
    above its predecessor, and one more application confirms the fixed point.
    """
    return point_height(TArrow(dom_ty, cod_ty), n) + 1


def all_tables(dom_ty, cod_ty, n: int):
    """Every lifted table ``dom -> L cod`` at level ``n``."""
    import itertools
    dom = tuple(enumerate_points(dom_ty, n))
    choices = [BOT] + [Val(q) for q in enumerate_points(cod_ty, n)]
    for outs in itertools.product(choices, repeat=len(dom)):
        yield FnTable(dom, outs, n, dom_ty, cod_ty)


def rec_functional(rec, n: int, fuel: int = 10_000, cache=None) -> Callable[[FnTable], FnTable]:
    """The functional of ``rec f (x:σ):τ => t`` on level-``n`` tables.

    ``T`` is turned back into a term by its realizer and substituted for
    ``f``; the body is then tabulated over the points of σ.
    """
    from .opsem import subst
    from .truncation import BasisCache, _basis_id, realize

    dom_ty, cod_ty = rec.arg_ty, rec.res_ty
    fty = TArrow(dom_ty, cod_ty)
    cache = cache or BasisCache(n, fuel=fuel)
    dom_basis = cache.get(dom_ty)
    bid = _basis_id(dom_ty, n)

    def phi(t: FnTable) -> FnTable:
        f = realize(t.to_point(bid), fty, n)
        outs = []
        for p, r in dom_basis.entries:
            o = cache.run(subst(rec.body, {rec.fname: f, rec.var: r}), cod_ty)
            outs.append(_lift_out(o))
        return FnTable(tuple(erase(p) for p in dom_basis.points()), tuple(outs), n, dom_ty, cod_ty)

    return phi
