"""Vertical naturals: eventually-affine endomorphisms of N ∪ {∞} and the
formulas acting on them.

An ``EndoV`` is ``k ↦ prefix[k]`` for ``k < len(prefix)`` and
``k ↦ base + slope·(k − len(prefix))`` afterwards, with ``∞ ↦`` the supremum.
The representation is kept canonical, so ``==`` is extensional equality.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

__all__ = [
    "INF", "EndoV", "compose", "apply", "identity", "const", "shift", "r1", "succ_map",
    "delta_action", "VBot", "VBOT", "At", "lift_action", "omegabar_action", "succ",
    "infinity", "i_embed", "is_omega", "NotStabilized", "ExtendedChain", "extend_chain",
    "xi_combine", "random_endo", "random_threshold", "sample_points",
]

INF = math.inf
Nat = Union[int, float]


def _ok(x) -> bool:
    return x == INF or (isinstance(x, int) and x >= 0)


@dataclass(frozen=True)
class EndoV:
    prefix: tuple = ()
    base: Nat = 0
    slope: int = 1

    def __post_init__(self):
        prefix, base, slope = tuple(self.prefix), self.base, self.slope
        if slope not in (0, 1):
            raise ValueError("slope must be 0 or 1")
        if not _ok(base) or not all(_ok(x) for x in prefix):
            raise ValueError("values must be naturals or ∞")
        if any(a > b for a, b in zip(prefix, prefix[1:] + (base,))):
            raise ValueError("not monotone")
        if base == INF:
            slope = 0
        # canonical form: fold prefix entries that the tail already predicts
        while prefix and prefix[-1] == (base if slope == 0 or base == INF else base - 1):
            base = prefix[-1]
            prefix = prefix[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "slope", slope)

    @classmethod
    def of(cls, prefix: Sequence, slope: int) -> "EndoV":
        """From a non-empty prefix whose last value continues with ``slope``."""
        prefix = tuple(prefix)
        if not prefix:
            raise ValueError("need a non-empty prefix")
        return cls(prefix[:-1], prefix[-1], slope)

    def __call__(self, k: Nat) -> Nat:
        return apply(self, k)

    @property
    def threshold_index(self) -> int:
        return len(self.prefix)

    def sup(self) -> Nat:
        return self.base if self.slope == 0 else INF

    def bounded(self) -> bool:
        return self.sup() != INF

    def __str__(self):
        vals = [("∞" if v == INF else str(v)) for v in self.prefix]
        b = "∞" if self.base == INF else str(self.base)
        tail = f"{b}, {b}, …" if self.slope == 0 else f"{b}, {b}+1, …"
        return "[" + ", ".join(vals + [tail]) + "]"


def apply(e: EndoV, k: Nat) -> Nat:
    if k == INF:
        return e.sup()
    if k < 0:
        raise ValueError("negative argument")
    n = len(e.prefix)
    if k < n:
        return e.prefix[k]
    return e.base + e.slope * (k - n) if e.base != INF else INF


def compose(e1: EndoV, e2: EndoV) -> EndoV:
    """``e1 ∘ e2``."""
    n2 = len(e2.prefix)
    if e2.slope == 0:
        cut = n2
        slope = 0
    else:
        n1 = len(e1.prefix)
        cut = n2 + max(0, n1 - e2.base)
        slope = e1.slope
    prefix = tuple(apply(e1, apply(e2, k)) for k in range(cut))
    return EndoV(prefix, apply(e1, apply(e2, cut)), slope)


def identity() -> EndoV:
    return EndoV((), 0, 1)


def const(c: Nat) -> EndoV:
    return EndoV((), c, 0)


def shift(d: int) -> EndoV:
    return EndoV((), d, 1)


def r1() -> EndoV:
    """``0 ↦ 0`` and everything else to 1."""
    return EndoV.of((0, 1), 0)


def succ_map() -> EndoV:
    return shift(1)


# ---------------------------------------------------------------------------
# Δ as thresholds: threshold t is the monotone sequence that is 1 exactly at indices ≥ t


def delta_action(t: Nat, e: EndoV) -> Nat:
    """Precomposition: the least ``i`` with ``e(i) ≥ t``, or ∞."""
    if t == INF:
        return INF
    for i, v in enumerate(e.prefix):
        if v >= t:
            return i
    n = len(e.prefix)
    if e.base >= t:
        return n
    if e.slope == 0:
        return INF
    return n + (t - e.base)


# ---------------------------------------------------------------------------
# the lifting


class VBot:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "⊥"


VBOT = VBot()


@dataclass(frozen=True)
class At:
    """``payload`` preceded by ``n`` bottoms."""
    n: int
    payload: object


def lift_action(elem, e: EndoV, act: Callable) -> object:
    """``(L X)(e)``; ``act(s, e)`` is the action of ``X``."""
    if elem is VBOT:
        return VBOT
    n = elem.n
    k = delta_action(n, e)
    if k == INF:
        # the image of e stays below n
        return VBOT
    shifted = compose(e, shift(k))
    tail = EndoV(tuple(v - n for v in shifted.prefix), shifted.base - n, shifted.slope)
    return At(k, act(elem.payload, tail))


# ---------------------------------------------------------------------------
# ω and ω̄ as fragments of y(V)


def omegabar_action(x: EndoV, e: EndoV) -> EndoV:
    return compose(x, e)


def succ(x: EndoV) -> EndoV:
    return compose(succ_map(), x)


def infinity() -> EndoV:
    return const(INF)


def is_omega(x: EndoV) -> bool:
    """ω is the part of ω̄ with bounded image."""
    return x.bounded()


def i_embed(x: EndoV) -> EndoV:
    if not is_omega(x):
        raise ValueError("not an element of ω")
    return x


# ---------------------------------------------------------------------------
# chains and ξ


class NotStabilized(ValueError):
    pass


@dataclass(frozen=True)
class ExtendedChain:
    values: tuple
    limit: Nat

    def __call__(self, k: Nat) -> Nat:
        if k == INF or k >= len(self.values):
            return self.limit
        return self.values[k]


def extend_chain(f: Union[Callable[[int], Nat], Sequence], bound: int = 100,
                 tail: Optional[Nat] = None) -> ExtendedChain:
    """Extend a family indexed by N to N ∪ {∞} by its eventual value.

    Without a declared ``tail`` the family must be constant on a window
    ``[m, bound]`` with ``m < bound``.
    """
    if not callable(f):
        seq = tuple(f)
        f = lambda k: seq[k] if k < len(seq) else seq[-1]  # noqa: E731
    if tail is not None:
        vals = []
        for k in range(bound + 1):
            vals.append(f(k))
        while vals and vals[-1] == tail:
            vals.pop()
        return ExtendedChain(tuple(vals), tail)
    vals = [f(k) for k in range(bound + 1)]
    m = bound
    while m > 0 and vals[m - 1] == vals[bound]:
        m -= 1
    if m >= bound:
        raise NotStabilized(f"family still changes at {bound}")
    return ExtendedChain(tuple(vals[:m]), vals[bound])


def xi_combine(outer: Nat, inner: Nat) -> Nat:
    """Pointwise minimum of two step sequences."""
    return max(outer, inner)


# ---------------------------------------------------------------------------
# sampling


def random_endo(rng: random.Random, max_prefix: int = 4, max_value: int = 6) -> EndoV:
    k = rng.randint(0, max_prefix)
    vals = sorted(rng.randint(0, max_value) for _ in range(k + 1))
    if rng.random() < 0.15:
        j = rng.randint(0, k)
        vals = vals[:j] + [INF] * (k + 1 - j)
    return EndoV(tuple(vals[:-1]), vals[-1], rng.randint(0, 1))


def random_threshold(rng: random.Random, max_value: int = 8) -> Nat:
    return INF if rng.random() < 0.15 else rng.randint(0, max_value)


def sample_points() -> list:
    return list(range(21)) + [INF]
