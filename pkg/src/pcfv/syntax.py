"""Abstract syntax, parser and printer for fine-grained call-by-value PCF.

Values and computations are separate node families.  Every node is an
immutable (frozen, slotted) dataclass, so terms hash and compare
structurally and can be shared freely between threads.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

__all__ = [
    "Ty", "TZero", "TOne", "TNat", "TSum", "TProd", "TArrow", "ZERO_T", "ONE_T", "NAT",
    "Var", "Star", "Inl", "Inr", "Pair", "Zero", "Suc", "Lam", "Rec",
    "Ret", "CaseSum", "Proj1", "Proj2", "App", "CaseNat", "Let", "Absurd", "Hole",
    "Value", "Computation", "Term", "Context", "ParseError",
    "numeral", "as_numeral", "free_vars", "size", "is_value", "is_ground",
    "parse", "parse_value", "parse_comp", "parse_type", "parse_context", "pretty",
    "type_order", "type_depth", "fresh_name", "contains_hole",
]


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True, slots=True)
class TZero:
    def __str__(self):
        return pretty_type(self)


@dataclass(frozen=True, slots=True)
class TOne:
    def __str__(self):
        return pretty_type(self)


@dataclass(frozen=True, slots=True)
class TNat:
    def __str__(self):
        return pretty_type(self)


@dataclass(frozen=True, slots=True)
class TSum:
    left: "Ty"
    right: "Ty"

    def __str__(self):
        return pretty_type(self)


@dataclass(frozen=True, slots=True)
class TProd:
    left: "Ty"
    right: "Ty"

    def __str__(self):
        return pretty_type(self)


@dataclass(frozen=True, slots=True)
class TArrow:
    dom: "Ty"
    cod: "Ty"

    def __str__(self):
        return pretty_type(self)


Ty = Union[TZero, TOne, TNat, TSum, TProd, TArrow]

ZERO_T = TZero()
ONE_T = TOne()
NAT = TNat()


def type_order(ty: Ty) -> int:
    """ord(0)=ord(1)=ord(nat)=0, max through + and *, ord(a->b)=max(ord a + 1, ord b)."""
    if isinstance(ty, (TZero, TOne, TNat)):
        return 0
    if isinstance(ty, (TSum, TProd)):
        return max(type_order(ty.left), type_order(ty.right))
    return max(type_order(ty.dom) + 1, type_order(ty.cod))


def type_depth(ty: Ty) -> int:
    """Height of the type tree; base types have depth 1."""
    if isinstance(ty, (TZero, TOne, TNat)):
        return 1
    if isinstance(ty, (TSum, TProd)):
        return 1 + max(type_depth(ty.left), type_depth(ty.right))
    return 1 + max(type_depth(ty.dom), type_depth(ty.cod))


def is_ground(ty: Ty) -> bool:
    """Arrow-free types; these are the observable result types."""
    return type_order(ty) == 0 and not _has_arrow(ty)


def _has_arrow(ty: Ty) -> bool:
    if isinstance(ty, TArrow):
        return True
    if isinstance(ty, (TSum, TProd)):
        return _has_arrow(ty.left) or _has_arrow(ty.right)
    return False


# ---------------------------------------------------------------------------
# Terms
#
# Each node carries a lazily filled ``_fv`` slot that caches its free
# variables; it takes no part in equality, hashing or repr.

def _fv_slot():
    return field(default=None, init=False, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class Star:
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class Inl:
    value: "Value"
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class Inr:
    value: "Value"
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class Pair:
    first: "Value"
    second: "Value"
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class Zero:
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class Suc:
    value: "Value"
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class Lam:
    var: str
    ty: Ty
    body: "Computation"
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class Rec:
    fname: str
    var: str
    arg_ty: Ty
    res_ty: Ty
    body: "Computation"
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class Ret:
    value: "Value"
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class CaseSum:
    scrutinee: "Value"
    left_var: str
    left: "Computation"
    right_var: str
    right: "Computation"
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class Proj1:
    value: "Value"
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class Proj2:
    value: "Value"
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class App:
    fn: "Value"
    arg: "Value"
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class CaseNat:
    scrutinee: "Value"
    zero_branch: "Computation"
    pred_var: str
    suc_branch: "Computation"
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class Let:
    var: str
    bound: "Computation"
    body: "Computation"
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class Absurd:
    value: "Value"
    _fv: Optional[frozenset] = _fv_slot()


@dataclass(frozen=True, slots=True)
class Hole:
    """The single hole of a syntactic context; only legal inside a Context."""
    _fv: Optional[frozenset] = _fv_slot()


Value = Union[Var, Star, Inl, Inr, Pair, Zero, Suc, Lam, Rec]
Computation = Union[Ret, CaseSum, Proj1, Proj2, App, CaseNat, Let, Absurd, Hole]
Term = Union[Value, Computation]

_VALUE_CLASSES = (Var, Star, Inl, Inr, Pair, Zero, Suc, Lam, Rec)


def is_value(t: Term) -> bool:
    return isinstance(t, _VALUE_CLASSES)


_EMPTY: frozenset = frozenset()


def free_vars(t: Term) -> frozenset:
    fv = t._fv
    if fv is not None:
        return fv
    if isinstance(t, Var):
        fv = frozenset((t.name,))
    elif isinstance(t, (Star, Zero, Hole)):
        fv = _EMPTY
    elif isinstance(t, (Inl, Inr, Suc, Ret, Proj1, Proj2, Absurd)):
        fv = free_vars(t.value)
    elif isinstance(t, Pair):
        fv = free_vars(t.first) | free_vars(t.second)
    elif isinstance(t, Lam):
        fv = free_vars(t.body) - {t.var}
    elif isinstance(t, Rec):
        fv = free_vars(t.body) - {t.fname, t.var}
    elif isinstance(t, CaseSum):
        fv = (free_vars(t.scrutinee) | (free_vars(t.left) - {t.left_var})
              | (free_vars(t.right) - {t.right_var}))
    elif isinstance(t, App):
        fv = free_vars(t.fn) | free_vars(t.arg)
    elif isinstance(t, CaseNat):
        fv = (free_vars(t.scrutinee) | free_vars(t.zero_branch)
              | (free_vars(t.suc_branch) - {t.pred_var}))
    elif isinstance(t, Let):
        fv = free_vars(t.bound) | (free_vars(t.body) - {t.var})
    else:
        raise TypeError(f"not a term: {t!r}")
    object.__setattr__(t, "_fv", fv)
    return fv


def contains_hole(t: Term) -> int:
    """Number of hole occurrences in ``t``."""
    return sum(1 for node in _nodes(t) if isinstance(node, Hole))


def _children(t: Term) -> tuple:
    if isinstance(t, (Var, Star, Zero, Hole)):
        return ()
    if isinstance(t, (Inl, Inr, Suc, Ret, Proj1, Proj2, Absurd)):
        return (t.value,)
    if isinstance(t, Pair):
        return (t.first, t.second)
    if isinstance(t, (Lam, Rec)):
        return (t.body,)
    if isinstance(t, CaseSum):
        return (t.scrutinee, t.left, t.right)
    if isinstance(t, App):
        return (t.fn, t.arg)
    if isinstance(t, CaseNat):
        return (t.scrutinee, t.zero_branch, t.suc_branch)
    if isinstance(t, Let):
        return (t.bound, t.body)
    raise TypeError(f"not a term: {t!r}")


def _nodes(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(_children(node))


def size(t: Term) -> int:
    """Node count; a numeral ``k`` counts as a single node."""
    if as_numeral(t) is not None:
        return 1
    return 1 + sum(size(c) for c in _children(t))


def numeral(k: int) -> Value:
    v: Value = Zero()
    for _ in range(k):
        v = Suc(v)
    return v


def as_numeral(v) -> Optional[int]:
    k = 0
    while isinstance(v, Suc):
        v = v.value
        k += 1
    return k if isinstance(v, Zero) else None


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """First of ``base``, ``base_1``, ``base_2``... not in ``avoid``."""
    avoid = set(avoid)
    if base not in avoid:
        return base
    stem = re.sub(r"_\d+$", "", base)
    i = 1
    while f"{stem}_{i}" in avoid:
        i += 1
    return f"{stem}_{i}"


# ---------------------------------------------------------------------------
# Syntactic contexts


@dataclass(frozen=True)
class Context:
    """A computation with exactly one ``Hole``, plus the hole's typing.

    ``hole_ctx`` lists the variables the hole may mention; the context is
    expected to bind them (contexts capture).
    """
    body: Computation
    hole_type: Ty
    hole_ctx: tuple = ()

    def __post_init__(self):
        n = contains_hole(self.body)
        if n != 1:
            raise ValueError(f"context must contain exactly one hole, found {n}")

    def __str__(self):
        return pretty(self.body)


# ---------------------------------------------------------------------------
# Lexer and parser

KEYWORDS = {
    "fn", "rec", "return", "let", "in", "case", "of", "inl", "inr", "fst", "snd",
    "star", "zero", "suc", "absurd", "nat",
}

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<darrow>=>)
  | (?P<hole>\[\s*[.·]?\s*\])
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>[(){}|,:=+*])
""", re.VERBOSE)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, text, line, pos - line_start + 1))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, src: str, allow_hole: bool = False):
        self.toks = _tokenize(src)
        self.i = 0
        self.allow_hole = allow_hole

    # token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise ParseError(f"{msg} (found {found!r})", tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("kw", "sym", "arrow", "darrow")

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.error(f"expected {text!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.error("expected identifier")
        name = self.tok.text
        self.i += 1
        return name

    def done(self):
        if self.tok.kind != "eof":
            self.error("unexpected trailing input")

    # types
    def ty(self) -> Ty:
        left = self.sum_ty()
        if self.tok.kind == "arrow":
            self.i += 1
            return TArrow(left, self.ty())
        return left

    def sum_ty(self) -> Ty:
        t = self.prod_ty()
        while self.at("+"):
            self.i += 1
            t = TSum(t, self.prod_ty())
        return t

    def prod_ty(self) -> Ty:
        t = self.atom_ty()
        while self.at("*"):
            self.i += 1
            t = TProd(t, self.atom_ty())
        return t

    def atom_ty(self) -> Ty:
        tok = self.tok
        if tok.kind == "num" and tok.text in ("0", "1"):
            self.i += 1
            return ZERO_T if tok.text == "0" else ONE_T
        if tok.kind == "kw" and tok.text == "nat":
            self.i += 1
            return NAT
        if self.at("("):
            self.i += 1
            t = self.ty()
            self.expect(")")
            return t
        self.error("expected a type")

    # values
    _VALUE_START = {"star", "zero", "suc", "inl", "inr", "fn", "rec", "("}

    def starts_value(self) -> bool:
        tok = self.tok
        return tok.kind in ("ident", "num") or (tok.text in self._VALUE_START and tok.kind in ("kw", "sym"))

    def value(self) -> Value:
        tok = self.tok
        if tok.kind == "ident":
            self.i += 1
            return Var(tok.text)
        if tok.kind == "num":
            self.i += 1
            return numeral(int(tok.text))
        if tok.kind == "kw":
            if tok.text == "star":
                self.i += 1
                return Star()
            if tok.text == "zero":
                self.i += 1
                return Zero()
            if tok.text in ("suc", "inl", "inr"):
                self.i += 1
                arg = self.value()
                return {"suc": Suc, "inl": Inl, "inr": Inr}[tok.text](arg)
            if tok.text == "fn":
                self.i += 1
                x = self.ident()
                self.expect(":")
                ty = self.ty()
                self.expect("=>")
                return Lam(x, ty, self.comp())
            if tok.text == "rec":
                self.i += 1
                f = self.ident()
                self.expect("(")
                x = self.ident()
                self.expect(":")
                a = self.ty()
                self.expect(")")
                self.expect(":")
                b = self.ty()
                self.expect("=>")
                return Rec(f, x, a, b, self.comp())
        if self.at("("):
            self.i += 1
            first = self.value()
            if self.at(","):
                self.i += 1
                second = self.value()
                self.expect(")")
                return Pair(first, second)
            self.expect(")")
            return first
        self.error("expected a value")

    # computations
    def comp(self) -> Computation:
        tok = self.tok
        if tok.kind == "hole":
            if not self.allow_hole:
                self.error("hole outside a context")
            self.i += 1
            return Hole()
        if tok.kind == "kw":
            if tok.text == "return":
                self.i += 1
                return Ret(self.value())
            if tok.text in ("fst", "snd"):
                self.i += 1
                v = self.value()
                return Proj1(v) if tok.text == "fst" else Proj2(v)
            if tok.text == "absurd":
                self.i += 1
                return Absurd(self.value())
            if tok.text == "let":
                self.i += 1
                x = self.ident()
                self.expect("=")
                bound = self.comp()
                self.expect("in")
                return Let(x, bound, self.comp())
            if tok.text == "case":
                return self.case()
        if self.at("("):
            # either a parenthesised value in function position or a
            # parenthesised computation
            save = self.i
            try:
                fn = self.value()
            except ParseError:
                self.i = save + 1
                c = self.comp()
                self.expect(")")
                return c
            if not self.starts_value():
                self.error("a value is not a computation; expected an argument (or use 'return')")
            return App(fn, self.value())
        if self.starts_value():
            fn = self.value()
            if not self.starts_value():
                self.error("a value is not a computation; expected an argument (or use 'return')")
            return App(fn, self.value())
        self.error("expected a computation")

    def case(self) -> Computation:
        self.expect("case")
        scrut = self.value()
        self.expect("of")
        self.expect("{")
        if self.at("zero") or (self.tok.kind == "num" and self.tok.text == "0"):
            self.i += 1
            self.expect("=>")
            z = self.comp()
            self.expect("|")
            self.expect("suc")
            y = self.ident()
            self.expect("=>")
            s = self.comp()
            self.expect("}")
            return CaseNat(scrut, z, y, s)
        if self.at("inl"):
            self.i += 1
            x = self.ident()
            self.expect("=>")
            left = self.comp()
            self.expect("|")
            self.expect("inr")
            y = self.ident()
            self.expect("=>")
            right = self.comp()
            self.expect("}")
            return CaseSum(scrut, x, left, y, right)
        self.error("expected 'zero' or 'inl' branch")

    def term(self) -> Term:
        # a computation if it starts with a computation keyword or is an
        # application; otherwise a lone value
        tok = self.tok
        if tok.kind == "hole" or (tok.kind == "kw" and tok.text in
                                  ("return", "fst", "snd", "absurd", "let", "case")):
            return self.comp()
        v = self.value()
        if self.starts_value():
            return App(v, self.value())
        return v


def parse(source: str) -> Term:
    """Parse a value or a computation; numerals desugar to ``suc``/``zero``."""
    p = _Parser(source)
    t = p.term()
    p.done()
    return t


def parse_value(source: str) -> Value:
    p = _Parser(source)
    v = p.value()
    p.done()
    return v


def parse_comp(source: str) -> Computation:
    p = _Parser(source)
    c = p.comp()
    p.done()
    return c


def parse_type(source: str) -> Ty:
    p = _Parser(source)
    t = p.ty()
    p.done()
    return t


def parse_context(source: str, hole_type: Ty, hole_ctx: tuple = ()) -> Context:
    p = _Parser(source, allow_hole=True)
    c = p.comp()
    p.done()
    return Context(c, hole_type, tuple(hole_ctx))


# ---------------------------------------------------------------------------
# Printer


def pretty_type(ty: Ty) -> str:
    if isinstance(ty, TZero):
        return "0"
    if isinstance(ty, TOne):
        return "1"
    if isinstance(ty, TNat):
        return "nat"
    if isinstance(ty, TArrow):
        dom = pretty_type(ty.dom)
        if isinstance(ty.dom, TArrow):
            dom = f"({dom})"
        return f"{dom} -> {pretty_type(ty.cod)}"
    if isinstance(ty, TSum):
        left = pretty_type(ty.left)
        right = pretty_type(ty.right)
        if isinstance(ty.left, TArrow):
            left = f"({left})"
        if isinstance(ty.right, (TArrow, TSum)):
            right = f"({right})"
        return f"{left} + {right}"
    if isinstance(ty, TProd):
        left = pretty_type(ty.left)
        right = pretty_type(ty.right)
        if isinstance(ty.left, (TArrow, TSum)):
            left = f"({left})"
        if isinstance(ty.right, (TArrow, TSum, TProd)):
            right = f"({right})"
        return f"{left} * {right}"
    raise TypeError(f"not a type: {ty!r}")


def _atomic(v: Value) -> str:
    s = pretty(v)
    if isinstance(v, (Var, Star, Pair)) or as_numeral(v) is not None:
        return s
    return f"({s})"


def pretty(t: Union[Term, Ty]) -> str:
    """Render a term (or type) in the concrete grammar; ``parse`` inverts it."""
    if isinstance(t, (TZero, TOne, TNat, TSum, TProd, TArrow)):
        return pretty_type(t)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Star):
        return "star"
    k = as_numeral(t)
    if k is not None:
        return str(k)
    if isinstance(t, Suc):
        return f"suc {_atomic(t.value)}"
    if isinstance(t, Inl):
        return f"inl {_atomic(t.value)}"
    if isinstance(t, Inr):
        return f"inr {_atomic(t.value)}"
    if isinstance(t, Pair):
        return f"({pretty(t.first)}, {pretty(t.second)})"
    if isinstance(t, Lam):
        return f"fn {t.var} : {pretty_type(t.ty)} => {pretty(t.body)}"
    if isinstance(t, Rec):
        return (f"rec {t.fname} ({t.var} : {pretty_type(t.arg_ty)}) : "
                f"{pretty_type(t.res_ty)} => {pretty(t.body)}")
    if isinstance(t, Ret):
        return f"return {pretty(t.value)}"
    if isinstance(t, Proj1):
        return f"fst {_atomic(t.value)}"
    if isinstance(t, Proj2):
        return f"snd {_atomic(t.value)}"
    if isinstance(t, Absurd):
        return f"absurd {_atomic(t.value)}"
    if isinstance(t, App):
        return f"{_atomic(t.fn)} {_atomic(t.arg)}"
    if isinstance(t, Let):
        return f"let {t.var} = {pretty(t.bound)} in {pretty(t.body)}"
    if isinstance(t, CaseNat):
        return (f"case {_atomic(t.scrutinee)} of {{ zero => {pretty(t.zero_branch)} "
                f"| suc {t.pred_var} => {pretty(t.suc_branch)} }}")
    if isinstance(t, CaseSum):
        return (f"case {_atomic(t.scrutinee)} of {{ inl {t.left_var} => {pretty(t.left)} "
                f"| inr {t.right_var} => {pretty(t.right)} }}")
    if isinstance(t, Hole):
        return "[]"
    raise TypeError(f"not a term: {t!r}")
