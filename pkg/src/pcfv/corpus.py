"""Fixed program collections used by the acceptance suites and the demos."""
from __future__ import annotations

# helpers spliced into the sources below
_ADD = "(rec add (p : nat * nat) : nat => let a = fst p in let b = snd p in " \
       "case a of { zero => return b | suc k => let r = add (k, b) in return (suc r) })"
_DBL = "(rec dbl (x : nat) : nat => case x of { zero => return 0 | " \
       "suc k => let r = dbl k in return (suc (suc r)) })"
_PRED = "(fn x : nat => case x of { zero => return 0 | suc k => return k })"
_OMEGA = "(rec f (x : 1) : nat => f x) star"

# closed computations of ground type: (source, type)
GROUND = [
    ("return 0", "nat"),
    ("return 3", "nat"),
    ("return star", "1"),
    ("return (2, star)", "nat * 1"),
    ("return inl 1", "nat + 1"),
    ("return inr star", "nat + 1"),
    ("let x = return 1 in return (suc x)", "nat"),
    ("let x = return 1 in let y = return (suc x) in return (x, y)", "nat * nat"),
    ("(fn x : nat => return x) 4", "nat"),
    ("(fn x : nat => return (suc x)) 2", "nat"),
    ("(fn p : nat * nat => snd p) (1, 2)", "nat"),
    ("fst (3, 1)", "nat"),
    ("snd (3, 1)", "nat"),
    ("let p = return (0, 2) in let a = fst p in let b = snd p in return (b, a)", "nat * nat"),
    ("case 0 of { zero => return 1 | suc k => return k }", "nat"),
    ("case 3 of { zero => return 1 | suc k => return k }", "nat"),
    ("case inl 2 of { inl a => return a | inr b => return 0 }", "nat"),
    ("case inr star of { inl a => return a | inr b => return 5 }", "nat"),
    ("case inl star of { inl a => return inr a | inr b => return inl b }", "nat + 1"),
    (f"{_PRED} 3", "nat"),
    (f"{_PRED} 0", "nat"),
    (f"{_DBL} 0", "nat"),
    (f"{_DBL} 2", "nat"),
    (f"{_DBL} 3", "nat"),
    (f"{_ADD} (2, 3)", "nat"),
    (f"{_ADD} (0, 4)", "nat"),
    (f"let d = {_DBL} 1 in {_ADD} (d, 1)", "nat"),
    ("(rec iseven (x : nat) : 1 + 1 => case x of { zero => return inl star | suc k => "
     "let r = iseven k in case r of { inl a => return inr star | inr b => return inl star } }) 4",
     "1 + 1"),
    ("(rec iseven (x : nat) : 1 + 1 => case x of { zero => return inl star | suc k => "
     "let r = iseven k in case r of { inl a => return inr star | inr b => return inl star } }) 3",
     "1 + 1"),
    ("(rec down (x : nat) : nat => case x of { zero => return 0 | suc k => down k }) 5", "nat"),
    ("let f = return (fn x : nat => return (x, x)) in f 2", "nat * nat"),
    ("let g = return (fn h : nat -> nat => h 1) in g (fn y : nat => return (suc y))", "nat"),
    ("let c = return (fn f : nat -> nat => return (fn x : nat => let y = f x in f y)) in "
     "let t = c (fn z : nat => return (suc z)) in t 0", "nat"),
    ("(fn u : 1 => return 2) star", "nat"),
    ("let s = return inl (1, 2) in case s of { inl p => snd p | inr q => return 0 }", "nat"),
    ("case inr (star, 3) of { inl a => return 0 | inr b => snd b }", "nat"),
    ("let x = (fn y : nat => return y) 1 in let z = (fn y : nat => return (suc y)) x in return z",
     "nat"),
    ("(rec min (p : nat * nat) : nat => let a = fst p in let b = snd p in case a of "
     "{ zero => return 0 | suc i => case b of { zero => return 0 | suc j => "
     "let r = min (i, j) in return (suc r) } }) (3, 2)", "nat"),
    ("(rec eq (p : nat * nat) : 1 + 1 => let a = fst p in let b = snd p in case a of "
     "{ zero => case b of { zero => return inl star | suc j => return inr star } | "
     "suc i => case b of { zero => return inr star | suc j => eq (i, j) } }) (2, 2)", "1 + 1"),
    ("let k = return (fn x : nat => return (fn y : nat => return x)) in "
     "let k1 = k 3 in k1 0", "nat"),
    ("return ((1, 2), inl star)", "(nat * nat) * (1 + nat)"),
    ("let q = return ((1, 2), 3) in let a = fst q in snd a", "nat"),
    ("case suc 0 of { zero => return inr star | suc k => return inl k }", "nat + 1"),
    ("(fn x : nat + nat => case x of { inl a => return a | inr b => return (suc b) }) (inr 2)",
     "nat"),
    # programs that never converge: the tabulation must not claim a value for them
    (_OMEGA, "nat"),
    (f"let x = {_OMEGA} in return 0", "nat"),
    ("(rec up (x : nat) : nat => up (suc x)) 0", "nat"),
    (f"case inl 0 of {{ inl a => {_OMEGA} | inr b => return 0 }}", "nat"),
    ("(rec f (x : 1) : 1 => f x) star", "1"),
    (f"(fn x : nat => {_OMEGA}) 1", "nat"),
]

# recursive programs of type nat -> nat, chosen so that the recursion never
# depends on values above the level it is tabulated at
REC = [
    "rec f (x : nat) : nat => case x of { zero => return zero | suc y => f y }",
    "rec f (x : nat) : nat => return x",
    "rec f (x : nat) : nat => f x",
    "rec f (x : nat) : nat => case x of { zero => return 1 | suc y => f y }",
    "rec f (x : nat) : nat => case x of { zero => return 0 | suc y => let r = f y in return (suc r) }",
    "rec f (x : nat) : nat => case x of { zero => return 0 | suc y => return y }",
    "rec f (x : nat) : nat => case x of { zero => f x | suc y => return y }",
    "rec f (x : nat) : nat => case x of { zero => return 0 | suc y => f (suc y) }",
    "rec f (x : nat) : nat => case x of { zero => return 0 | suc y => case y of "
    "{ zero => return 1 | suc z => f z } }",
    "rec f (x : nat) : nat => case x of { zero => return 1 | suc y => case y of "
    "{ zero => return 0 | suc z => f z } }",
    "rec f (x : nat) : nat => let r = f 0 in return x",
    "rec f (x : nat) : nat => case x of { zero => return 1 | suc y => let r = f y in "
    "case r of { zero => return 1 | suc z => return z } }",
    "rec f (x : nat) : nat => case x of { zero => return 0 | suc y => let r = f y in "
    "case r of { zero => return 1 | suc z => return 0 } }",
    "rec f (x : nat) : nat => case x of { zero => return 0 | suc y => f 0 }",
    "rec f (x : nat) : nat => case x of { zero => return 3 | suc y => let r = f y in f r }",
    "rec f (x : nat) : nat => case x of { zero => return 0 | suc y => let r = f y in f r }",
    "rec f (x : nat) : nat => case x of { zero => return 1 | suc y => f 0 }",
    "rec f (x : nat) : nat => case x of { zero => return 0 | suc y => case y of "
    "{ zero => f 0 | suc z => f y } }",
    "rec f (x : nat) : nat => case x of { zero => return 1 | suc y => let r = f y in "
    "let s = f y in return r }",
    "rec f (x : nat) : nat => case x of { zero => return 0 | suc y => case y of "
    "{ zero => return 1 | suc z => let r = f z in return (suc r) } }",
]

# (left, right, type) pairs of closed computations that are contextually equivalent
EQUIVALENT = [
    ("return (fn x : nat => return x)",
     "return (fn x : nat => case x of { zero => return zero | suc y => return (suc y) })",
     "nat -> nat"),
    ("(fn x : nat => return (suc x)) 1", "return 2", "nat"),
    ("return (fn x : nat => (fn y : nat => return y) x)", "return (fn x : nat => return x)",
     "nat -> nat"),
    ("case inl 1 of { inl a => return a | inr b => return 0 }", "return 1", "nat"),
    ("return (fn x : nat => case inl x of { inl a => return (a, a) | inr b => return (0, 0) })",
     "return (fn x : nat => return (x, x))", "nat -> nat * nat"),
    ("let x = (let y = return 1 in return (suc y)) in return (x, x)",
     "let y = return 1 in let x = return (suc y) in return (x, x)", "nat * nat"),
    ("return (fn g : nat -> nat => let a = g 0 in let b = (let c = g a in return c) in return b)",
     "return (fn g : nat -> nat => let a = g 0 in let c = g a in return c)", "(nat -> nat) -> nat"),
    ("return (fn p : nat * nat => let a = fst p in let b = snd p in return (a, b))",
     "return (fn p : nat * nat => return p)", "nat * nat -> nat * nat"),
    ("return (fn s : 1 + 1 => case s of { inl a => return inl a | inr b => return inr b })",
     "return (fn s : 1 + 1 => return s)", "1 + 1 -> 1 + 1"),
    ("(rec f (x : nat) : nat => case x of { zero => return zero | suc y => f y }) 2",
     "return 0", "nat"),
]

# (left, right, type) pairs with a distinguishing context
INEQUIVALENT = [
    ("return (fn x : nat => return 0)", "return (fn x : nat => return x)", "nat -> nat"),
    ("return 0", "return 1", "nat"),
    ("return inl star", "return inr star", "1 + 1"),
    ("return (1, 0)", "return (0, 1)", "nat * nat"),
    ("return (fn x : nat => return (suc x))", "return (fn x : nat => return x)", "nat -> nat"),
    ("return (fn g : nat -> nat => g 0)", "return (fn g : nat -> nat => g 1)", "(nat -> nat) -> nat"),
    ("return (fn g : nat -> nat => return 0)", "return (fn g : nat -> nat => g 0)",
     "(nat -> nat) -> nat"),
    ("return (fn p : nat * nat => fst p)", "return (fn p : nat * nat => snd p)", "nat * nat -> nat"),
    ("return (fn s : 1 + 1 => return s)",
     "return (fn s : 1 + 1 => case s of { inl a => return inr a | inr b => return inl b })",
     "1 + 1 -> 1 + 1"),
    ("return (fn x : nat => return (fn y : nat => return x))",
     "return (fn x : nat => return (fn y : nat => return y))", "nat -> nat -> nat"),
]
