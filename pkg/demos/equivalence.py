"""Search for contexts that tell programs apart.

    python3 demos/equivalence.py
"""
from pcfv.corpus import INEQUIVALENT
from pcfv.opsem import evaluate, plug
from pcfv.syntax import parse, parse_type
from pcfv.truncation import ConfirmedDifferent, equiv

ident = parse("return (fn x : nat => return x)")
cases = parse("return (fn x : nat => case x of { zero => return zero | suc y => return (suc y) })")
const0 = parse("return (fn x : nat => return 0)")
nn = parse_type("nat -> nat")

print("identity vs identity-by-cases:", equiv(ident, cases, nn, 2))

v = equiv(const0, ident, nn, 1)
print("\nconstant 0 vs identity:", type(v).__name__)
print("witness:", v.witness)
for name, t in (("const0", const0), ("ident", ident)):
    print(f"  C[{name}] ->", evaluate(plug(v.witness, t), 100_000))

print("\ncurated inequivalent pairs at level 2:")
for a, b, ty in INEQUIVALENT:
    r = equiv(parse(a), parse(b), parse_type(ty), 2, budget=6)
    ok = isinstance(r, ConfirmedDifferent)
    print(f"  {'separated' if ok else 'not separated'}: {a}  vs  {b}")
