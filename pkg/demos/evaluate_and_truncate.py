"""Run a program, then look at it through the finite truncations.

    python3 demos/evaluate_and_truncate.py
"""
from pcfv.opsem import evaluate, subst
from pcfv.syntax import NAT, numeral, parse, parse_type, pretty
from pcfv.truncation import enumerate_points, point_str, psi, tabulate

double = parse("(rec dbl (x : nat) : nat => case x of { zero => return 0 "
               "| suc k => let r = dbl k in return (suc (suc r)) }) 3")
print("double 3 ->", evaluate(double, 10_000))
print("omega    ->", evaluate(parse("(rec f (x : 1) : nat => f x) star"), 10_000))

# ψ at nat keeps 0..n and diverges above
p = psi(NAT, 2)
print("\nψ^nat_2 =", pretty(p))
for k in range(4):
    print(f"  ψ^nat_2 {k} ->", evaluate(subst(p, {"x": numeral(k)}), 1_000))

# the points of nat -> nat at level 1: every partial map {0,1} -> {0,1}
nn = parse_type("nat -> nat")
print("\npoints of nat -> nat at level 1:")
for q in enumerate_points(nn, 1):
    print("  ", point_str(q))

succ = parse("return (fn x : nat => return (suc x))")
print("\nsuccessor tabulated at level 1:", tabulate(succ, nn, 1))
