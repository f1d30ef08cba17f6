"""Endomorphisms of the vertical naturals and the lifting action.

    python3 demos/vertical_naturals.py
"""
from pcfv import vnat as V

r1 = V.r1()
print("r1 =", r1, " r1∘r1 =", V.compose(r1, r1))


def show(k):
    return "∞" if k == V.INF else str(k)


print("shift 2 at ∞ =", show(V.apply(V.shift(2), V.INF)))
print("threshold 2 under r1 ->", show(V.delta_action(2, r1)))

# L acting on a Δ element: one bottom, then threshold 3, moved along shift-by-2
x = V.At(1, 3)
print("\nAt(1, 3) · shift2 =", V.lift_action(x, V.shift(2), V.delta_action))
print("At(1, 3) · c0     =", V.lift_action(x, V.const(0), V.delta_action))

print("\nsucc(c4) =", V.succ(V.const(4)), " succ(∞) =", V.succ(V.infinity()))
chain = V.extend_chain(lambda k: max(0, 3 - k))
print("chain 3,2,1,0,... extended to ∞ ->", show(chain(V.INF)))
