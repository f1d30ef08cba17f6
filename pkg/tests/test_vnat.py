import pytest

from pcfv.vnat import (
    INF, VBOT, At, EndoV, NotStabilized, apply, compose, const, delta_action, extend_chain,
    i_embed, identity, infinity, is_omega, lift_action, omegabar_action, r1, shift, succ,
    xi_combine,
)


def test_r1_is_idempotent():
    assert compose(r1(), r1()) == r1()
    assert [apply(r1(), k) for k in (0, 1, 5, INF)] == [0, 1, 1, 1]


def test_constant_absorbs():
    for e in (identity(), r1(), shift(4), EndoV.of((0, 2, 2), 1)):
        assert compose(const(3), e) == const(3)


def test_shift_at_infinity():
    assert apply(shift(2), INF) == INF
    assert apply(EndoV.of((2,), 1), 5) == 7


def test_canonical_form():
    assert EndoV.of((2,), 1) == shift(2) == EndoV((2, 3), 4, 1)
    with pytest.raises(ValueError):
        EndoV((3,), 1, 1)


def test_lift_examples():
    s = "s"
    assert lift_action(At(1, s), const(0), lambda x, e: x) is VBOT
    assert lift_action(At(0, s), identity(), lambda x, e: x) == At(0, s)
    assert lift_action(At(1, 3), EndoV.of((2,), 1), delta_action) == At(0, 2)
    assert lift_action(VBOT, shift(3), delta_action) is VBOT


def test_delta_examples():
    for e in (identity(), r1(), const(0), shift(3)):
        assert delta_action(0, e) == 0
        assert delta_action(INF, e) == INF
    assert delta_action(2, r1()) == INF
    assert delta_action(2, identity()) == 2


def test_succ_infinity_embedding():
    for n in range(5):
        assert succ(const(n)) == const(n + 1)
    assert succ(infinity()) == infinity()
    x = EndoV.of((0, 1, 3), 0)
    assert is_omega(x) and i_embed(x) == x
    assert not is_omega(identity())
    with pytest.raises(ValueError):
        i_embed(infinity())
    assert omegabar_action(x, shift(1)) == EndoV.of((1, 3), 0)


def test_extend_chain():
    c = extend_chain(lambda k: 4)
    assert c(0) == 4 and c(INF) == 4
    c = extend_chain(lambda k: max(0, 3 - k))
    assert [c(k) for k in range(5)] == [3, 2, 1, 0, 0] and c(INF) == 0
    with pytest.raises(NotStabilized):
        extend_chain(lambda k: k, bound=100)
    assert extend_chain(lambda k: k, bound=10, tail=INF)(INF) == INF


def test_xi_combine():
    for t in (0, 3, INF):
        assert xi_combine(0, t) == t
        assert xi_combine(INF, t) == INF
    assert xi_combine(2, 5) == 5
