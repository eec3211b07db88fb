import pytest

from sdpkit.consts import (
    DETERMINISTIC,
)
from sdpkit.examples import (
    Move,
    cylinder_det,
    cylinder_nondet,
    cylinder_stoch,
    cylinder_timedep,
    knapsack,
)
from sdpkit.exceptions import (
    InvalidState,
    TableMiss,
)
from sdpkit.problem import (
    EXPECTED,
    SdpProblem,
)
from sdpkit.uncertainty import (
    contains,
    single,
    support,
)
from sdpkit.viability import (
    GoodCtrl,
    ReachabilityTable,
    ViabilityTable,
    check_start_layer,
    domain,
    feasible,
    good_ctrls,
    reachable,
    succs,
    viable,
)


@pytest.fixture
def timedep():
    return cylinder_timedep()


def dead_end():
    # the only state of layer 1 has no controls
    return SdpProblem(
        DETERMINISTIC,
        lambda t: ("a",) if t == 0 else ("b",),
        lambda t, x: ("go",) if t == 0 else (),
        lambda t, x, y: single("b"),
        lambda t, x, y, x_next: 0.0,
        EXPECTED,
    )


def test_viable_time_dependent(timedep):
    assert viable(timedep, 2, 0, "a")
    assert not viable(timedep, 3, 0, "a")
    assert viable(timedep, 3, 0, "b")
    assert not viable(timedep, 1, 2, "c")
    assert viable(timedep, 1, 2, "d")
    assert viable(timedep, 0, 3, "e")


def test_every_state_viable_on_det_cylinder():
    p = cylinder_det()
    vt = ViabilityTable(p, 8)
    assert all(vt.viable(8, 0, x) for x in p.enumerate_states(0))


def test_invalid_state_is_rejected(timedep):
    with pytest.raises(InvalidState):
        viable(timedep, 0, 3, "a")
    with pytest.raises(InvalidState):
        reachable(timedep, 3, "a")


def test_reachable(timedep):
    rt = ReachabilityTable(timedep, 7)
    assert reachable(timedep, 0, "a", rt)
    assert not reachable(timedep, 4, "a", rt)
    assert not reachable(timedep, 4, "c", rt)
    assert reachable(timedep, 4, "d", rt)
    assert reachable(timedep, 4, "e", rt)
    assert rt.layer(3) == {"e": True}


def test_witness(timedep):
    rt = ReachabilityTable(timedep, 5)
    assert rt.witness(0, "c") is None
    assert rt.witness(4, "a") is None
    x, y = rt.witness(4, "d")
    assert (x, y) == ("e", Move.L)
    assert contains("d", timedep.step(3, x, y))


def test_tables_reject_out_of_range(timedep):
    with pytest.raises(TableMiss):
        ViabilityTable(timedep, 3).layer(2, 2)
    with pytest.raises(TableMiss):
        ReachabilityTable(timedep, 3).layer(4)


def test_viability_layers_are_memoized():
    calls = []

    def ctrls(t, x):
        calls.append((t, x))
        return ("go",)

    p = SdpProblem(DETERMINISTIC, lambda t: ("a",), ctrls, lambda t, x, y: single("a"),
                   lambda t, x, y, x_next: 0.0, EXPECTED)
    vt = ViabilityTable(p, 50)
    assert vt.viable(50, 0, "a")
    assert vt.viable(20, 10, "a")
    assert len(calls) == 50
    assert vt.covers(0, 50)
    assert not vt.covers(1, 50)


def test_succs():
    p = cylinder_stoch(0.2)
    (y, mx), *_ = succs(p, 0, "b")
    assert y == Move.L
    assert mx == p.step(0, "b", Move.L)
    assert [y for y, _ in succs(p, 0, "e")] == [Move.L, Move.A]
    with pytest.raises(InvalidState):
        succs(p, 0, "z")


def test_good_ctrls(timedep):
    vt = ViabilityTable(timedep, 7)
    assert good_ctrls(timedep, vt, 2, 0, "d") == [GoodCtrl(Move.R, 0)]
    assert good_ctrls(timedep, vt, 1, 1, "c") == [GoodCtrl(Move.R, 1)]
    assert [g.ctrl for g in good_ctrls(timedep, vt, 4, 2, "b")] == [Move.L, Move.A, Move.R]
    assert good_ctrls(timedep, vt, 4, 2, "e") == [GoodCtrl(Move.L, 2)]


def test_feasible(timedep):
    vt = ViabilityTable(timedep, 3)
    assert feasible(timedep, vt, 1, 1, "c", Move.R)
    assert not feasible(timedep, vt, 1, 1, "c", Move.A)


def test_domain(timedep):
    vt = ViabilityTable(timedep, 7)
    rt = ReachabilityTable(timedep, 7)
    assert domain(vt, rt, 0, 3) == ("b", "c", "d", "e")
    assert domain(vt, rt, 4, 3) == ("d", "e")


def test_check_start_layer(timedep):
    vt = ViabilityTable(timedep, 7)
    rt = ReachabilityTable(timedep, 7)
    assert check_start_layer(vt, rt, 0, 3).ok

    p = dead_end()
    vt, rt = ViabilityTable(p, 2), ReachabilityTable(p, 2)
    assert check_start_layer(vt, rt, 0, 1).ok
    report = check_start_layer(vt, rt, 0, 2)
    assert [v.kind for v in report.violations] == ["NoViableStart"]
    assert report.violations[0].t == 0


def test_to_text(timedep):
    assert ReachabilityTable(timedep, 4).to_text() == "\n".join([
        "t=01234",
        "a 111.0",
        "b 111.0",
        "c 111.0",
        "d 111.1",
        "e 11111",
    ])


SHIPPED = [cylinder_det, cylinder_timedep, cylinder_nondet, cylinder_stoch, knapsack]
HORIZON = 6


@pytest.mark.parametrize("build", SHIPPED)
def test_viability_agrees_with_its_definition(build):
    p = build()
    vt = ViabilityTable(p, HORIZON)
    for t in range(HORIZON + 1):
        for x in p.enumerate_states(t):
            assert vt.viable(0, t, x)
            for n in range(1, HORIZON - t + 1):
                witnesses = [
                    y for y in p.enumerate_ctrls(t, x)
                    if all(vt.viable(n - 1, t + 1, x_next) for x_next in support(p.step(t, x, y)))
                ]
                assert vt.viable(n, t, x) == bool(witnesses), (t, n, x)
                if vt.viable(n, t, x):
                    assert vt.viable(n - 1, t, x), (t, n, x)


@pytest.mark.parametrize("build", SHIPPED)
def test_reachability_is_closed_and_witnessed(build):
    p = build()
    rt = ReachabilityTable(p, HORIZON)
    assert all(rt.layer(0).values())
    for t in range(HORIZON):
        for x in p.enumerate_states(t):
            if not rt.reachable(t, x):
                continue
            for y in p.enumerate_ctrls(t, x):
                assert all(rt.reachable(t + 1, x_next) for x_next in support(p.step(t, x, y))), (t, x, y)
    for t in range(1, HORIZON + 1):
        for x in p.enumerate_states(t):
            witness = rt.witness(t, x)
            if not rt.reachable(t, x):
                assert witness is None
                continue
            x_prev, y = witness
            assert rt.reachable(t - 1, x_prev)
            assert y in p.enumerate_ctrls(t - 1, x_prev)
            assert contains(x, p.step(t - 1, x_prev, y))
