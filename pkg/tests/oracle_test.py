import pytest

from sdpkit.consts import (
    DEFAULT_CAP,
    DETERMINISTIC,
    STOCHASTIC,
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
    NotDeterministic,
    NotViable,
    SdpError,
    TooLarge,
    UncheckedMeasure,
)
from sdpkit.oracle import (
    CheckReport,
    CtrlSeq,
    Oracle,
    check_bellman,
    check_opt_policy_seq,
    count_policy_seqs,
    enum_ctrl_seqs,
    enum_policy_seqs,
    get_oracle_factory,
    seq_value,
)
from sdpkit.problem import (
    EXPECTED,
    MEAN_VARIANCE,
    SdpProblem,
)
from sdpkit.problem_file import (
    parse_problem_file,
)
from sdpkit.solver import (
    Policy,
    PolicySeq,
    backwards_induction,
)
from sdpkit.uncertainty import (
    single,
)
from sdpkit.viability import (
    ReachabilityTable,
    ViabilityTable,
)

L, A, R = Move.L, Move.A, Move.R

# mean minus variance prefers a sure 0 to a fifty-fifty gamble on 10
RISK_AVERSE = """
[problem]
kind = stochastic
name = risk

[layers]
0 = s
1 = u v
2 = end

[controls]
0 s = go
1 u = a b
1 v = a

[step]
0 s go = u:0.5 v:0.5
1 u a = end
1 u b = end
1 v a = end

[reward]
1 u b end = 10
"""


def tables(p, horizon):
    return ViabilityTable(p, horizon), ReachabilityTable(p, horizon)


def two_state_toy():
    return SdpProblem(
        DETERMINISTIC,
        lambda t: ("a", "b"),
        lambda t, x: ("x", "y"),
        lambda t, x, y: single("a" if y == "x" else "b"),
        lambda t, x, y, x_next: 1.0 if (x, y) == ("b", "y") else 0.0,
        EXPECTED,
    )


def test_seq_value():
    assert seq_value(cylinder_det(), CtrlSeq(0, "b", (R, R, A, A))) == 16.0
    assert seq_value(cylinder_det(), CtrlSeq(0, "b")) == 0.0
    with pytest.raises(NotDeterministic):
        seq_value(cylinder_stoch(), CtrlSeq(0, "b", (R,)))


def test_enum_ctrl_seqs():
    p = cylinder_det()
    seqs = enum_ctrl_seqs(p, 0, 2, "c")
    assert len(seqs) == 9
    assert seqs[0] == CtrlSeq(0, "c", (L, L))
    assert max(seq_value(p, cs) for cs in seqs) == backwards_induction(p, 0, 2).value("c")
    assert len(enum_ctrl_seqs(p, 0, 0, "c")) == 1


def test_enum_ctrl_seqs_respects_viability():
    p = cylinder_timedep()
    assert [cs.ctrls for cs in enum_ctrl_seqs(p, 0, 3, "b")] == [(R, R, R)]
    with pytest.raises(NotViable):
        enum_ctrl_seqs(p, 0, 3, "a")
    with pytest.raises(NotDeterministic):
        enum_ctrl_seqs(cylinder_nondet(), 0, 1, "a")


def test_enumeration_finds_the_optimum():
    p = cylinder_timedep()
    result = backwards_induction(p, 0, 5)
    for x in ("b", "c", "d", "e"):
        best = max(seq_value(p, cs) for cs in enum_ctrl_seqs(p, 0, 5, x))
        assert best == pytest.approx(result.value(x))


@pytest.mark.parametrize("build, n", [(cylinder_det, 3), (knapsack, 4)])
def test_enumeration_matches_solver_at_every_start(build, n):
    p = build()
    result = backwards_induction(p, 0, n)
    for x in p.enumerate_states(0):
        best = max(seq_value(p, cs) for cs in enum_ctrl_seqs(p, 0, n, x))
        assert best == pytest.approx(result.value(x), abs=1e-9)


def test_enum_policy_seqs_two_state_toy():
    p = two_state_toy()
    vt, rt = tables(p, 2)
    assert count_policy_seqs(p, vt, rt, 0, 2) == 16
    seqs = list(enum_policy_seqs(p, vt, rt, 0, 2))
    assert len(seqs) == 16
    assert all(isinstance(ps, PolicySeq) and len(ps) == 2 for ps in seqs)
    assert seqs[0].head == Policy(0, 2, {"a": "x", "b": "x"})
    assert len({tuple(tuple(pol.table.items()) for pol in ps.policies) for ps in seqs}) == 16


def test_enum_policy_seqs_per_start():
    p = cylinder_det()
    vt, rt = tables(p, 2)
    assert count_policy_seqs(p, vt, rt, 0, 2) == 108 * 108
    assert count_policy_seqs(p, vt, rt, 0, 2, start="a") == 12
    assert count_policy_seqs(p, vt, rt, 0, 2, start="c") == 81
    (first, *_) = enum_policy_seqs(p, vt, rt, 0, 2, start="a")
    assert first.head.domain() == ("a",)
    assert first.policies[1].domain() == ("a", "b")


def test_enum_policy_seqs_is_eager_about_the_cap():
    p = cylinder_det()
    vt, rt = tables(p, 1)
    with pytest.raises(TooLarge) as e:
        enum_policy_seqs(p, vt, rt, 0, 1, cap=100)
    assert (e.value.count, e.value.cap) == (108, 100)
    assert len(list(enum_policy_seqs(p, vt, rt, 0, 1, cap=108))) == 108
    with pytest.raises(SdpError):
        enum_policy_seqs(p, vt, rt, 0, 1, cap=0)


@pytest.mark.parametrize("build, n", [
    (cylinder_det, 2),
    (cylinder_det, 3),
    (cylinder_timedep, 3),
    (cylinder_timedep, 4),
    (cylinder_nondet, 2),
    (lambda: cylinder_stoch(0.2), 2),
    (knapsack, 4),
])
def test_backwards_induction_is_optimal(build, n):
    p = build()
    ps = backwards_induction(p, 0, n).policy_seq
    report = check_opt_policy_seq(p, ps)
    assert report.passed, str(report)
    assert report.evaluated > 0


def test_suboptimal_policy_seq_fails():
    p = cylinder_det()
    vt, rt = tables(p, 2)
    ps = backwards_induction(p, 0, 2, vt=vt, rt=rt).policy_seq
    worse = PolicySeq(0, (ps.head.replace("c", L), ps.policies[1]))
    report = check_opt_policy_seq(p, worse, vt=vt, rt=rt)
    assert not report.passed
    assert (report.t, report.x) == (0, "c")
    assert report.gap == pytest.approx(2.0)
    assert str(report) == "FAIL t=0 x=c gap=2.000000000"
    assert report.to_dict()["gap"] == 2.0


def test_check_opt_policy_seq_cap_counts_pairs():
    p = cylinder_det()
    ps = backwards_induction(p, 0, 2).policy_seq
    with pytest.raises(TooLarge) as e:
        check_opt_policy_seq(p, ps, 200)
    assert e.value.count == 12 + 54 + 81 + 54 + 12
    assert check_opt_policy_seq(p, ps, 213).evaluated == 213


def test_check_opt_policy_seq_empty_sequence():
    report = check_opt_policy_seq(cylinder_det(), PolicySeq(3))
    assert report == CheckReport("opt-policy-seq", True)
    assert str(report) == "PASS"


def test_bellman_passes_on_shipped_examples():
    for p in (cylinder_det(), cylinder_nondet(), cylinder_stoch(0.3)):
        ps = backwards_induction(p, 1, 1).policy_seq
        assert check_bellman(p, ps).passed
        assert check_bellman(p, PolicySeq(2)).passed
    with pytest.raises(SdpError):
        check_bellman(cylinder_det(), backwards_induction(cylinder_det(), 0, 1).policy_seq)


@pytest.mark.parametrize("build", [cylinder_det, lambda: cylinder_stoch(0.2)])
@pytest.mark.parametrize("n", [0, 1, 2])
def test_bellman_for_consecutive_lengths(build, n):
    p = build()
    report = check_bellman(p, backwards_induction(p, 1, n).policy_seq)
    assert report.passed, str(report)


def test_bellman_fails_for_mean_variance():
    p = parse_problem_file(RISK_AVERSE).to_problem().with_measure(MEAN_VARIANCE)
    assert p.kind == STOCHASTIC
    vt, rt = tables(p, 2)
    tail = PolicySeq(1, (Policy(1, 1, {"u": "b", "v": "a"}),))
    with pytest.raises(UncheckedMeasure):
        check_bellman(p, tail, vt=vt, rt=rt)
    report = check_bellman(p, tail, vt=vt, rt=rt, allow_unchecked=True)
    assert not report.passed
    assert report.name == "bellman"
    assert (report.t, report.x) == (0, "s")
    assert report.gap == pytest.approx(20.0)
    assert report.evaluated == 3 + 2


def test_oracle_default_cap():
    assert Oracle.default_cap == DEFAULT_CAP
    small = get_oracle_factory(default_cap=100)
    assert small.default_cap == 100
    assert Oracle.default_cap == DEFAULT_CAP
    p = cylinder_det()
    vt, rt = tables(p, 1)
    with pytest.raises(TooLarge):
        small.enum_policy_seqs(p, vt, rt, 0, 1)
    assert len(list(Oracle.enum_policy_seqs(p, vt, rt, 0, 1))) == 108
    ps = backwards_induction(p, 0, 2).policy_seq
    with pytest.raises(TooLarge):
        small.check_opt_policy_seq(p, ps)
    small.default_cap = 1000
    assert small.check_opt_policy_seq(p, ps).passed
    with pytest.raises(SdpError):
        small.default_cap = -1
    with pytest.raises(SdpError):
        get_oracle_factory(0)


def best_packing(capacity, items):
    # textbook 0/1 knapsack over capacities
    best = [0.0] * (capacity + 1)
    for weight, value in items:
        for c in range(capacity, weight - 1, -1):
            best[c] = max(best[c], best[c - weight] + value)
    return best[capacity]


@pytest.mark.parametrize("capacity, items", [
    (5, [(3, 4.0), (2, 3.0), (4, 5.0), (1, 1.0)]),
    (6, [(1, 1.0), (2, 6.0), (3, 10.0), (5, 16.0)]),
    (5, [(2, 3.0), (3, 4.0), (4, 5.0), (5, 6.0)]),
    (6, [(3, 5.0), (3, 5.0), (2, 1.0)]),
    (4, [(5, 10.0), (1, 1.0)]),
    (3, [(1, 2.5)]),
    (0, [(1, 2.0), (2, 3.0)]),
])
def test_knapsack_optimum_matches_textbook_and_enumeration(capacity, items):
    p = knapsack(capacity, items)
    n = len(items)
    result = backwards_induction(p, 0, n)
    for x in range(capacity + 1):
        expected = best_packing(x, items)
        assert result.value(x) == pytest.approx(expected, abs=1e-9), x
        assert max(seq_value(p, cs) for cs in enum_ctrl_seqs(p, 0, n, x)) == pytest.approx(expected, abs=1e-9), x
