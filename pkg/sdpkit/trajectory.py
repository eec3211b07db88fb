"""
Every possible state-control trajectory obtained by following a policy sequence.
"""
from dataclasses import (
    dataclass,
    field,
)
from typing import (
    Callable,
    Dict,
    List,
    Optional,
    Tuple,
)

from sdpkit.consts import (
    PROB_DIGITS,
    STOCHASTIC,
    VALUE_DIGITS,
    VALUE_TOLERANCE,
)
from sdpkit.exceptions import (
    InfeasibleCtrl,
    SdpError,
)
from sdpkit.problem import (
    SdpProblem,
)
from sdpkit.solver import (
    Policy,
    PolicySeq,
)
from sdpkit.types import (
    CtrlValue,
    KeyFn,
    StateValue,
    TrajectoryParts,
)
from sdpkit.uncertainty import (
    Container,
    bind,
    fmap,
    ret,
    support,
    tag_members,
    weighted,
)
from sdpkit.viability import (
    ReachabilityTable,
    ViabilityTable,
    domain,
    feasible,
)

Step = Tuple[int, StateValue, CtrlValue]
Rule = Callable[[int, StateValue], CtrlValue]


@dataclass(frozen=True, order=True)
class StateCtrlSeq:
    """
    One realized path: the ``(t, x, y)`` decisions taken, then the state reached.

    Trajectories compare by ``sort_key``, the canonical keys of their decisions
    followed by the canonical key of the final state; build them with :meth:`of`.
    """
    sort_key: Tuple[Tuple[Tuple[int, str, str], ...], str] = field(repr=False)
    steps: Tuple[Step, ...] = field(compare=False)
    final: StateValue = field(compare=False)

    @classmethod
    def of(cls, steps: Tuple[Step, ...], final: StateValue, key: KeyFn = str) -> "StateCtrlSeq":
        return cls(
            (tuple((t, key(x), key(y)) for t, x, y in steps), key(final)),
            steps,
            final,
        )

    def prepend(self, step: Step, key: KeyFn = str) -> "StateCtrlSeq":
        return StateCtrlSeq.of((step, *self.steps), self.final, key)

    def states(self) -> Tuple[StateValue, ...]:
        return tuple(x for _, x, _ in self.steps) + (self.final,)

    def __len__(self) -> int:
        return len(self.steps)


def state_ctrl_trj(p: SdpProblem, ps: PolicySeq, t: int, n: int, x: StateValue) -> Container[StateCtrlSeq]:
    """
    The container of trajectories from ``x`` at step ``t`` following ``ps``:
    a set of trajectories for non-deterministic problems and their exact
    distribution for stochastic ones.

    :raises DomainMiss: a policy is undefined on a state the trajectories visit

    >>> from sdpkit.examples import cylinder_det
    >>> from sdpkit.solver import backwards_induction
    >>> p = cylinder_det()
    >>> trj = state_ctrl_trj(p, backwards_induction(p, 0, 2).policy_seq, 0, 2, "b")
    >>> render_trajectories(p, trj)
    ['b -R-> c -L-> b : 8.000000000']
    """
    if (ps.start_t, len(ps)) != (t, n):
        raise SdpError(f"Expected a policy sequence at t={t} of length {n}, "
                       f"receives one at t={ps.start_t} of length {len(ps)}")
    key = p.key
    memo: Dict[Tuple[int, StateValue], Container[StateCtrlSeq]] = {}

    def trj(i: int, s: StateValue) -> Container[StateCtrlSeq]:
        if i == n:
            return ret(p.kind, StateCtrlSeq.of((), s, key))
        if (i, s) not in memo:
            y = ps.policies[i](s)
            tagged = tag_members(p.step(t + i, s, y))
            memo[(i, s)] = fmap(
                lambda seq: seq.prepend((t + i, s, y), key),
                bind(tagged, lambda pair: trj(i + 1, pair[0])),
            )
        return memo[(i, s)]

    return trj(0, x)


def trajectory_value(p: SdpProblem, traj: StateCtrlSeq) -> float:
    """
    Sum of the rewards collected along ``traj``; 0 for a trajectory without decisions.
    """
    states = traj.states()
    return sum(
        (p.reward(t, x, y, x_next) for (t, x, y), x_next in zip(traj.steps, states[1:])),
        0.0,
    )


def policy_seq_from_rule(
    p: SdpProblem,
    vt: ViabilityTable,
    rt: ReachabilityTable,
    rule: Rule,
    t: int,
    n: int,
) -> PolicySeq:
    """
    Tabulate a decision rule ``(t, x) -> y`` on the domains of a policy sequence.

    :raises InfeasibleCtrl: the rule picks a control that is unavailable or not feasible
    """
    policies: List[Policy] = []
    for i in range(n):
        s, steps = t + i, n - i
        table: Dict[StateValue, CtrlValue] = {}
        for x in domain(vt, rt, s, steps):
            y = rule(s, x)
            if y not in p.enumerate_ctrls(s, x) or not feasible(p, vt, steps - 1, s, x, y):
                raise InfeasibleCtrl(f"Expected a control feasible for {steps - 1} steps at t={s} x={p.key(x)}, "
                                     f"receives {p.key(y)}")
            table[x] = y
        policies.append(Policy(s, steps, table))
    return PolicySeq(t, tuple(policies))


def state_ctrl_pairs(p: SdpProblem, ps: PolicySeq, t: int, n: int, x: StateValue, k: int) -> Container[Tuple[StateValue, CtrlValue]]:
    """
    The possible ``(state, control)`` pairs at step ``t + k`` when following ``ps`` from ``x``.

    :raises SdpError: ``k`` is not a decision of ``ps``
    """
    if (ps.start_t, len(ps)) != (t, n):
        raise SdpError(f"Expected a policy sequence at t={t} of length {n}, "
                       f"receives one at t={ps.start_t} of length {len(ps)}")
    if not 0 <= k < n:
        raise SdpError(f"Expected 0 <= k < {n}, receives k={k}")
    mx = ret(p.kind, x)
    for i in range(k):
        policy = ps.policies[i]
        mx = bind(mx, lambda s, i=i, policy=policy: p.step(t + i, s, policy(s)))
    last = ps.policies[k]
    return fmap(lambda s: (s, last(s)), mx)


def extreme_trajectories(p: SdpProblem, trj: Container[StateCtrlSeq], best: bool = True) -> Tuple[StateCtrlSeq, ...]:
    """
    The trajectories of largest (or, with ``best=False``, smallest) value, in canonical order.
    """
    values = [(traj, trajectory_value(p, traj)) for traj in support(trj)]
    if not values:
        return ()
    target = max(v for _, v in values) if best else min(v for _, v in values)
    return tuple(traj for traj, v in values if abs(v - target) <= VALUE_TOLERANCE)


def render_trajectory(p: SdpProblem, traj: StateCtrlSeq) -> str:
    key = p.key
    path = "".join(f"{key(x)} -{key(y)}-> " for _, x, y in traj.steps) + key(traj.final)
    return f"{path} : {trajectory_value(p, traj):.{VALUE_DIGITS}f}"


def render_trajectories(p: SdpProblem, trj: Container[StateCtrlSeq]) -> List[str]:
    """
    One line per trajectory in canonical order, ``prob|`` prefixed for stochastic problems.
    """
    if trj.kind == STOCHASTIC:
        return [f"{prob:.{PROB_DIGITS}f}|{render_trajectory(p, traj)}" for traj, prob in weighted(trj)]
    return [render_trajectory(p, traj) for traj in support(trj)]


def trajectories_to_list(p: SdpProblem, trj: Container[StateCtrlSeq]) -> List[TrajectoryParts]:
    key = p.key
    entries: List[Tuple[StateCtrlSeq, Optional[float]]]
    if trj.kind == STOCHASTIC:
        entries = [(traj, round(prob, PROB_DIGITS)) for traj, prob in weighted(trj)]
    else:
        entries = [(traj, None) for traj in support(trj)]
    return [
        {
            "prob": prob,
            "steps": [{"t": t, "x": key(x), "y": key(y)} for t, x, y in traj.steps],
            "final": key(traj.final),
            "value": round(trajectory_value(p, traj), VALUE_DIGITS),
        }
        for traj, prob in entries
    ]


__all__ = [
    "StateCtrlSeq",
    "state_ctrl_trj",
    "trajectory_value",
    "policy_seq_from_rule",
    "state_ctrl_pairs",
    "extreme_trajectories",
    "render_trajectory",
    "render_trajectories",
    "trajectories_to_list",
]
