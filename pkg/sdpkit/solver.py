"""
Policies, the value of following a policy sequence and backwards induction.
"""
import logging
from dataclasses import (
    dataclass,
    field,
)
from typing import (
    Dict,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)
from typing_extensions import (
    Literal,
)

from sdpkit._utils import (
    validate_natural,
)
from sdpkit.consts import (
    ARROW,
    VALUE_DIGITS,
)
from sdpkit.exceptions import (
    DomainMiss,
    EmptyChoice,
    IllPosedProblem,
    SdpError,
    UncheckedMeasure,
)
from sdpkit.problem import (
    SdpProblem,
    validate,
)
from sdpkit.types import (
    CtrlValue,
    KeyFn,
    PolicyParts,
    PolicySeqParts,
    StateValue,
)
from sdpkit.uncertainty import (
    fmap,
    tag_members,
)
from sdpkit.viability import (
    ReachabilityTable,
    ViabilityTable,
    domain,
    good_ctrls,
)

logger = logging.getLogger(__name__)

Retain = Literal["all", "last"]


@dataclass(frozen=True, eq=False)
class Policy:
    """
    The control to select in each state of layer ``t`` when ``steps_remaining``
    decisions are left, this one included.

    :param int t: decision step
    :param int steps_remaining: decisions left, at least 1
    :param Mapping table: state to control; its keys are the domain of the policy
    """
    t: int
    steps_remaining: int
    table: Mapping[StateValue, CtrlValue] = field(compare=False)

    def __post_init__(self) -> None:
        validate_natural(self.t, "t")
        if self.steps_remaining < 1:
            raise SdpError(f"Expected a policy with at least 1 step remaining, receives {self.steps_remaining}")
        object.__setattr__(self, "table", dict(self.table))

    def __call__(self, x: StateValue) -> CtrlValue:
        try:
            return self.table[x]
        except KeyError:
            raise DomainMiss(f"Expected a state in the domain of the policy at t={self.t}, receives {x}") from None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Policy):
            return False
        return (self.t, self.steps_remaining) == (other.t, other.steps_remaining) and self.table == other.table

    __hash__ = None  # type: ignore

    def domain(self) -> Tuple[StateValue, ...]:
        return tuple(self.table)

    def replace(self, x: StateValue, y: CtrlValue) -> "Policy":
        """
        :return Policy: a copy selecting ``y`` at ``x``
        """
        self(x)
        return Policy(self.t, self.steps_remaining, {**self.table, x: y})


@dataclass(frozen=True)
class PolicySeq:
    """
    Policies for the steps ``start_t, start_t + 1, ...``; the ``i``-th policy
    has ``len(policies) - i`` steps remaining.

    >>> len(PolicySeq(3))
    0
    """
    start_t: int
    policies: Tuple[Policy, ...] = ()

    def __post_init__(self) -> None:
        validate_natural(self.start_t, "start_t")
        object.__setattr__(self, "policies", tuple(self.policies))
        length = len(self.policies)
        for i, policy in enumerate(self.policies):
            if (policy.t, policy.steps_remaining) != (self.start_t + i, length - i):
                raise SdpError(f"Expected policy {i} at t={self.start_t + i} with {length - i} steps remaining, "
                               f"receives t={policy.t} with {policy.steps_remaining} steps remaining")

    def __len__(self) -> int:
        return len(self.policies)

    @property
    def head(self) -> Policy:
        if not self.policies:
            raise SdpError("Expected a non-empty policy sequence, receives an empty one")
        return self.policies[0]

    @property
    def tail(self) -> "PolicySeq":
        if not self.policies:
            raise SdpError("Expected a non-empty policy sequence, receives an empty one")
        return PolicySeq(self.start_t + 1, self.policies[1:])

    def prepend(self, policy: Policy) -> "PolicySeq":
        return PolicySeq(self.start_t - 1, (policy, *self.policies))


@dataclass(frozen=True)
class ValueTable:
    """
    Optimal values of layer ``t`` with ``n`` steps remaining, over the
    reachable states viable for ``n`` steps.
    """
    t: int
    n: int
    values: Mapping[StateValue, float] = field(compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", dict(self.values))

    def __getitem__(self, x: StateValue) -> float:
        try:
            return self.values[x]
        except KeyError:
            raise DomainMiss(f"Expected a state in the value table at t={self.t} n={self.n}, receives {x}") from None

    def __contains__(self, x: object) -> bool:
        return x in self.values

    @classmethod
    def terminal(cls, rt: ReachabilityTable, t: int) -> "ValueTable":
        """
        :return ValueTable: zero for every reachable state of layer ``t``
        """
        return cls(t, 0, {x: 0.0 for x, ok in rt.layer(t).items() if ok})


def max_value(values: Sequence[Tuple[CtrlValue, float]]) -> float:
    """
    :raises EmptyChoice: ``values`` is empty

    >>> max_value([("L", 1.0), ("A", 2.0), ("R", 2.0)])
    2.0
    """
    return values[argmax_index(values)][1]


def argmax(values: Sequence[Tuple[CtrlValue, float]]) -> CtrlValue:
    """
    The first control attaining the maximum.

    :raises EmptyChoice: ``values`` is empty

    >>> argmax([("L", 1.0), ("A", 2.0), ("R", 2.0)])
    'A'
    """
    return values[argmax_index(values)][0]


def argmax_index(values: Sequence[Tuple[CtrlValue, float]]) -> int:
    if not values:
        raise EmptyChoice("Expected at least one control to choose from, receives none")
    best = 0
    for i in range(1, len(values)):
        if values[i][1] > values[best][1]:
            best = i
    return best


def mval(p: SdpProblem, ps: PolicySeq, t: int, n: int, x: StateValue) -> float:
    """
    The measured value of following ``ps`` from ``x`` at step ``t`` for ``n`` steps.

    :raises SdpError: ``ps`` does not start at ``t`` or does not have length ``n``
    :raises DomainMiss: the policies are undefined on a state the sequence visits
    """
    if (ps.start_t, len(ps)) != (t, n):
        raise SdpError(f"Expected a policy sequence at t={t} of length {n}, "
                       f"receives one at t={ps.start_t} of length {len(ps)}")
    memo: Dict[Tuple[int, StateValue], float] = {}

    def value(i: int, s: StateValue) -> float:
        if i == n:
            return 0.0
        if (i, s) not in memo:
            policy = ps.policies[i]
            y = policy(s)
            tagged = tag_members(p.step(t + i, s, y))
            memo[(i, s)] = p.meas(fmap(
                lambda pair: p.reward(t + i, s, y, pair[0]) + value(i + 1, pair[0]), tagged))
        return memo[(i, s)]

    return value(0, x)


def _require_checked(p: SdpProblem, allow_unchecked: bool) -> None:
    if not p.meas.checked and not allow_unchecked:
        raise UncheckedMeasure(f"Expected a measure that passed the monotonicity check, "
                               f"receives the unchecked measure {p.meas.name}")


def opt_ext(
    p: SdpProblem,
    vt: ViabilityTable,
    rt: ReachabilityTable,
    value_next: ValueTable,
    *,
    allow_unchecked: bool = False,
) -> Tuple[Policy, ValueTable]:
    """
    Extend optimally by one step: for every reachable state of layer
    ``value_next.t - 1`` viable for ``value_next.n + 1`` steps, pick the first
    good control maximizing the measured reward plus ``value_next``.

    :param ValueTable value_next: optimal values one step later
    :param bool allow_unchecked: accept a measure that did not pass the monotonicity check
    :raises UncheckedMeasure: the measure is unchecked and ``allow_unchecked`` is False
    :return Tuple[Policy,ValueTable]: the extension and its values
    """
    _require_checked(p, allow_unchecked)
    t, n = value_next.t - 1, value_next.n
    validate_natural(t, "t")
    table: Dict[StateValue, CtrlValue] = {}
    values: Dict[StateValue, float] = {}
    for x in domain(vt, rt, t, n + 1):
        scored: List[Tuple[CtrlValue, float]] = []
        for good in good_ctrls(p, vt, t, n, x):
            y = good.ctrl
            tagged = tag_members(p.step(t, x, y))
            scored.append((y, p.meas(fmap(lambda pair: p.reward(t, x, y, pair[0]) + value_next[pair[0]], tagged))))
        best = argmax_index(scored)
        table[x], values[x] = scored[best]
    logger.debug("optimal extension at t=%d n=%d over %d states", t, n + 1, len(table))
    return Policy(t, n + 1, table), ValueTable(t, n + 1, values)


@dataclass(frozen=True)
class BackwardsInductionResult:
    """
    :param PolicySeq policy_seq: the optimal policy sequence
    :param Tuple[ValueTable,...] value_tables: tables from ``start_t`` onwards, the terminal one last; only the head with ``retain="last"``
    """
    policy_seq: PolicySeq
    value_tables: Tuple[ValueTable, ...]
    viability: ViabilityTable = field(repr=False, compare=False)
    reachability: ReachabilityTable = field(repr=False, compare=False)
    key: KeyFn = field(default=str, repr=False, compare=False)

    def value(self, x: StateValue) -> float:
        return self.value_tables[0][x]

    def _check_complete(self) -> None:
        if len(self.value_tables) != len(self.policy_seq) + 1:
            raise SdpError("Expected value tables for every policy, receives a result built with retain='last'")

    def to_text(self) -> str:
        """
        One block per policy: a ``t=<t> n=<n>`` header and ``x -> y : value``
        lines in layer order.
        """
        self._check_complete()
        key = self.key
        lines: List[str] = []
        for policy, values in zip(self.policy_seq.policies, self.value_tables):
            lines.append(f"t={policy.t} n={policy.steps_remaining}")
            lines.extend(f"{key(x)} {ARROW} {key(y)} : {values[x]:.{VALUE_DIGITS}f}" for x, y in policy.table.items())
        return "\n".join(lines)

    def to_dict(self) -> PolicySeqParts:
        self._check_complete()
        key = self.key
        policies: List[PolicyParts] = [
            {
                "t": policy.t,
                "steps": policy.steps_remaining,
                "entries": [
                    {"x": key(x), "ctrl": key(y), "value": round(values[x], VALUE_DIGITS)}
                    for x, y in policy.table.items()
                ],
            }
            for policy, values in zip(self.policy_seq.policies, self.value_tables)
        ]
        return {"start_t": self.policy_seq.start_t, "policies": policies}


def backwards_induction(
    p: SdpProblem,
    t: int,
    n: int,
    *,
    retain: Retain = "all",
    vt: Optional[ViabilityTable] = None,
    rt: Optional[ReachabilityTable] = None,
    skip_validation: bool = False,
) -> BackwardsInductionResult:
    """
    Compute an optimal policy sequence for the steps ``t .. t + n - 1`` by
    repeatedly prepending optimal extensions to the empty sequence.

    :param SdpProblem p: the problem, validated up to ``t + n`` first
    :param int t: first decision step
    :param int n: number of decisions
    :param str retain: ``"all"`` keeps every value table, ``"last"`` only two at a time
    :param bool skip_validation: the caller already validated ``p`` up to ``t + n``
    :raises IllPosedProblem: validation found violations
    :raises UncheckedMeasure: the measure of ``p`` did not pass the monotonicity check

    >>> from sdpkit.examples import cylinder_det
    >>> backwards_induction(cylinder_det(), 0, 2).value("b")
    8.0
    """
    validate_natural(t, "t")
    validate_natural(n, "n")
    if retain not in ("all", "last"):
        raise SdpError(f"Expected retain to be 'all' or 'last', receives {retain}")
    _require_checked(p, False)
    if not skip_validation:
        # reachability starts at layer 0, so every step before t is checked too
        report = validate(p, t + n)
        if not report.ok:
            raise IllPosedProblem(report)
    vt = vt or ViabilityTable(p, t + n)
    rt = rt or ReachabilityTable(p, t + n)
    logger.info("backwards induction on %s from t=%d for %d steps", p.name, t, n)
    value = ValueTable.terminal(rt, t + n)
    tables = [value]
    seq = PolicySeq(t + n)
    for _ in range(n):
        policy, value = opt_ext(p, vt, rt, value)
        seq = seq.prepend(policy)
        tables = tables + [value] if retain == "all" else [value]
    logger.info("backwards induction on %s done: %d states at t=%d", p.name, len(value.values), t)
    return BackwardsInductionResult(seq, tuple(reversed(tables)), vt, rt, p.key)


__all__ = [
    "Policy",
    "PolicySeq",
    "ValueTable",
    "max_value",
    "argmax",
    "mval",
    "opt_ext",
    "BackwardsInductionResult",
    "backwards_induction",
]
