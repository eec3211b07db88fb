"""
Brute-force ground truth for small instances: exhaustive enumeration of
control sequences and policy sequences, and the optimality checks built on it.
"""
import itertools
import logging
import math
from dataclasses import (
    dataclass,
)
from typing import (
    ClassVar,
    Iterator,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
    Type,
)

from sdpkit._utils import (
    validate_cap,
    validate_natural,
)
from sdpkit.consts import (
    DEFAULT_CAP,
    DETERMINISTIC,
    VALUE_DIGITS,
    VALUE_TOLERANCE,
)
from sdpkit.exceptions import (
    NotDeterministic,
    NotViable,
    SdpError,
    TooLarge,
    UncheckedMeasure,
)
from sdpkit.problem import (
    SdpProblem,
)
from sdpkit.solver import (
    Policy,
    PolicySeq,
    ValueTable,
    mval,
    opt_ext,
)
from sdpkit.types import (
    CheckReportParts,
    CtrlValue,
    StateValue,
)
from sdpkit.uncertainty import (
    support,
)
from sdpkit.viability import (
    ReachabilityTable,
    ViabilityTable,
    domain,
    good_ctrls,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CtrlSeq:
    start_t: int
    start_x: StateValue
    ctrls: Tuple[CtrlValue, ...] = ()

    def __len__(self) -> int:
        return len(self.ctrls)


@dataclass(frozen=True)
class CheckReport:
    """
    Outcome of an optimality check. A failing report names the start state
    and the largest gap by which an enumerated policy sequence beats the
    checked one.
    """
    name: str
    passed: bool
    t: Optional[int] = None
    x: Optional[str] = None
    gap: Optional[float] = None
    evaluated: int = 0

    @property
    def detail(self) -> str:
        if self.passed:
            return ""
        return f"t={self.t} x={self.x} gap={self.gap:.{VALUE_DIGITS}f}"

    def __str__(self) -> str:
        if self.passed:
            return "PASS"
        return f"FAIL {self.detail}"

    def to_dict(self) -> CheckReportParts:
        return {
            "name": self.name,
            "passed": self.passed,
            "t": self.t,
            "x": self.x,
            "gap": None if self.gap is None else round(self.gap, VALUE_DIGITS),
            "evaluated": self.evaluated,
        }


def enum_ctrl_seqs(p: SdpProblem, t: int, n: int, x: StateValue, vt: Optional[ViabilityTable] = None) -> List[CtrlSeq]:
    """
    Every sequence of ``n`` controls from ``x`` at step ``t`` in which each
    control is feasible for the steps left after it.

    :raises NotDeterministic: ``p`` is not deterministic
    :raises NotViable: ``x`` is not viable for ``n`` steps

    >>> from sdpkit.examples import cylinder_det
    >>> len(enum_ctrl_seqs(cylinder_det(), 0, 2, "c"))
    9
    """
    if p.kind != DETERMINISTIC:
        raise NotDeterministic(f"Expected a {DETERMINISTIC} problem, receives a {p.kind} one")
    validate_natural(n, "n")
    vt = vt or ViabilityTable(p, t + n)
    if not vt.viable(n, t, x):
        raise NotViable(f"Expected a state viable for {n} steps at t={t}, receives {p.key(x)}")

    def extend(s: int, state: StateValue, left: int) -> Iterator[Tuple[CtrlValue, ...]]:
        if left == 0:
            yield ()
            return
        for good in good_ctrls(p, vt, s, left - 1, state):
            (x_next,) = support(p.step(s, state, good.ctrl))
            for rest in extend(s + 1, x_next, left - 1):
                yield (good.ctrl, *rest)

    return [CtrlSeq(t, x, ctrls) for ctrls in extend(t, x, n)]


def seq_value(p: SdpProblem, cs: CtrlSeq) -> float:
    """
    Sum of the rewards along the states induced by ``cs``.

    >>> from sdpkit.examples import Move, cylinder_det
    >>> R, A = Move.R, Move.A
    >>> seq_value(cylinder_det(), CtrlSeq(0, "b", (R, R, A, A)))
    16.0
    """
    if p.kind != DETERMINISTIC:
        raise NotDeterministic(f"Expected a {DETERMINISTIC} problem, receives a {p.kind} one")
    total, x = 0.0, cs.start_x
    for i, y in enumerate(cs.ctrls):
        (x_next,) = support(p.step(cs.start_t + i, x, y))
        total += p.reward(cs.start_t + i, x, y, x_next)
        x = x_next
    return total


def _domains(
    p: SdpProblem,
    vt: ViabilityTable,
    rt: ReachabilityTable,
    t: int,
    n: int,
    start: Optional[StateValue],
) -> List[Tuple[StateValue, ...]]:
    if start is None:
        return [domain(vt, rt, t + i, n - i) for i in range(n)]
    domains: List[Tuple[StateValue, ...]] = []
    current: Sequence[StateValue] = (start,) if n else ()
    for i in range(n):
        domains.append(tuple(current))
        if i + 1 == n:
            break
        reached: Set[StateValue] = set()
        for x in current:
            for good in good_ctrls(p, vt, t + i, n - i - 1, x):
                reached.update(support(p.step(t + i, x, good.ctrl)))
        current = [x for x in p.enumerate_states(t + i + 1) if x in reached]
    return domains


def _choices(p: SdpProblem, vt: ViabilityTable, t: int, n: int, domains: List[Tuple[StateValue, ...]]) -> List[List[Tuple[CtrlValue, ...]]]:
    return [
        [tuple(good.ctrl for good in good_ctrls(p, vt, t + i, n - i - 1, x)) for x in states]
        for i, states in enumerate(domains)
    ]


def _count(choices: List[List[Tuple[CtrlValue, ...]]]) -> int:
    return math.prod(len(ctrls) for layer in choices for ctrls in layer)


def count_policy_seqs(
    p: SdpProblem,
    vt: ViabilityTable,
    rt: ReachabilityTable,
    t: int,
    n: int,
    start: Optional[StateValue] = None,
) -> int:
    """
    :return int: the product over every layer and every state of its domain of the number of good controls
    """
    return _count(_choices(p, vt, t, n, _domains(p, vt, rt, t, n, start)))


def enum_policy_seqs(
    p: SdpProblem,
    vt: ViabilityTable,
    rt: ReachabilityTable,
    t: int,
    n: int,
    cap: Optional[int] = None,
    start: Optional[StateValue] = None,
) -> Iterator[PolicySeq]:
    """
    Every policy sequence for the steps ``t .. t + n - 1`` whose policies are
    defined exactly on the reachable viable states, in canonical order.
    With ``start``, the domains shrink to the states visited from ``start``.

    The count is checked against ``cap`` before anything is enumerated.

    :param Optional[int] cap: largest number of sequences allowed, defaults to :attr:`Oracle.default_cap`
    :raises TooLarge: more than ``cap`` sequences
    """
    cap = Oracle.default_cap if cap is None else cap
    validate_cap(cap)
    domains = _domains(p, vt, rt, t, n, start)
    choices = _choices(p, vt, t, n, domains)
    count = _count(choices)
    if count > cap:
        raise TooLarge(count, cap)
    logger.debug("enumerating %d policy sequences at t=%d n=%d", count, t, n)

    def generate() -> Iterator[PolicySeq]:
        per_layer = [
            [
                Policy(t + i, n - i, dict(zip(domains[i], picks)))
                for picks in itertools.product(*choices[i])
            ]
            for i in range(n)
        ]
        for policies in itertools.product(*per_layer):
            yield PolicySeq(t, policies)

    return generate()


def _tables(p: SdpProblem, ps: PolicySeq, vt: Optional[ViabilityTable], rt: Optional[ReachabilityTable]) -> Tuple[ViabilityTable, ReachabilityTable]:
    horizon = ps.start_t + len(ps)
    return vt or ViabilityTable(p, horizon), rt or ReachabilityTable(p, horizon)


def check_opt_policy_seq(
    p: SdpProblem,
    ps: PolicySeq,
    cap: Optional[int] = None,
    *,
    vt: Optional[ViabilityTable] = None,
    rt: Optional[ReachabilityTable] = None,
    allow_unchecked: bool = False,
    name: str = "opt-policy-seq",
) -> CheckReport:
    """
    Check that no enumerated policy sequence beats ``ps`` by more than
    :data:`~sdpkit.consts.VALUE_TOLERANCE` from any reachable start viable
    for ``len(ps)`` steps. The cap bounds the number of (sequence, start)
    pairs evaluated.

    :raises TooLarge: more pairs than ``cap``
    :raises UncheckedMeasure: the measure is unchecked and ``allow_unchecked`` is False
    :return CheckReport: the largest gap found, the first start in layer order among ties
    """
    if not p.meas.checked and not allow_unchecked:
        raise UncheckedMeasure(f"Expected a measure that passed the monotonicity check, "
                               f"receives the unchecked measure {p.meas.name}")
    cap = Oracle.default_cap if cap is None else cap
    validate_cap(cap)
    vt, rt = _tables(p, ps, vt, rt)
    t, n = ps.start_t, len(ps)
    if n == 0:
        return CheckReport(name, True)
    starts = domain(vt, rt, t, n)
    total = sum(count_policy_seqs(p, vt, rt, t, n, x) for x in starts)
    if total > cap:
        raise TooLarge(total, cap)
    worst: Optional[Tuple[float, StateValue]] = None
    evaluated = 0
    for x in starts:
        target = mval(p, ps, t, n, x)
        for other in enum_policy_seqs(p, vt, rt, t, n, cap, start=x):
            evaluated += 1
            gap = mval(p, other, t, n, x) - target
            if gap > VALUE_TOLERANCE and (worst is None or gap > worst[0]):
                worst = (gap, x)
    logger.debug("%s at t=%d n=%d: %d pairs evaluated", name, t, n, evaluated)
    if worst is None:
        return CheckReport(name, True, evaluated=evaluated)
    return CheckReport(name, False, t, p.key(worst[1]), worst[0], evaluated)


def check_bellman(
    p: SdpProblem,
    ps: PolicySeq,
    cap: Optional[int] = None,
    *,
    vt: Optional[ViabilityTable] = None,
    rt: Optional[ReachabilityTable] = None,
    allow_unchecked: bool = False,
) -> CheckReport:
    """
    Given ``ps`` at ``(t + 1, n)``, check that it is optimal, extend it
    optimally by one step and check that the extension is optimal at ``(t, n + 1)``.

    :raises SdpError: ``ps`` starts at step 0
    :raises TooLarge: either enumeration exceeds ``cap``
    :return CheckReport: the failing report of the tail, if any, else the report of the extension
    """
    if ps.start_t < 1:
        raise SdpError(f"Expected a policy sequence starting after step 0, receives one at t={ps.start_t}")
    vt, rt = _tables(p, ps, vt, rt)
    t, n = ps.start_t - 1, len(ps)
    tail = check_opt_policy_seq(p, ps, cap, vt=vt, rt=rt, allow_unchecked=allow_unchecked, name="bellman")
    if not tail.passed:
        return tail
    value_next = ValueTable(t + 1, n, {x: mval(p, ps, t + 1, n, x) for x in domain(vt, rt, t + 1, n)})
    policy, _ = opt_ext(p, vt, rt, value_next, allow_unchecked=allow_unchecked)
    extended = ps.prepend(policy)
    report = check_opt_policy_seq(p, extended, cap, vt=vt, rt=rt, allow_unchecked=allow_unchecked, name="bellman")
    return CheckReport(report.name, report.passed, report.t, report.x, report.gap, tail.evaluated + report.evaluated)


class OracleMeta(type):
    """
    Metaclass of :class:`Oracle` adding a validating setter to :attr:`Oracle.default_cap`
    """
    @property
    def default_cap(cls) -> int:
        return cls._default_cap  # type: ignore

    @default_cap.setter
    def default_cap(cls, new_default: int) -> None:
        validate_cap(new_default)
        cls._default_cap = new_default


class Oracle(metaclass=OracleMeta):
    """
    Entry point of the brute-force checks with a configurable enumeration cap.

    | The cap is the largest number of policy sequences, or of (policy sequence, start)
      pairs, an enumeration may produce. Use :func:`get_oracle_factory` for a
      different default without touching the global one.

    >>> Oracle.default_cap
    1000000
    >>> small = get_oracle_factory(default_cap=100)
    >>> small.default_cap
    100
    >>> small.default_cap = 0
    Traceback (most recent call last):
        ...
    sdpkit.exceptions.SdpError: Expected cap to be a positive integer. Receives 0 of type <class 'int'>
    """
    _default_cap: ClassVar[int] = DEFAULT_CAP
    default_cap: ClassVar[int]

    @classmethod
    def enum_policy_seqs(
        cls,
        p: SdpProblem,
        vt: ViabilityTable,
        rt: ReachabilityTable,
        t: int,
        n: int,
        start: Optional[StateValue] = None,
    ) -> Iterator[PolicySeq]:
        return enum_policy_seqs(p, vt, rt, t, n, cls.default_cap, start)

    @classmethod
    def check_opt_policy_seq(cls, p: SdpProblem, ps: PolicySeq, **kwargs: object) -> CheckReport:
        return check_opt_policy_seq(p, ps, cls.default_cap, **kwargs)  # type: ignore

    @classmethod
    def check_bellman(cls, p: SdpProblem, ps: PolicySeq, **kwargs: object) -> CheckReport:
        return check_bellman(p, ps, cls.default_cap, **kwargs)  # type: ignore


def get_oracle_factory(default_cap: int) -> Type[Oracle]:
    """
    Generate a new :class:`Oracle` class object with ``default_cap``
    so the class variable does not influence the global :attr:`Oracle.default_cap`

    :param int default_cap: default enumeration cap
    :return Type[Oracle]: a class object of Oracle with default_cap
    """
    validate_cap(default_cap)
    return type(
        "Oracle",
        (Oracle,),
        {
            "_default_cap": default_cap
        }
    )


__all__ = [
    "CtrlSeq",
    "CheckReport",
    "enum_ctrl_seqs",
    "seq_value",
    "count_policy_seqs",
    "enum_policy_seqs",
    "check_opt_policy_seq",
    "check_bellman",
    "Oracle",
    "OracleMeta",
    "get_oracle_factory",
]
