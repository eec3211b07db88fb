"""
Viability and reachability of states, built layer by layer from the
successors of each state and memoized in tables.
"""
import logging
from dataclasses import (
    dataclass,
)
from typing import (
    Dict,
    List,
    Optional,
    Tuple,
)

from sdpkit._utils import (
    validate_natural,
)
from sdpkit.consts import (
    VIOLATION_NO_VIABLE_START,
)
from sdpkit.exceptions import (
    TableMiss,
)
from sdpkit.problem import (
    SdpProblem,
    ValidationReport,
    Violation,
)
from sdpkit.types import (
    CtrlValue,
    StateValue,
)
from sdpkit.uncertainty import (
    Container,
    all_true,
    fmap,
    support,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GoodCtrl:
    """
    A control together with the number of further steps its next states are viable for.
    """
    ctrl: CtrlValue
    feasibility_steps: int


class ViabilityTable:
    """
    Memoized ``viable(n, t, x)`` for every ``t + n <= horizon``.

    Layer ``(t, n)`` is computed from layer ``(t + 1, n - 1)`` on first use and
    never recomputed.

    :param SdpProblem problem: problem the table belongs to
    :param int horizon: last decision step the table may look at
    """
    def __init__(self, problem: SdpProblem, horizon: int) -> None:
        validate_natural(horizon, "horizon")
        self.problem = problem
        self.horizon = horizon
        self._layers: Dict[Tuple[int, int], Dict[StateValue, bool]] = {}

    def covers(self, t: int, n: int) -> bool:
        return t >= 0 and n >= 0 and t + n <= self.horizon

    def layer(self, t: int, n: int) -> Dict[StateValue, bool]:
        """
        :raises TableMiss: ``t + n`` exceeds the horizon of the table
        :return Dict[StateValue,bool]: viability of every state of layer ``t`` for ``n`` steps
        """
        if not self.covers(t, n):
            raise TableMiss(f"Expected t + n <= {self.horizon}, receives t={t} n={n}")
        if (t, n) not in self._layers:
            # built from the deepest missing layer up
            missing = 0
            while missing < n and (t + missing + 1, n - missing - 1) not in self._layers:
                missing += 1
            for k in range(missing, -1, -1):
                self._layers[(t + k, n - k)] = self._build(t + k, n - k)
        return self._layers[(t, n)]

    def _build(self, t: int, n: int) -> Dict[StateValue, bool]:
        p = self.problem
        states = p.enumerate_states(t)
        if n == 0:
            return {x: True for x in states}
        below = self._layers[(t + 1, n - 1)]
        result = {
            x: any(_all_viable(p.step(t, x, y), below) for y in p.enumerate_ctrls(t, x))
            for x in states
        }
        logger.debug("viability layer t=%d n=%d: %d of %d states viable",
                     t, n, sum(result.values()), len(states))
        return result

    def viable(self, n: int, t: int, x: StateValue) -> bool:
        self.problem.check_state(t, x)
        return self.layer(t, n)[x]

    def to_text(self, t: int, max_n: int) -> str:
        """
        Render layer ``t`` as a matrix: one row per state, one column per ``n`` in ``0..max_n``.

        >>> from sdpkit.examples import cylinder_timedep
        >>> print(ViabilityTable(cylinder_timedep(), 3).to_text(0, 3))
        t=0 n=0123
        a 1110
        b 1111
        c 1111
        d 1111
        e 1111
        """
        key = self.problem.key
        header = f"t={t} n=" + "".join(str(n) for n in range(max_n + 1))
        rows = [
            f"{key(x)} " + "".join("1" if self.layer(t, n)[x] else "0" for n in range(max_n + 1))
            for x in self.problem.enumerate_states(t)
        ]
        return "\n".join([header, *rows])


class ReachabilityTable:
    """
    Forward closure of layer 0 under every control, up to ``horizon``.

    Each reachable state past layer 0 stores one witness ``(x, y)`` from the
    previous layer with ``x`` reachable and ``x'`` in ``step(t, x, y)``.

    :param SdpProblem problem: problem the table belongs to
    :param int horizon: last decision step covered
    """
    def __init__(self, problem: SdpProblem, horizon: int) -> None:
        validate_natural(horizon, "horizon")
        self.problem = problem
        self.horizon = horizon
        self._layers: List[Dict[StateValue, bool]] = []
        self._witnesses: List[Dict[StateValue, Tuple[StateValue, CtrlValue]]] = []

    def _extend(self, t: int) -> None:
        p = self.problem
        if not self._layers:
            self._layers.append({x: True for x in p.enumerate_states(0)})
            self._witnesses.append({})
        while len(self._layers) <= t:
            s = len(self._layers) - 1
            witnesses: Dict[StateValue, Tuple[StateValue, CtrlValue]] = {}
            for x, ok in self._layers[s].items():
                if not ok:
                    continue
                for y in p.enumerate_ctrls(s, x):
                    for x_next in support(p.step(s, x, y)):
                        witnesses.setdefault(x_next, (x, y))
            self._layers.append({x: x in witnesses for x in p.enumerate_states(s + 1)})
            self._witnesses.append(witnesses)
            logger.debug("reachability layer t=%d: %d states reachable", s + 1, len(witnesses))

    def layer(self, t: int) -> Dict[StateValue, bool]:
        """
        :raises TableMiss: ``t`` is past the horizon of the table
        """
        if not 0 <= t <= self.horizon:
            raise TableMiss(f"Expected 0 <= t <= {self.horizon}, receives t={t}")
        self._extend(t)
        return self._layers[t]

    def reachable(self, t: int, x: StateValue) -> bool:
        self.problem.check_state(t, x)
        return self.layer(t)[x]

    def witness(self, t: int, x: StateValue) -> Optional[Tuple[StateValue, CtrlValue]]:
        """
        :return Optional[Tuple]: a predecessor ``(x, y)`` at ``t - 1``, or None for layer 0 and unreachable states
        """
        if not self.reachable(t, x) or t == 0:
            return None
        return self._witnesses[t][x]

    def to_text(self) -> str:
        """
        Render the table as a matrix: one row per state of any layer, one column
        per ``t``. ``1`` reachable, ``0`` unreachable, ``.`` not in the layer.
        """
        p = self.problem
        layers = [self.layer(t) for t in range(self.horizon + 1)]
        every = sorted({x for layer in layers for x in layer}, key=p.key)
        header = "t=" + "".join(str(t % 10) for t in range(self.horizon + 1))
        rows = [
            f"{p.key(x)} " + "".join("." if x not in layer else "1" if layer[x] else "0" for layer in layers)
            for x in every
        ]
        return "\n".join([header, *rows])


def _all_viable(mx: Container[StateValue], below: Dict[StateValue, bool]) -> bool:
    return all_true(fmap(lambda x_next: below.get(x_next, False), mx))


def succs(p: SdpProblem, t: int, x: StateValue) -> List[Tuple[CtrlValue, Container[StateValue]]]:
    """
    :raises InvalidState: ``x`` is not in layer ``t``
    :return List[Tuple[CtrlValue,Container]]: each control of ``x`` paired with its possible next states

    >>> from sdpkit.examples import cylinder_det
    >>> succs(cylinder_det(), 0, "a")
    [(<Move.A: 0>, Container(=a)), (<Move.R: 1>, Container(=b))]
    """
    p.check_state(t, x)
    return [(y, p.step(t, x, y)) for y in p.enumerate_ctrls(t, x)]


def feasible(p: SdpProblem, vt: ViabilityTable, n: int, t: int, x: StateValue, y: CtrlValue) -> bool:
    """
    Whether every possible next state of ``(t, x, y)`` is viable for ``n`` steps.

    :raises TableMiss: ``vt`` does not cover layer ``(t + 1, n)``
    """
    p.check_state(t, x)
    return _all_viable(p.step(t, x, y), vt.layer(t + 1, n))


def viable(p: SdpProblem, n: int, t: int, x: StateValue, vt: Optional[ViabilityTable] = None) -> bool:
    """
    Whether some sequence of ``n`` feasible controls starts from ``x`` at step ``t``.
    Builds a table of horizon ``t + n`` when ``vt`` is not given.

    :raises InvalidState: ``x`` is not in layer ``t``

    >>> from sdpkit.examples import cylinder_timedep
    >>> p = cylinder_timedep()
    >>> viable(p, 2, 0, "a"), viable(p, 3, 0, "a")
    (True, False)
    """
    if vt is None:
        vt = ViabilityTable(p, t + n)
    return vt.viable(n, t, x)


def reachable(p: SdpProblem, t: int, x: StateValue, rt: Optional[ReachabilityTable] = None) -> bool:
    """
    Whether ``x`` at step ``t`` is the possible outcome of some controls from layer 0.

    :raises InvalidState: ``x`` is not in layer ``t``
    """
    if rt is None:
        rt = ReachabilityTable(p, t)
    return rt.reachable(t, x)


def good_ctrls(p: SdpProblem, vt: ViabilityTable, t: int, n: int, x: StateValue) -> List[GoodCtrl]:
    """
    :raises InvalidState: ``x`` is not in layer ``t``
    :return List[GoodCtrl]: the controls of ``x`` feasible for ``n``, in enumeration order
    """
    p.check_state(t, x)
    below = vt.layer(t + 1, n)
    return [
        GoodCtrl(y, n) for y in p.enumerate_ctrls(t, x)
        if _all_viable(p.step(t, x, y), below)
    ]


def domain(vt: ViabilityTable, rt: ReachabilityTable, t: int, n: int) -> Tuple[StateValue, ...]:
    """
    :return Tuple[StateValue,...]: states of layer ``t`` that are reachable and viable for ``n``, in layer order
    """
    viable_layer = vt.layer(t, n)
    reachable_layer = rt.layer(t)
    return tuple(x for x in vt.problem.enumerate_states(t) if viable_layer[x] and reachable_layer[x])


def check_start_layer(vt: ViabilityTable, rt: ReachabilityTable, t: int, n: int) -> ValidationReport:
    """
    A problem started at ``t`` for ``n`` steps is well-posed only if some
    reachable state of layer ``t`` is viable for ``n`` steps.

    :return ValidationReport: empty, or a single ``NoViableStart`` violation
    """
    if domain(vt, rt, t, n):
        return ValidationReport()
    return ValidationReport((
        Violation(VIOLATION_NO_VIABLE_START, t, detail=f"no reachable state of layer {t} is viable for {n} steps"),
    ))


__all__ = [
    "GoodCtrl",
    "ViabilityTable",
    "ReachabilityTable",
    "succs",
    "feasible",
    "viable",
    "reachable",
    "good_ctrls",
    "domain",
    "check_start_layer",
]
