"""
The user-facing description of a sequential decision problem and the
checks that make it well-posed.
"""
import logging
from dataclasses import (
    dataclass,
    field,
)
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Optional,
    Sequence,
    Tuple,
)

from sdpkit._utils import (
    validate_kind,
    validate_natural,
)
from sdpkit.consts import (
    DEFAULT_LAW_SAMPLES,
    DETERMINISTIC,
    MEASURE_BEST,
    MEASURE_EXPECTED,
    MEASURE_MEAN_VARIANCE,
    MEASURE_WORST,
    NON_DETERMINISTIC,
    STOCHASTIC,
    VIOLATION_EMPTY_STEP,
    VIOLATION_LAYER,
    VIOLATION_NORMALIZATION,
    VIOLATION_ORDER,
    VIOLATION_STEP_ERROR,
)
from sdpkit.exceptions import (
    EmptyContainer,
    InvalidDistribution,
    InvalidState,
    KindMismatch,
    NonMonotoneMeasure,
    SdpError,
)
from sdpkit.laws import (
    ALL_KINDS,
    check_measure_monotone,
)
from sdpkit.types import (
    CtrlValue,
    StateValue,
    UncertaintyKind,
    ViolationKind,
    ViolationParts,
)
from sdpkit.uncertainty import (
    Container,
    is_empty,
    is_normalized,
    support,
    weighted,
)

logger = logging.getLogger(__name__)

StatesFn = Callable[[int], Sequence[StateValue]]
CtrlsFn = Callable[[int, StateValue], Sequence[CtrlValue]]
StepFn = Callable[[int, StateValue, CtrlValue], Container[StateValue]]
RewardFn = Callable[[int, StateValue, CtrlValue, StateValue], float]
MeasFn = Callable[[Container[float]], float]


def meas_expected(m: Container[float]) -> float:
    """
    Expected value over the canonical support; a deterministic container is a point mass.

    :raises KindMismatch: ``m`` is non-deterministic

    >>> from sdpkit.uncertainty import distribution
    >>> meas_expected(distribution([(0.0, 0.2), (10.0, 0.8)]))
    8.0
    """
    return sum(v * p for v, p in weighted(m))


def meas_worst(m: Container[float]) -> float:
    """
    :raises EmptyContainer: ``m`` holds no value
    :return float: the smallest contained value
    """
    values = support(m)
    if not values:
        raise EmptyContainer("Expected a non-empty container, receives an empty one")
    return min(values)


def meas_best(m: Container[float]) -> float:
    """
    :raises EmptyContainer: ``m`` holds no value
    :return float: the largest contained value
    """
    values = support(m)
    if not values:
        raise EmptyContainer("Expected a non-empty container, receives an empty one")
    return max(values)


def meas_mean_variance(m: Container[float]) -> float:
    """
    Mean minus variance. Not monotone, kept only to demonstrate what goes
    wrong without monotonicity; see :data:`MEAN_VARIANCE`.
    """
    entries = weighted(m)
    mean = sum(v * p for v, p in entries)
    return mean - sum(p * (v - mean) ** 2 for v, p in entries)


@dataclass(frozen=True)
class Measure:
    """
    A named aggregation of a container of values into one value.

    Only measures with ``checked=True`` are accepted by
    :func:`sdpkit.solver.backwards_induction`. Build custom ones through
    :meth:`custom`, which runs the monotonicity harness first.

    :param str name: name shown in reports
    :param Callable fn: the aggregation
    :param Tuple[UncertaintyKind,...] kinds: container kinds ``fn`` accepts
    :param bool checked: whether the measure passed the monotonicity harness
    """
    name: str
    fn: MeasFn = field(compare=False)
    kinds: Tuple[UncertaintyKind, ...] = ALL_KINDS
    checked: bool = True

    def __call__(self, m: Container[float]) -> float:
        return self.fn(m)

    @classmethod
    def custom(
        cls,
        fn: MeasFn,
        name: str,
        kinds: Iterable[UncertaintyKind] = ALL_KINDS,
        samples: int = DEFAULT_LAW_SAMPLES,
        seed: int = 0,
    ) -> "Measure":
        """
        Wrap a user-supplied measure after checking its monotonicity.

        :raises NonMonotoneMeasure: the harness found ``f <= g`` with ``meas(fmap(f, mx)) > meas(fmap(g, mx))``
        :return Measure: a checked measure

        >>> Measure.custom(meas_worst, "worst").checked
        True
        """
        kinds = tuple(kinds)
        result = check_measure_monotone(fn, kinds, samples, seed, name)
        if not result.passed:
            raise NonMonotoneMeasure(f"Expected a monotone measure, {name} is not: {result.counterexample}")
        return cls(name, fn, kinds, True)

    @classmethod
    def unchecked(cls, fn: MeasFn, name: str, kinds: Iterable[UncertaintyKind] = ALL_KINDS) -> "Measure":
        return cls(name, fn, tuple(kinds), False)


EXPECTED = Measure(MEASURE_EXPECTED, meas_expected, (DETERMINISTIC, STOCHASTIC))
WORST = Measure(MEASURE_WORST, meas_worst)
BEST = Measure(MEASURE_BEST, meas_best)
MEAN_VARIANCE = Measure.unchecked(meas_mean_variance, MEASURE_MEAN_VARIANCE, (DETERMINISTIC, STOCHASTIC))

MEASURES: Dict[str, Measure] = {
    EXPECTED.name: EXPECTED,
    WORST.name: WORST,
    BEST.name: BEST,
}


class SdpProblem:
    """
    A finite-horizon sequential decision problem.

    State layers, control spaces and transitions are supplied as functions of
    the decision step ``t``. A state is valid at ``t`` iff it belongs to
    ``enumerate_states(t)``. Results of the supplied functions are cached, so
    they must be pure.

    :param UncertaintyKind kind: kind of the containers returned by ``step``
    :param Callable states: ``t -> layer``, sorted and duplicate-free
    :param Callable ctrls: ``(t, x) -> controls``, sorted and duplicate-free
    :param Callable step: ``(t, x, y) -> container of next states``
    :param Callable reward: ``(t, x, y, x') -> float``
    :param Measure meas: aggregation of possible values
    :param Callable key: canonical string key of states and controls, defaults to str
    :param Optional[int] horizon_hint: documentation only
    :param str name: name shown in logs and reports
    :raises KindMismatch: ``meas`` does not accept containers of ``kind``
    """
    def __init__(
        self,
        kind: UncertaintyKind,
        states: StatesFn,
        ctrls: CtrlsFn,
        step: StepFn,
        reward: RewardFn,
        meas: Measure,
        *,
        key: Callable[[object], str] = str,
        horizon_hint: Optional[int] = None,
        name: str = "problem",
    ) -> None:
        validate_kind(kind)
        if kind not in meas.kinds:
            raise KindMismatch(f"Expected a measure accepting {kind} containers, receives {meas.name}, "
                               f"which accepts {', '.join(meas.kinds)}")
        self.kind: UncertaintyKind = kind
        self.meas = meas
        self.key = key
        self.horizon_hint = horizon_hint
        self.name = name
        self._states = states
        self._ctrls = ctrls
        self._step = step
        self._reward = reward
        self._layers: Dict[int, Tuple[StateValue, ...]] = {}
        self._layer_sets: Dict[int, FrozenSet[StateValue]] = {}
        self._ctrl_cache: Dict[Tuple[int, StateValue], Tuple[CtrlValue, ...]] = {}
        self._step_cache: Dict[Tuple[int, StateValue, CtrlValue], Container[StateValue]] = {}

    def __repr__(self) -> str:
        return f"SdpProblem(name={self.name!r}, kind={self.kind!r}, meas={self.meas.name!r})"

    def enumerate_states(self, t: int) -> Tuple[StateValue, ...]:
        if t not in self._layers:
            self._layers[t] = tuple(self._states(t))
        return self._layers[t]

    def in_layer(self, t: int, x: StateValue) -> bool:
        if t not in self._layer_sets:
            self._layer_sets[t] = frozenset(self.enumerate_states(t))
        return x in self._layer_sets[t]

    def check_state(self, t: int, x: StateValue) -> None:
        """
        :raises InvalidState: ``x`` is not in the layer of step ``t``
        """
        if not self.in_layer(t, x):
            raise InvalidState(f"Expected a state of layer {t}, receives {self.key(x)}")

    def enumerate_ctrls(self, t: int, x: StateValue) -> Tuple[CtrlValue, ...]:
        if (t, x) not in self._ctrl_cache:
            self._ctrl_cache[(t, x)] = tuple(self._ctrls(t, x))
        return self._ctrl_cache[(t, x)]

    def step(self, t: int, x: StateValue, y: CtrlValue) -> Container[StateValue]:
        if (t, x, y) not in self._step_cache:
            mx = self._step(t, x, y)
            if mx.kind != self.kind:
                raise KindMismatch(f"Expected step to return a {self.kind} container, "
                                   f"receives a {mx.kind} container at t={t} x={self.key(x)} y={self.key(y)}")
            self._step_cache[(t, x, y)] = mx
        return self._step_cache[(t, x, y)]

    def reward(self, t: int, x: StateValue, y: CtrlValue, x_next: StateValue) -> float:
        return float(self._reward(t, x, y, x_next))

    def with_measure(self, meas: Measure) -> "SdpProblem":
        """
        :return SdpProblem: the same problem aggregated with another measure
        """
        return SdpProblem(
            self.kind, self._states, self._ctrls, self._step, self._reward, meas,
            key=self.key, horizon_hint=self.horizon_hint, name=self.name,
        )


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    t: int
    x: Optional[str] = None
    y: Optional[str] = None
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind} t={self.t} x={self.x or '-'} y={self.y or '-'} detail={self.detail}"

    def to_dict(self) -> ViolationParts:
        return {
            "kind": self.kind,
            "t": self.t,
            "x": self.x,
            "y": self.y,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        return "\n".join(str(v) for v in self.violations)

    def extend(self, violations: Iterable[Violation]) -> "ValidationReport":
        return ValidationReport(self.violations + tuple(violations))

    def to_list(self) -> List[ViolationParts]:
        return [v.to_dict() for v in self.violations]


def validate(p: SdpProblem, max_t: int) -> ValidationReport:
    """
    Check the well-posedness preconditions of ``p`` for every step ``t <= max_t``:
    sorted, duplicate-free layers and control spaces, and for every control a
    non-empty, normalized ``step`` output that lands in layer ``t + 1``.

    :param SdpProblem p: problem to check
    :param int max_t: last decision step checked
    :return ValidationReport: every violation found, in (t, x, y) order
    """
    validate_natural(max_t, "max_t")
    violations: List[Violation] = []
    key = p.key
    for t in range(max_t + 1):
        layer = p.enumerate_states(t)
        if not _strictly_sorted(layer):
            violations.append(Violation(VIOLATION_ORDER, t, detail="layer is not sorted and duplicate-free"))
        for x in layer:
            ctrls = p.enumerate_ctrls(t, x)
            if not _strictly_sorted(ctrls):
                violations.append(Violation(VIOLATION_ORDER, t, key(x), detail="controls are not sorted and duplicate-free"))
            for y in ctrls:
                try:
                    mx = p.step(t, x, y)
                except InvalidDistribution as e:
                    violations.append(Violation(VIOLATION_NORMALIZATION, t, key(x), key(y), str(e)))
                    continue
                except SdpError as e:
                    violations.append(Violation(VIOLATION_STEP_ERROR, t, key(x), key(y), str(e)))
                    continue
                if is_empty(mx):
                    violations.append(Violation(VIOLATION_EMPTY_STEP, t, key(x), key(y), "step returned an empty container"))
                    continue
                if not is_normalized(mx):
                    total = sum(prob for _, prob in mx.payload.entries)
                    violations.append(Violation(VIOLATION_NORMALIZATION, t, key(x), key(y), f"probabilities sum to {total}"))
                outside = [key(x_next) for x_next in support(mx) if not p.in_layer(t + 1, x_next)]
                if outside:
                    violations.append(Violation(VIOLATION_LAYER, t, key(x), key(y), f"{','.join(outside)} not in layer {t + 1}"))
    logger.debug("validated %s up to t=%d: %d violation(s)", p.name, max_t, len(violations))
    return ValidationReport(tuple(violations))


def _strictly_sorted(values: Sequence[object]) -> bool:
    try:
        return all(a < b for a, b in zip(values, values[1:]))  # type: ignore
    except TypeError:
        return False


__all__ = [
    "meas_expected",
    "meas_worst",
    "meas_best",
    "meas_mean_variance",
    "Measure",
    "EXPECTED",
    "WORST",
    "BEST",
    "MEAN_VARIANCE",
    "MEASURES",
    "SdpProblem",
    "Violation",
    "ValidationReport",
    "validate",
]
