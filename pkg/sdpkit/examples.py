"""
Ready-made problems: a decision maker moving across the five columns of a
cylinder, in a deterministic, a time-dependent, a non-deterministic and a
stochastic variant, and a small knapsack.
"""
import enum
from dataclasses import (
    dataclass,
    field,
)
from typing import (
    Callable,
    Dict,
    Mapping,
    Sequence,
    Tuple,
)

from sdpkit._utils import (
    validate_natural,
    validate_slip,
)
from sdpkit.consts import (
    DEFAULT_SLIP,
    DETERMINISTIC,
    EXAMPLE_CYL_DET,
    EXAMPLE_CYL_NONDET,
    EXAMPLE_CYL_STOCH,
    EXAMPLE_CYL_TIME,
    EXAMPLE_KNAPSACK,
    NON_DETERMINISTIC,
    STOCHASTIC,
)
from sdpkit.exceptions import (
    SdpError,
)
from sdpkit.problem import (
    EXPECTED,
    WORST,
    Measure,
    SdpProblem,
)
from sdpkit.types import (
    UncertaintyKind,
)
from sdpkit.uncertainty import (
    Container,
    distribution,
    nondet,
    single,
)

COLUMNS: Tuple[str, ...] = ("a", "b", "c", "d", "e")
SOURCE_REWARDS: Mapping[str, float] = {"a": 1.0, "b": 3.0, "c": 5.0, "d": 4.0, "e": 7.0}

DEFAULT_KNAPSACK_CAPACITY = 5
DEFAULT_KNAPSACK_ITEMS: Tuple[Tuple[int, float], ...] = ((2, 3.0), (3, 4.0), (4, 5.0), (5, 6.0))


class Move(enum.IntEnum):
    """
    Column offset of a move: left, ahead or right.
    """
    L = -1
    A = 0
    R = 1

    def __str__(self) -> str:
        return self.name


class Pick(enum.IntEnum):
    SKIP = 0
    TAKE = 1

    def __str__(self) -> str:
        return self.name.capitalize()


@dataclass(frozen=True)
class CylinderSpec:
    """
    :param Tuple[str,...] columns: column names in left-to-right order
    :param Mapping[str,float] source_rewards: reward of leaving each column
    :param Mapping[int,Tuple[str,...]] restricted_layers: the valid columns of the steps that do not allow every column
    """
    columns: Tuple[str, ...] = COLUMNS
    source_rewards: Mapping[str, float] = field(default_factory=lambda: dict(SOURCE_REWARDS))
    restricted_layers: Mapping[int, Tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for t, layer in self.restricted_layers.items():
            if not layer or not set(layer) <= set(self.columns):
                raise SdpError(f"Expected a non-empty subset of {self.columns} as the layer of t={t}, receives {layer}")

    def valid_columns(self, t: int) -> Tuple[str, ...]:
        return tuple(self.restricted_layers.get(t, self.columns))

    def destination(self, x: str, y: Move) -> str:
        return self.columns[self.columns.index(x) + y]

    def moves(self, t: int, x: str) -> Tuple[Move, ...]:
        """
        The moves that stay on the cylinder and land in the next layer.
        """
        i = self.columns.index(x)
        target = set(self.valid_columns(t + 1))
        return tuple(
            y for y in Move
            if 0 <= i + y < len(self.columns) and self.columns[i + y] in target
        )

    def reward(self, t: int, x: str, y: Move, x_next: str) -> float:
        return self.source_rewards[x]


def _cylinder(spec: CylinderSpec, kind: UncertaintyKind, outcome: Callable[[str, str], Container[str]], meas: Measure, name: str) -> SdpProblem:
    return SdpProblem(
        kind,
        spec.valid_columns,
        spec.moves,
        lambda t, x, y: outcome(x, spec.destination(x, y)),
        spec.reward,
        meas,
        name=name,
    )


def cylinder_det(spec: CylinderSpec = CylinderSpec()) -> SdpProblem:
    """
    Every column is valid at every step and every move succeeds.

    >>> p = cylinder_det()
    >>> p.step(0, "b", Move.R)
    Container(=c)
    >>> p.reward(0, "b", Move.R, "c")
    3.0
    """
    return _cylinder(spec, DETERMINISTIC, lambda x, intended: single(intended), EXPECTED, EXAMPLE_CYL_DET)


def cylinder_timedep() -> SdpProblem:
    """
    Only ``e`` is valid at step 3 and only ``a``, ``b``, ``c`` at step 6.
    Moves that would leave the next layer are not offered.

    >>> cylinder_timedep().enumerate_states(3)
    ('e',)
    """
    spec = CylinderSpec(restricted_layers={3: ("e",), 6: ("a", "b", "c")})
    return _cylinder(spec, DETERMINISTIC, lambda x, intended: single(intended), EXPECTED, EXAMPLE_CYL_TIME)


def cylinder_nondet(spec: CylinderSpec = CylinderSpec()) -> SdpProblem:
    """
    A move either succeeds or leaves the decision maker in the current column.
    Aggregates with the worst case.
    """
    return _cylinder(spec, NON_DETERMINISTIC, lambda x, intended: nondet((intended, x)), WORST, EXAMPLE_CYL_NONDET)


def cylinder_stoch(slip: float = DEFAULT_SLIP, spec: CylinderSpec = CylinderSpec()) -> SdpProblem:
    """
    A move succeeds with probability ``1 - slip`` and otherwise leaves the
    decision maker in the current column. Aggregates with the expected value.

    :param float slip: probability of staying, in [0, 1)
    :raises InvalidSlip: slip is not in [0, 1)

    >>> cylinder_stoch(0.2).step(0, "b", Move.R)
    Container({b:0.200000000,c:0.800000000})
    """
    validate_slip(slip)
    return _cylinder(
        spec, STOCHASTIC,
        lambda x, intended: distribution([(intended, 1.0 - slip), (x, float(slip))]),
        EXPECTED, EXAMPLE_CYL_STOCH,
    )


def knapsack(
    capacity: int = DEFAULT_KNAPSACK_CAPACITY,
    items: Sequence[Tuple[int, float]] = DEFAULT_KNAPSACK_ITEMS,
) -> SdpProblem:
    """
    Step ``t`` decides on item ``t``; the state is the remaining capacity.
    No decision is left once every item has been considered.

    :param int capacity: initial capacity
    :param Sequence[Tuple[int,float]] items: (weight, value) pairs, weights at least 1
    """
    validate_natural(capacity, "capacity")
    items = tuple((weight, float(value)) for weight, value in items)
    for weight, _ in items:
        if not isinstance(weight, int) or weight < 1:
            raise SdpError(f"Expected item weights to be positive integers, receives {weight}")
    layer = tuple(range(capacity + 1))

    def ctrls(t: int, x: int) -> Tuple[Pick, ...]:
        if t >= len(items):
            return ()
        return (Pick.SKIP, Pick.TAKE) if items[t][0] <= x else (Pick.SKIP,)

    def step(t: int, x: int, y: Pick) -> Container[int]:
        return single(x - items[t][0] if y == Pick.TAKE else x)

    def reward(t: int, x: int, y: Pick, x_next: int) -> float:
        return items[t][1] if y == Pick.TAKE else 0.0

    return SdpProblem(
        DETERMINISTIC, lambda t: layer, ctrls, step, reward, EXPECTED,
        horizon_hint=len(items), name=EXAMPLE_KNAPSACK,
    )


EXAMPLES: Dict[str, Callable[..., SdpProblem]] = {
    EXAMPLE_CYL_DET: cylinder_det,
    EXAMPLE_CYL_TIME: cylinder_timedep,
    EXAMPLE_CYL_NONDET: cylinder_nondet,
    EXAMPLE_CYL_STOCH: cylinder_stoch,
    EXAMPLE_KNAPSACK: knapsack,
}


def load_example(example_id: str, **options: object) -> SdpProblem:
    """
    :param str example_id: one of the keys of :data:`EXAMPLES`
    :raises SdpError: unknown id
    """
    try:
        constructor = EXAMPLES[example_id]
    except KeyError:
        raise SdpError(f"Expected one of {sorted(EXAMPLES)}, receives {example_id}") from None
    return constructor(**options)


__all__ = [
    "COLUMNS",
    "SOURCE_REWARDS",
    "Move",
    "Pick",
    "CylinderSpec",
    "cylinder_det",
    "cylinder_timedep",
    "cylinder_nondet",
    "cylinder_stoch",
    "knapsack",
    "EXAMPLES",
    "load_example",
]
