from typing import (
    Any,
    Callable,
    List,
    Optional,
)
from typing_extensions import (
    Literal,
    TypedDict,
)

UncertaintyKind = Literal[
    "deterministic",
    "nondeterministic",
    "stochastic",
]

ViolationKind = Literal[
    "EmptyStep",
    "LayerViolation",
    "NormalizationViolation",
    "StepError",
    "OrderViolation",
    "NoViableStart",
]

# states and controls are opaque: hashable, totally ordered, rendered by the problem's key function
StateValue = Any
CtrlValue = Any
KeyFn = Callable[[Any], str]


class ViolationParts(TypedDict):
    kind: ViolationKind
    t: int
    x: Optional[str]
    y: Optional[str]
    detail: str


class PolicyEntryParts(TypedDict):
    x: str
    ctrl: str
    value: float


class PolicyParts(TypedDict):
    t: int
    steps: int
    entries: List[PolicyEntryParts]


class PolicySeqParts(TypedDict):
    start_t: int
    policies: List[PolicyParts]


class TrajectoryStepParts(TypedDict):
    t: int
    x: str
    y: str


class TrajectoryParts(TypedDict):
    prob: Optional[float]
    steps: List[TrajectoryStepParts]
    final: str
    value: float


class CheckReportParts(TypedDict):
    name: str
    passed: bool
    t: Optional[int]
    x: Optional[str]
    gap: Optional[float]
    evaluated: int


class LawResultParts(TypedDict):
    name: str
    passed: bool
    counterexample: Optional[str]
