"""
Problems described in a flat text file.

A problem file is an ini-style document; keys are separated from values by ``=``::

    [problem]
    kind = stochastic
    name = toy

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
    s = 1

    [measure]
    name = expected

Layers not listed are empty. Destinations take a ``:probability`` suffix in
stochastic problems; a single bare destination has probability 1. Rewards
are given per transition ``t x y x'`` or per source state ``x``; the first
form takes precedence and a missing reward is 0.
"""
import configparser
import logging
from typing import (
    Dict,
    List,
    Optional,
    Tuple,
)
from typing_extensions import (
    Literal,
)

from pydantic import (
    BaseModel,
    ConfigDict,
    NonNegativeInt,
    ValidationError,
    model_validator,
)

from sdpkit.consts import (
    DETERMINISTIC,
    MEASURE_EXPECTED,
    MEASURE_WORST,
    NON_DETERMINISTIC,
    STOCHASTIC,
)
from sdpkit.exceptions import (
    InvalidProblemFile,
)
from sdpkit.problem import (
    MEASURES,
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

logger = logging.getLogger(__name__)

ShippedMeasure = Literal["expected", "worst", "best"]


class StepEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    t: NonNegativeInt
    x: str
    y: str
    outcomes: Tuple[Tuple[str, Optional[float]], ...]


class RewardEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    t: NonNegativeInt
    x: str
    y: str
    x_next: str
    value: float


class ProblemFile(BaseModel):
    """
    Validated content of a problem file. Structural errors (unknown states,
    controls without a transition, malformed destinations) are rejected here;
    the well-posedness of the transitions is left to :func:`sdpkit.problem.validate`.
    """
    model_config = ConfigDict(frozen=True)

    kind: UncertaintyKind
    name: str = "problem"
    horizon: Optional[NonNegativeInt] = None
    layers: Dict[NonNegativeInt, Tuple[str, ...]]
    controls: Dict[str, Tuple[str, ...]]
    steps: Tuple[StepEntry, ...] = ()
    rewards: Tuple[RewardEntry, ...] = ()
    source_rewards: Dict[str, float] = {}
    measure: Optional[ShippedMeasure] = None

    @model_validator(mode="after")
    def _check_references(self) -> "ProblemFile":
        declared = set()
        for ctrl_key, ctrls in self.controls.items():
            t, x = _split_ctrl_key(ctrl_key)
            if x not in self.layers.get(t, ()):
                raise ValueError(f"Expected controls for a state of layer {t}, receives {x}")
            declared.update((t, x, y) for y in ctrls)
        given = set()
        for entry in self.steps:
            if (entry.t, entry.x, entry.y) not in declared:
                raise ValueError(f"Expected a transition of a declared control, receives t={entry.t} x={entry.x} y={entry.y}")
            _check_outcomes(self.kind, entry)
            given.add((entry.t, entry.x, entry.y))
        missing = sorted(declared - given)
        if missing:
            t, x, y = missing[0]
            raise ValueError(f"Expected a transition for every control, receives none for t={t} x={x} y={y}")
        if self.measure == MEASURE_EXPECTED and self.kind == NON_DETERMINISTIC:
            raise ValueError(f"Expected worst or best as the measure of a {NON_DETERMINISTIC} problem, receives expected")
        return self

    def default_measure(self) -> str:
        if self.measure is not None:
            return self.measure
        return MEASURE_WORST if self.kind == NON_DETERMINISTIC else MEASURE_EXPECTED

    def to_problem(self) -> SdpProblem:
        layers = {t: tuple(sorted(set(states))) for t, states in self.layers.items()}
        controls = {
            _split_ctrl_key(ctrl_key): tuple(sorted(set(ctrls)))
            for ctrl_key, ctrls in self.controls.items()
        }
        steps = {(e.t, e.x, e.y): e.outcomes for e in self.steps}
        rewards = {(e.t, e.x, e.y, e.x_next): e.value for e in self.rewards}
        kind = self.kind
        source_rewards = dict(self.source_rewards)

        def step(t: int, x: str, y: str) -> Container[str]:
            outcomes = steps[(t, x, y)]
            if kind == DETERMINISTIC:
                return single(outcomes[0][0])
            if kind == NON_DETERMINISTIC:
                return nondet(v for v, _ in outcomes)
            # normalization is reported by validate
            return distribution(((v, 1.0 if p is None else p) for v, p in outcomes), check=False)

        def reward(t: int, x: str, y: str, x_next: str) -> float:
            return rewards.get((t, x, y, x_next), source_rewards.get(x, 0.0))

        return SdpProblem(
            kind,
            lambda t: layers.get(t, ()),
            lambda t, x: controls.get((t, x), ()),
            step,
            reward,
            MEASURES[self.default_measure()],
            horizon_hint=self.horizon,
            name=self.name,
        )


def _split_ctrl_key(ctrl_key: str) -> Tuple[int, str]:
    t, x = ctrl_key.split()
    return int(t), x


def _check_outcomes(kind: UncertaintyKind, entry: StepEntry) -> None:
    where = f"t={entry.t} x={entry.x} y={entry.y}"
    if not entry.outcomes:
        raise ValueError(f"Expected at least one destination, receives none for {where}")
    with_prob = [p is not None for _, p in entry.outcomes]
    if kind == DETERMINISTIC and (len(entry.outcomes) != 1 or any(with_prob)):
        raise ValueError(f"Expected a single bare destination in a {kind} problem, receives {entry.outcomes} for {where}")
    if kind == NON_DETERMINISTIC and any(with_prob):
        raise ValueError(f"Expected bare destinations in a {kind} problem, receives {entry.outcomes} for {where}")
    if kind == STOCHASTIC and len(entry.outcomes) > 1 and not all(with_prob):
        raise ValueError(f"Expected a probability for every destination, receives {entry.outcomes} for {where}")


def _parse_outcome(token: str) -> Tuple[str, Optional[float]]:
    if ":" not in token:
        return token, None
    value, prob = token.rsplit(":", 1)
    return value, float(prob)


def _raw_sections(text: str) -> Dict[str, object]:
    parser = configparser.ConfigParser(delimiters=("=",), interpolation=None)
    parser.optionxform = str  # type: ignore
    parser.read_string(text)

    def section(name: str) -> List[Tuple[str, str]]:
        return list(parser.items(name)) if parser.has_section(name) else []

    problem = dict(section("problem"))
    steps: List[Dict[str, object]] = []
    for key, value in section("step"):
        t, x, y = key.split()
        steps.append({"t": t, "x": x, "y": y, "outcomes": [_parse_outcome(token) for token in value.split()]})
    rewards: List[Dict[str, object]] = []
    source_rewards: Dict[str, str] = {}
    for key, value in section("reward"):
        parts = key.split()
        if len(parts) == 1:
            source_rewards[parts[0]] = value
        elif len(parts) == 4:
            t, x, y, x_next = parts
            rewards.append({"t": t, "x": x, "y": y, "x_next": x_next, "value": value})
        else:
            raise ValueError(f"Expected a reward key 't x y x_next' or 'x', receives '{key}'")
    raw: Dict[str, object] = {
        "kind": problem.get("kind"),
        "layers": {t: value.split() for t, value in section("layers")},
        "controls": {" ".join(key.split()): value.split() for key, value in section("controls")},
        "steps": steps,
        "rewards": rewards,
        "source_rewards": source_rewards,
        "measure": dict(section("measure")).get("name"),
    }
    if "name" in problem:
        raw["name"] = problem["name"]
    if "horizon" in problem:
        raw["horizon"] = problem["horizon"]
    return raw


def parse_problem_file(text: str) -> ProblemFile:
    """
    :raises InvalidProblemFile: the text is not a well-formed problem file
    """
    try:
        return ProblemFile.model_validate(_raw_sections(text))
    except ValidationError as e:
        raise InvalidProblemFile(f"Expected a valid problem file, receives one with {e.error_count()} error(s):\n{e}") from e
    except (configparser.Error, ValueError) as e:
        raise InvalidProblemFile(f"Expected a valid problem file, receives one that fails to parse: {e}") from e


def load_problem_file(path: str) -> ProblemFile:
    """
    :raises InvalidProblemFile: the file is not a well-formed problem file
    """
    logger.debug("reading problem file %s", path)
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise InvalidProblemFile(f"Expected a readable problem file, receives {path}: {e}") from e
    return parse_problem_file(text)


__all__ = [
    "StepEntry",
    "RewardEntry",
    "ProblemFile",
    "parse_problem_file",
    "load_problem_file",
]
