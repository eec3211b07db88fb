"""
Property-based law suites for containers and measures.

The checks here are the runtime counterpart of the property tests: they let
``sdpkit verify`` certify the container kind and the measure of a concrete
problem, and they guard :meth:`sdpkit.problem.Measure.custom`. Cases are drawn
and shrunk by hypothesis with a fixed seed, so a report is reproducible and a
failing law carries a minimal counterexample.
"""
import logging
from dataclasses import (
    dataclass,
)
from typing import (
    Any,
    Callable,
    Dict,
    Iterable,
    List,
    Optional,
    Sequence,
    Tuple,
)

import hypothesis
import hypothesis.strategies as strat
from hypothesis.strategies import (
    SearchStrategy,
)

from sdpkit.consts import (
    DEFAULT_LAW_SAMPLES,
    DETERMINISTIC,
    MEAS_MON_TOLERANCE,
    NON_DETERMINISTIC,
    PROB_TOLERANCE,
    STOCHASTIC,
)
from sdpkit.types import (
    LawResultParts,
    UncertaintyKind,
)
from sdpkit.uncertainty import (
    Container,
    all_true,
    bind,
    contains,
    distribution,
    first,
    fmap,
    nondet,
    ret,
    single,
    support,
    tag_members,
    weighted,
)

logger = logging.getLogger(__name__)

ALL_KINDS: Tuple[UncertaintyKind, ...] = (DETERMINISTIC, NON_DETERMINISTIC, STOCHASTIC)
DOMAIN = tuple(range(6))

# describes the failure of a case, None when the case passes
Falsifier = Callable[..., Optional[str]]


@dataclass(frozen=True)
class LawResult:
    name: str
    passed: bool
    counterexample: Optional[str] = None

    def __str__(self) -> str:
        if self.passed:
            return f"PASS {self.name}"
        return f"FAIL {self.name} {self.counterexample}"

    def to_dict(self) -> LawResultParts:
        return {
            "name": self.name,
            "passed": self.passed,
            "counterexample": self.counterexample,
        }


def containers(kind: UncertaintyKind, values: Sequence[int] = DOMAIN, max_size: int = 4) -> SearchStrategy[Container[int]]:
    """
    Strategy drawing small non-empty containers over ``values``.

    :param UncertaintyKind kind: kind of the containers
    :param Sequence[int] values: candidate values
    :param int max_size: largest support drawn, defaults to 4
    """
    if kind == DETERMINISTIC:
        return strat.sampled_from(values).map(single)
    if kind == NON_DETERMINISTIC:
        return strat.lists(strat.sampled_from(values), min_size=1, max_size=max_size).map(nondet)
    return strat.dictionaries(strat.sampled_from(values), strat.integers(1, 4), min_size=1, max_size=max_size).map(
        _normalize_weights
    )


def tables(codomain: Sequence[int] = DOMAIN) -> SearchStrategy[Dict[int, int]]:
    return strat.fixed_dictionaries({v: strat.sampled_from(codomain) for v in DOMAIN})


def kleislis(kind: UncertaintyKind) -> SearchStrategy[Dict[int, Container[int]]]:
    return strat.fixed_dictionaries({v: containers(kind) for v in DOMAIN})


def law_settings(samples: int) -> hypothesis.settings:
    """
    Settings of a runtime law check: ``samples`` examples, derandomized, no
    example database and no output of its own.
    """
    return hypothesis.settings(
        max_examples=samples,
        derandomize=True,
        database=None,
        deadline=None,
        report_multiple_bugs=False,
        suppress_health_check=list(hypothesis.HealthCheck),
        verbosity=hypothesis.Verbosity.quiet,
    )


def falsify(strategy: SearchStrategy[Tuple[Any, ...]], falsifier: Falsifier, samples: int, seed: int) -> Optional[str]:
    """
    Search for a case of ``strategy`` on which ``falsifier`` reports a failure.

    :return Optional[str]: the report on the shrunk case, or None when every case passed
    """
    failures: List[str] = []

    @hypothesis.seed(seed)
    @law_settings(samples)
    @hypothesis.given(strategy)
    def run(case: Tuple[Any, ...]) -> None:
        failure = falsifier(*case)
        if failure is not None:
            failures.append(failure)
            raise AssertionError(failure)

    try:
        run()
    except AssertionError:
        # hypothesis replays the shrunk case last
        return failures[-1]
    return None


def _law(name: str, strategy: SearchStrategy[Tuple[Any, ...]], holds: Callable[..., bool], samples: int, seed: int) -> LawResult:
    def falsifier(*case: Any) -> Optional[str]:
        return None if holds(*case) else " ".join(repr(part) for part in case)

    counterexample = falsify(strategy, falsifier, samples, seed)
    if counterexample is None:
        return LawResult(name, True)
    result = LawResult(name, False, counterexample)
    logger.debug("law failed: %s", result)
    return result


def check_container_laws(kind: UncertaintyKind, samples: int = DEFAULT_LAW_SAMPLES, seed: int = 0) -> List[LawResult]:
    """
    Check the functor and monad laws, the membership laws and the
    normalization law on ``samples`` drawn containers of ``kind``.

    :param UncertaintyKind kind: container kind under test
    :param int samples: examples drawn per law
    :param int seed: seed of the search
    :return List[LawResult]: one result per law, in a fixed order
    """
    ms, xs = containers(kind), strat.sampled_from(DOMAIN)
    ks = kleislis(kind)
    preds = strat.fixed_dictionaries({v: strat.booleans() for v in DOMAIN})

    def law(name: str, holds: Callable[..., bool], *parts: SearchStrategy[Any]) -> LawResult:
        return _law(f"{kind}:{name}", strat.tuples(*parts), holds, samples, seed)

    results = [
        law("functor-identity", lambda m: fmap(lambda v: v, m) == m, ms),
        law("functor-composition",
            lambda m, f, g: fmap(lambda v: f[g[v]], m) == fmap(f.__getitem__, fmap(g.__getitem__, m)),
            ms, tables(), tables()),
        law("monad-ret-natural", lambda a, f: fmap(f.__getitem__, ret(kind, a)) == ret(kind, f[a]), xs, tables()),
        law("monad-left-identity", lambda a, k: bind(ret(kind, a), k.__getitem__) == k[a], xs, ks),
        law("monad-right-identity", lambda m: bind(m, lambda v: ret(kind, v)) == m, ms),
        law("monad-associativity",
            lambda m, k, h: bind(bind(m, k.__getitem__), h.__getitem__) == bind(m, lambda v: bind(k[v], h.__getitem__)),
            ms, ks, ks),
        law("all-true-ret", lambda b: all_true(ret(kind, b)) == b, strat.booleans()),
        law("is-in-all-true",
            lambda m, p: not all_true(fmap(p.__getitem__, m)) or all(p[x] for x in DOMAIN if contains(x, m)),
            ms, preds),
        law("to-sub", lambda m: fmap(first, tag_members(m)) == m, ms),
        law("canonical-determinism",
            lambda m, k, f: _same_entries(fmap(f.__getitem__, bind(m, k.__getitem__)), bind(m, lambda v: fmap(f.__getitem__, k[v]))),
            ms, ks, tables()),
    ]
    if kind == STOCHASTIC:
        results.append(law("normalization", lambda m, f, k: _normalized(bind(fmap(f.__getitem__, m), k.__getitem__)),
                           ms, tables(), ks))
    return results


def check_measure_monotone(
    meas: Callable[[Container[float]], float],
    kinds: Iterable[UncertaintyKind] = ALL_KINDS,
    samples: int = DEFAULT_LAW_SAMPLES,
    seed: int = 0,
    name: str = "measure",
) -> LawResult:
    """
    Check that ``meas`` is monotone: for drawn containers ``mx`` and functions
    ``f <= g`` on the support, ``meas(fmap(f, mx)) <= meas(fmap(g, mx))`` up to
    :data:`~sdpkit.consts.MEAS_MON_TOLERANCE`.

    :param Callable meas: the measure under test
    :param Iterable[UncertaintyKind] kinds: container kinds the measure accepts
    :param int samples: examples drawn
    :param int seed: seed of the search
    :param str name: name used in the result
    :return LawResult: the shrunk counterexample, if any
    """
    cases = strat.tuples(
        strat.sampled_from(tuple(kinds)).flatmap(containers),
        strat.fixed_dictionaries({v: strat.floats(-10.0, 10.0) for v in DOMAIN}),
        strat.fixed_dictionaries({v: strat.floats(0.0, 10.0) for v in DOMAIN}),
    )

    def falsifier(mx: Container[int], f: Dict[int, float], lift: Dict[int, float]) -> Optional[str]:
        low = meas(fmap(f.__getitem__, mx))
        high = meas(fmap(lambda v: f[v] + lift[v], mx))
        if low <= high + MEAS_MON_TOLERANCE:
            return None
        return f"mx={mx!r} meas(f)={low} meas(g)={high}"

    counterexample = falsify(cases, falsifier, samples, seed)
    if counterexample is None:
        return LawResult(f"{name}:monotone", True)
    logger.debug("measure %s is not monotone: %s", name, counterexample)
    return LawResult(f"{name}:monotone", False, counterexample)


def _normalize_weights(weights: Dict[int, int]) -> Container[int]:
    total = sum(weights.values())
    return distribution([(v, w / total) for v, w in weights.items()])


def _normalized(m: Container[int]) -> bool:
    return abs(sum(p for _, p in weighted(m)) - 1.0) <= PROB_TOLERANCE


def _same_entries(left: Container[int], right: Container[int]) -> bool:
    return support(left) == support(right) and left == right


__all__ = [
    "ALL_KINDS",
    "DOMAIN",
    "LawResult",
    "containers",
    "tables",
    "kleislis",
    "law_settings",
    "falsify",
    "check_container_laws",
    "check_measure_monotone",
]
