import pytest
import hypothesis
import hypothesis.strategies as strat

from sdpkit.consts import (
    DETERMINISTIC,
    NON_DETERMINISTIC,
    STOCHASTIC,
)
from sdpkit.laws import (
    LawResult,
    check_container_laws,
    check_measure_monotone,
    containers,
    falsify,
)
from sdpkit.problem import (
    meas_best,
    meas_expected,
    meas_mean_variance,
    meas_worst,
)
from sdpkit.uncertainty import (
    is_empty,
    is_normalized,
)


@pytest.mark.parametrize("kind", [DETERMINISTIC, NON_DETERMINISTIC, STOCHASTIC])
def test_container_laws_hold(kind):
    results = check_container_laws(kind, samples=200, seed=7)
    assert all(law.passed for law in results), [str(law) for law in results if not law.passed]
    assert all(law.name.startswith(f"{kind}:") for law in results)


def test_normalization_law_only_for_stochastic():
    names = [law.name for law in check_container_laws(STOCHASTIC, samples=10)]
    assert names[-1] == f"{STOCHASTIC}:normalization"
    assert len(names) == len(check_container_laws(NON_DETERMINISTIC, samples=10)) + 1


def test_same_seed_same_results():
    assert check_container_laws(STOCHASTIC, 50, seed=3) == check_container_laws(STOCHASTIC, 50, seed=3)
    first = check_measure_monotone(meas_mean_variance, (STOCHASTIC,), 300, seed=5)
    assert first == check_measure_monotone(meas_mean_variance, (STOCHASTIC,), 300, seed=5)


@hypothesis.settings(max_examples=300, deadline=None)
@hypothesis.given(strat.sampled_from([DETERMINISTIC, NON_DETERMINISTIC, STOCHASTIC]).flatmap(
    lambda kind: strat.tuples(strat.just(kind), containers(kind))))
def test_containers_strategy(case):
    kind, m = case
    assert m.kind == kind
    assert not is_empty(m)
    assert is_normalized(m)


def test_falsify_shrinks():
    found = falsify(strat.tuples(strat.integers(0, 1000)), lambda v: f"v={v}" if v >= 10 else None, 200, 0)
    assert found == "v=10"
    assert falsify(strat.tuples(strat.integers(0, 9)), lambda v: None, 50, 0) is None


def test_shipped_measures_pass():
    assert check_measure_monotone(meas_expected, (DETERMINISTIC, STOCHASTIC), 300).passed
    assert check_measure_monotone(meas_worst, samples=300).passed
    assert check_measure_monotone(meas_best, samples=300, name="best") == LawResult("best:monotone", True)


def test_mean_variance_fails_with_counterexample():
    result = check_measure_monotone(meas_mean_variance, (STOCHASTIC,), 1000, name="mean-variance")
    assert not result.passed
    assert result.counterexample is not None and "meas(f)=" in result.counterexample
    assert str(result).startswith("FAIL mean-variance:monotone mx=")
    assert result.to_dict()["passed"] is False


def test_negated_measure_fails_on_a_point_mass():
    result = check_measure_monotone(lambda m: -meas_worst(m), (DETERMINISTIC,), 200, name="negated")
    assert not result.passed
    assert result.counterexample is not None and result.counterexample.startswith("mx=Container(=")


def test_law_result_str():
    assert str(LawResult("stochastic:functor-identity", True)) == "PASS stochastic:functor-identity"
    assert str(LawResult("x", False, "m=1")) == "FAIL x m=1"
