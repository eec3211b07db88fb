"""
Command line front end::

    sdpkit solve cyl-det --steps 4
    sdpkit trajectories cyl-stoch --start b --steps 2 --slip 0.2
    sdpkit verify cyl-det --steps 3 --cap 100000
    sdpkit validate path/to/problem.ini --steps 5

The problem argument is a registered example id or the path of a problem file.
"""
import argparse
import json
import logging
import sys
from typing import (
    Any,
    Dict,
    List,
    Optional,
    Sequence,
    Tuple,
)

from sdpkit.consts import (
    DEFAULT_LAW_SAMPLES,
    EXAMPLE_CYL_STOCH,
    EXIT_CHECK_FAILED,
    EXIT_DOMAIN,
    EXIT_ILL_POSED,
    EXIT_INTERNAL,
    EXIT_OK,
    EXIT_TOO_LARGE,
    VALUE_DIGITS,
)
from sdpkit.examples import (
    EXAMPLES,
    load_example,
)
from sdpkit.exceptions import (
    DomainMiss,
    IllPosedProblem,
    InvalidProblemFile,
    InvalidSlip,
    InvalidState,
    KindMismatch,
    NotViable,
    SdpError,
    TooLarge,
)
from sdpkit.laws import (
    LawResult,
    check_container_laws,
    check_measure_monotone,
)
from sdpkit.oracle import (
    CheckReport,
    check_bellman,
    check_opt_policy_seq,
)
from sdpkit.problem import (
    MEASURES,
    SdpProblem,
    ValidationReport,
    validate,
)
from sdpkit.problem_file import (
    load_problem_file,
)
from sdpkit.solver import (
    PolicySeq,
    backwards_induction,
)
from sdpkit.trajectory import (
    render_trajectories,
    state_ctrl_trj,
    trajectories_to_list,
    trajectory_value,
)
from sdpkit.types import (
    StateValue,
)
from sdpkit.uncertainty import (
    fmap,
)
from sdpkit.viability import (
    ReachabilityTable,
    ViabilityTable,
    check_start_layer,
)

logger = logging.getLogger(__name__)


def _parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("problem", help=f"example id ({', '.join(EXAMPLES)}) or path of a problem file")
    common.add_argument("--t0", type=int, default=0, help="first decision step")
    common.add_argument("--steps", type=int, help="number of decisions, defaults to the horizon of the problem")
    common.add_argument("--measure", choices=sorted(MEASURES), help="override the measure of the problem")
    common.add_argument("--slip", type=float, help=f"slip probability of {EXAMPLE_CYL_STOCH}")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logs on stderr")

    parser = argparse.ArgumentParser(
        prog="sdpkit",
        description="Solve, inspect and verify finite-horizon sequential decision problems.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    solve = commands.add_parser("solve", parents=[common], help="print an optimal policy sequence")
    solve.add_argument("--start", help="print only the entry of this state")
    trajectories = commands.add_parser("trajectories", parents=[common], help="print the trajectories of an optimal policy sequence")
    trajectories.add_argument("--start", required=True, help="initial state")
    verify = commands.add_parser("verify", parents=[common], help="run the law suites and the brute-force optimality checks")
    verify.add_argument("--cap", type=int, help="largest number of enumerated (policy sequence, start) pairs")
    verify.add_argument("--samples", type=int, default=DEFAULT_LAW_SAMPLES, help="examples drawn per law")
    verify.add_argument("--seed", type=int, default=0)
    commands.add_parser("validate", parents=[common], help="check that the problem is well-posed")
    args = parser.parse_args(argv)
    if args.t0 < 0 or (args.steps is not None and args.steps < 0):
        parser.error("--t0 and --steps must be non-negative")
    return args


def _load(args: argparse.Namespace) -> SdpProblem:
    if args.problem in EXAMPLES:
        options: Dict[str, Any] = {}
        if args.slip is not None:
            if args.problem != EXAMPLE_CYL_STOCH:
                raise InvalidSlip(f"Expected --slip only with {EXAMPLE_CYL_STOCH}, receives it with {args.problem}")
            options["slip"] = args.slip
        p = load_example(args.problem, **options)
    else:
        p = load_problem_file(args.problem).to_problem()
    if args.measure is not None:
        p = p.with_measure(MEASURES[args.measure])
    return p


def _steps(args: argparse.Namespace, p: SdpProblem) -> int:
    if args.steps is not None:
        return args.steps
    if p.horizon_hint is None or p.horizon_hint < args.t0:
        raise SdpError(f"Expected --steps for {p.name}, which declares no horizon past t={args.t0}")
    return p.horizon_hint - args.t0


def _find_state(p: SdpProblem, t: int, key: str) -> StateValue:
    for x in p.enumerate_states(t):
        if p.key(x) == key:
            return x
    raise InvalidState(f"Expected a state of layer {t}, receives {key}")


def _emit(args: argparse.Namespace, text: str, payload: Any) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif text:
        print(text)


def _well_posed(p: SdpProblem, t0: int, n: int) -> Tuple[ValidationReport, ViabilityTable, ReachabilityTable]:
    vt = ViabilityTable(p, t0 + n)
    rt = ReachabilityTable(p, t0 + n)
    report = validate(p, t0 + n)
    if report.ok:
        report = check_start_layer(vt, rt, t0, n)
    return report, vt, rt


def cmd_validate(args: argparse.Namespace) -> int:
    p = _load(args)
    report, _, _ = _well_posed(p, args.t0, _steps(args, p))
    _emit(args, str(report) if not report.ok else "OK", report.to_list())
    return EXIT_OK if report.ok else EXIT_ILL_POSED


def cmd_solve(args: argparse.Namespace) -> int:
    p = _load(args)
    n = _steps(args, p)
    report, vt, rt = _well_posed(p, args.t0, n)
    if not report.ok:
        raise IllPosedProblem(report)
    result = backwards_induction(p, args.t0, n, vt=vt, rt=rt, skip_validation=True)
    if args.start is None:
        _emit(args, result.to_text(), result.to_dict())
        return EXIT_OK
    x = _find_state(p, args.t0, args.start)
    value = result.value(x)
    payload: Dict[str, Any] = {"t": args.t0, "steps": n, "x": p.key(x), "value": round(value, VALUE_DIGITS)}
    if n:
        y = result.policy_seq.head(x)
        payload["ctrl"] = p.key(y)
        text = f"{p.key(x)} -> {p.key(y)} : {value:.{VALUE_DIGITS}f}"
    else:
        text = f"{p.key(x)} : {value:.{VALUE_DIGITS}f}"
    _emit(args, text, payload)
    return EXIT_OK


def cmd_trajectories(args: argparse.Namespace) -> int:
    p = _load(args)
    n = _steps(args, p)
    report, vt, rt = _well_posed(p, args.t0, n)
    if not report.ok:
        raise IllPosedProblem(report)
    x = _find_state(p, args.t0, args.start)
    ps: PolicySeq = backwards_induction(p, args.t0, n, vt=vt, rt=rt, skip_validation=True).policy_seq
    if n == 0 and not rt.reachable(args.t0, x):
        raise DomainMiss(f"Expected a reachable state at t={args.t0}, receives {args.start}")
    trj = state_ctrl_trj(p, ps, args.t0, n, x)
    value = p.meas(fmap(lambda traj: trajectory_value(p, traj), trj))
    lines = render_trajectories(p, trj)
    lines.append(f"{p.meas.name} : {value:.{VALUE_DIGITS}f}")
    payload = {
        "trajectories": trajectories_to_list(p, trj),
        "measure": p.meas.name,
        "value": round(value, VALUE_DIGITS),
    }
    _emit(args, "\n".join(lines), payload)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    p = _load(args)
    t0, n = args.t0, _steps(args, p)
    lines: List[str] = []
    payload: Dict[str, List[Any]] = {"validation": [], "laws": [], "checks": []}

    report, vt, rt = _well_posed(p, t0, n)
    lines.append("PASS validate" if report.ok else f"FAIL validate\n{report}")
    payload["validation"] = report.to_list()
    if not report.ok:
        _emit(args, "\n".join(lines), payload)
        return EXIT_ILL_POSED

    laws: List[LawResult] = check_container_laws(p.kind, args.samples, args.seed)
    if p.meas.checked:
        laws.append(check_measure_monotone(p.meas.fn, p.meas.kinds, args.samples, args.seed, p.meas.name))
    lines.extend(str(law) for law in laws)
    payload["laws"] = [law.to_dict() for law in laws]

    ps = backwards_induction(p, t0, n, vt=vt, rt=rt, skip_validation=True).policy_seq
    checks: List[CheckReport] = [check_opt_policy_seq(p, ps, args.cap, vt=vt, rt=rt, name=f"opt-policy-seq t={t0} n={n}")]
    for i in range(n, 0, -1):
        suffix = PolicySeq(t0 + i, ps.policies[i:])
        report_i = check_bellman(p, suffix, args.cap, vt=vt, rt=rt)
        checks.append(CheckReport(f"bellman t={t0 + i - 1} n={n - i + 1}", report_i.passed, report_i.t,
                                  report_i.x, report_i.gap, report_i.evaluated))
    lines.extend(f"PASS {c.name}" if c.passed else f"FAIL {c.name} {c.detail}" for c in checks)
    payload["checks"] = [c.to_dict() for c in checks]

    _emit(args, "\n".join(lines), payload)
    passed = all(law.passed for law in laws) and all(c.passed for c in checks)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


COMMANDS = {
    "solve": cmd_solve,
    "trajectories": cmd_trajectories,
    "verify": cmd_verify,
    "validate": cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose >= 2 else logging.INFO if args.verbose == 1 else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except IllPosedProblem as e:
        _emit(args, str(e.report), e.report.to_list())
        return EXIT_ILL_POSED
    except (InvalidProblemFile, InvalidSlip, KindMismatch) as e:
        print(e, file=sys.stderr)
        return EXIT_ILL_POSED
    except (DomainMiss, NotViable, InvalidState) as e:
        print(e, file=sys.stderr)
        return EXIT_DOMAIN
    except TooLarge as e:
        print(f"{e}; try a smaller --steps", file=sys.stderr)
        return EXIT_TOO_LARGE
    except SdpError as e:
        logger.debug("unexpected library error", exc_info=True)
        print(e, file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
