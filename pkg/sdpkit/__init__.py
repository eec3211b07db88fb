from sdpkit.uncertainty import (
    Container,
    bind,
    distribution,
    fmap,
    nondet,
    ret,
    single,
)
from sdpkit.problem import (
    BEST,
    EXPECTED,
    WORST,
    Measure,
    SdpProblem,
    validate,
)
from sdpkit.viability import (
    ReachabilityTable,
    ViabilityTable,
    reachable,
    viable,
)
from sdpkit.solver import (
    Policy,
    PolicySeq,
    backwards_induction,
    mval,
)
from sdpkit.trajectory import (
    state_ctrl_trj,
    trajectory_value,
)
from sdpkit.oracle import (
    Oracle,
    check_bellman,
    check_opt_policy_seq,
    get_oracle_factory,
)
from sdpkit.examples import (
    load_example,
)
from sdpkit.problem_file import (
    load_problem_file,
)

__all__ = [
    "Container",
    "bind",
    "distribution",
    "fmap",
    "nondet",
    "ret",
    "single",
    "BEST",
    "EXPECTED",
    "WORST",
    "Measure",
    "SdpProblem",
    "validate",
    "ReachabilityTable",
    "ViabilityTable",
    "reachable",
    "viable",
    "Policy",
    "PolicySeq",
    "backwards_induction",
    "mval",
    "state_ctrl_trj",
    "trajectory_value",
    "Oracle",
    "check_bellman",
    "check_opt_policy_seq",
    "get_oracle_factory",
    "load_example",
    "load_problem_file",
]
