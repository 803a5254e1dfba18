"""Verification toolkit for immediate-observation nets and reconfigurable
broadcast networks: exact counting semantics, the state-announcing
translation between the two models, explicit and symbolic cube-reachability
procedures, and a randomized differential harness that validates the
symbolic procedures against the explicit oracle."""

from .errors import (
    BudgetExceededError,
    CertificateError,
    ContradictoryAtomError,
    DisabledError,
    DuplicateTransitionError,
    EmptyRangeError,
    InconsistentCubeError,
    InvalidSpecError,
    MessageMismatchError,
    ModelError,
    ParseError,
    TargetNotCoveredError,
    UndeclaredStateError,
    UnknownStateError,
    UnknownTransitionError,
)
from .explicit import (
    DEFAULT_NODE_BUDGET,
    Decision,
    ReachResult,
    Verdict,
    coverable_states_explicit,
    post_star,
    reach_bounded,
)
from .harness import (
    GenSpec,
    Mismatch,
    SaturationMismatch,
    SimulationReport,
    ValidationSummary,
    check_saturation_against_oracle,
    check_strong_simulation,
    check_translation_equivalence,
    check_translation_equivalence_all_pops,
    gen_random_ionet,
    gen_random_net,
    gen_random_rbn,
    run_validation,
    sample_config_pairs,
)
from .model import (
    BROADCAST,
    INF,
    RECEIVE,
    Configuration,
    Cube,
    IONet,
    IOTransition,
    RBN,
    RBNStep,
    RBNTransition,
    Trace,
    apply_step,
    cube_configurations,
    cube_contains,
    cube_min_config,
    io_apply,
    io_successors,
    rbn_apply,
    rbn_successors,
    replay_trace,
    step_successors,
)
from .symbolic import (
    CertEntry,
    CrpQuery,
    QueryKind,
    SaturationCertificate,
    UnboundedInitialCube,
    crp_bounded,
    crp_geq1_decide,
    crp_geq1_eq0_bounded,
    crp_geq1_saturate,
    expand_witness,
    io_crp_decide,
)
from .textio import (
    QuerySpec,
    format_config,
    format_trace,
    parse_config,
    parse_net,
    parse_query,
    parse_trace,
    serialize_net,
)
from .translate import (
    TranslationCertificate,
    io_to_rbn,
    rbn_trace_to_io,
    transport_config,
    transport_cube,
)

__version__ = "0.1.0"
