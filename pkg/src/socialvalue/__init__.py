"""Exact information orders for sequential social learning."""

from .blackwell import (
    GarblingKernel,
    MixtureExperiment,
    RocCurve,
    blackwell_geq,
    garbling_kernel,
    mixture_bounds,
    mixture_exists,
    mixture_experiment,
    product_preserves_garbling_check,
    roc_dominates,
    three_point_garbling,
)
from .equilibrium import (
    EquilibriumList,
    EquilibriumResult,
    StrategyProfile,
    TieBreakPolicy,
    Verdict,
    compute_equilibrium,
    constant_profile,
    enumerate_all,
    enumerate_equilibria,
    evaluate_profile,
    observable_signal_value,
    prefer,
    public_belief_distribution,
    verify_equilibrium,
)
from .errors import (
    HypothesisViolated,
    IndeterminatePosterior,
    InternalDisagreement,
    ParameterViolation,
    ParseError,
    PreconditionViolated,
    ProfileIncomplete,
    ResourceLimit,
    ShapeMismatch,
    SocialValueError,
)
from .model import (
    BeliefDistribution,
    DecisionProblem,
    InformationStructure,
    Prior,
    best_action_interval,
    best_response_set,
    classify,
    full_information,
    iid_power,
    no_information,
    posterior_update,
    private_belief_distribution,
    product,
    symmetric_binary,
)
from .orders import (
    CounterexampleBundle,
    OrderVerdict,
    Relation,
    Status,
    check_necessary_social,
    check_sufficient_social,
    check_weak_3support,
    refute_eventual,
    refute_social,
    refute_weak,
    self_social,
    threshold_problem,
)
from .scenarios import (
    augment_revealing,
    cascade_value_oracle,
    example1,
    example2,
    hybrid_profile,
    imitation_profile,
    three_support_value_oracle,
)

__all__ = [
    "augment_revealing",
    "BeliefDistribution",
    "best_action_interval",
    "best_response_set",
    "blackwell_geq",
    "cascade_value_oracle",
    "check_necessary_social",
    "check_sufficient_social",
    "check_weak_3support",
    "classify",
    "compute_equilibrium",
    "constant_profile",
    "CounterexampleBundle",
    "DecisionProblem",
    "enumerate_all",
    "enumerate_equilibria",
    "EquilibriumList",
    "EquilibriumResult",
    "evaluate_profile",
    "example1",
    "example2",
    "full_information",
    "garbling_kernel",
    "GarblingKernel",
    "hybrid_profile",
    "HypothesisViolated",
    "iid_power",
    "imitation_profile",
    "IndeterminatePosterior",
    "InformationStructure",
    "InternalDisagreement",
    "mixture_bounds",
    "mixture_exists",
    "mixture_experiment",
    "MixtureExperiment",
    "no_information",
    "observable_signal_value",
    "OrderVerdict",
    "ParameterViolation",
    "ParseError",
    "posterior_update",
    "PreconditionViolated",
    "prefer",
    "Prior",
    "private_belief_distribution",
    "product",
    "product_preserves_garbling_check",
    "ProfileIncomplete",
    "public_belief_distribution",
    "refute_eventual",
    "refute_social",
    "refute_weak",
    "Relation",
    "ResourceLimit",
    "roc_dominates",
    "RocCurve",
    "self_social",
    "ShapeMismatch",
    "SocialValueError",
    "Status",
    "StrategyProfile",
    "symmetric_binary",
    "three_point_garbling",
    "three_support_value_oracle",
    "threshold_problem",
    "TieBreakPolicy",
    "Verdict",
    "verify_equilibrium",
]

__version__ = "0.1.0"
