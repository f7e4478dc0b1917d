"""quadwitness: machine-checkable nonsolvability evidence for doubly
characteristic second order operators, built on quadratic form pencils,
dissipativity certificates, and quadric intersection witness search."""

from .config import CheckConfig, OracleConfig, SearchConfig, ToleranceConfig
from .dissipativity import DISSIPATIVE, NON_DISSIPATIVE, DissipativityDecision, is_non_dissipative
from .errors import GenerationBudgetExceeded, InputError, SearchBudgetExceeded
from .forms import (
    Pencil,
    PencilRankSummary,
    PoissonStructure,
    SymmetricForm,
    canonical_skew,
    evaluate,
    form_from_monomials,
    heisenberg_bracket_matrix,
    independence_ratio,
    is_symplectic_subspace,
    joint_kernel,
    linear_independence,
    numerical_rank,
    pencil_minmax_rank,
    poisson_bracket_forms,
    traceless_normalize,
)
from .groups import (
    BracketConditions,
    ConditionReport,
    EvidenceBundle,
    OperatorSpec,
    RankConditions,
    TwoStepGroup,
    Verdict,
    check_heisenberg,
    check_operator,
    check_two_step,
    evaluate_conditions,
    find_nondegenerate_mu,
    j_mu,
    witness_evidence,
)
from .oracles import (
    GridWitness,
    PassingInstance,
    bracket_gradient_oracle,
    dissipativity_sweep_oracle,
    generate_passing_instance,
    restricted_rank_property,
    witness_grid_oracle,
)
from .witness import SearchOutcome, WitnessPoint, hoermander_witness, project_to_variety, transversal_point

__version__ = "0.1.0"

__all__ = [
    "CheckConfig",
    "OracleConfig",
    "SearchConfig",
    "ToleranceConfig",
    "DISSIPATIVE",
    "NON_DISSIPATIVE",
    "DissipativityDecision",
    "is_non_dissipative",
    "GenerationBudgetExceeded",
    "InputError",
    "SearchBudgetExceeded",
    "Pencil",
    "PencilRankSummary",
    "PoissonStructure",
    "SymmetricForm",
    "canonical_skew",
    "evaluate",
    "form_from_monomials",
    "heisenberg_bracket_matrix",
    "independence_ratio",
    "is_symplectic_subspace",
    "joint_kernel",
    "linear_independence",
    "numerical_rank",
    "pencil_minmax_rank",
    "poisson_bracket_forms",
    "traceless_normalize",
    "BracketConditions",
    "ConditionReport",
    "EvidenceBundle",
    "OperatorSpec",
    "RankConditions",
    "TwoStepGroup",
    "Verdict",
    "check_heisenberg",
    "check_operator",
    "check_two_step",
    "evaluate_conditions",
    "find_nondegenerate_mu",
    "j_mu",
    "witness_evidence",
    "GridWitness",
    "PassingInstance",
    "bracket_gradient_oracle",
    "dissipativity_sweep_oracle",
    "generate_passing_instance",
    "restricted_rank_property",
    "witness_grid_oracle",
    "SearchOutcome",
    "WitnessPoint",
    "hoermander_witness",
    "project_to_variety",
    "transversal_point",
    "__version__",
]
