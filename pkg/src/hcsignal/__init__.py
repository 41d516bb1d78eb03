"""Signaling checks for hidden-communication models of three-party quantum correlations."""

__version__ = "0.1.0"

from .causal_timing import (
    Model1Config,
    Model2Config,
    PairLabel,
    SpacetimeEvent,
    TimingStructure,
    hc_reachable,
    lorentz_time,
    model1_classify,
    model1_timing_window,
    multisim_classify,
)
from .correlation_algebra import (
    CorrelationTensor,
    Distribution,
    is_valid,
    marginal,
    no_signaling_violation,
    probabilities_from_tensor,
    product_distribution,
    tensor_from_probabilities,
)
from .feasibility import (
    FREE,
    PRODUCT,
    ConstraintSpec,
    FeasibleRegion,
    Fixed,
    feasible_region,
    max_min_probability,
    project_interval,
    visibility_max,
    visibility_min,
)
from .quantum_core import (
    LocalSetting,
    StateVector,
    correlation_tensor,
    expectation,
    ghz_state,
    joint_probability,
    w_state,
)
from .witness_engine import (
    ChshBox,
    Mode,
    Scenario,
    Verdict,
    WitnessReport,
    build_constraints,
    mixed_model_box_test,
    run_scenario,
    visibility_report,
)

__all__ = [
    "__version__",
    "Model1Config",
    "Model2Config",
    "PairLabel",
    "SpacetimeEvent",
    "TimingStructure",
    "hc_reachable",
    "lorentz_time",
    "model1_classify",
    "model1_timing_window",
    "multisim_classify",
    "CorrelationTensor",
    "Distribution",
    "is_valid",
    "marginal",
    "no_signaling_violation",
    "probabilities_from_tensor",
    "product_distribution",
    "tensor_from_probabilities",
    "FREE",
    "PRODUCT",
    "ConstraintSpec",
    "FeasibleRegion",
    "Fixed",
    "feasible_region",
    "max_min_probability",
    "project_interval",
    "visibility_max",
    "visibility_min",
    "LocalSetting",
    "StateVector",
    "correlation_tensor",
    "expectation",
    "ghz_state",
    "joint_probability",
    "w_state",
    "ChshBox",
    "Mode",
    "Scenario",
    "Verdict",
    "WitnessReport",
    "build_constraints",
    "mixed_model_box_test",
    "run_scenario",
    "visibility_report",
]
