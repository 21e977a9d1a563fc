"""Formation trajectory generation over sparse GP factor graphs."""

from gpform._core import (  # noqa: F401
    NumericFailure,
    OutOfBounds,
    PipelineResult,
    PlanSession,
    PlanningInfeasible,
    Scenario,
    SignedDistanceGrid,
    SolveReport,
    assign_transition,
    gp_cov,
    gp_cov_inverse,
    interpolate_state,
    load_scenario,
    parse_scenario,
    replan_goal,
    run_pipeline,
    sdf_from_ascii,
    transition,
)

__all__ = [
    "NumericFailure",
    "OutOfBounds",
    "PipelineResult",
    "PlanSession",
    "PlanningInfeasible",
    "Scenario",
    "SignedDistanceGrid",
    "SolveReport",
    "assign_transition",
    "gp_cov",
    "gp_cov_inverse",
    "interpolate_state",
    "load_scenario",
    "parse_scenario",
    "replan_goal",
    "run_pipeline",
    "sdf_from_ascii",
    "transition",
]
