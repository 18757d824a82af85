"""Multi-objective hierarchical output-feedback optimization."""

from mhof._core import (
    Archive,
    ControllerConfig,
    ControllerState,
    EllBoundComponent,
    EllBoundReport,
    EpochRecord,
    ModelParams,
    ObjectiveVector,
    OptimizerState,
    ProblemSpec,
    RefPoint,
    RegSlideReport,
    RunResult,
    SchemeConfig,
    SchemeKind,
    Trace,
    TraceMeta,
    MhofError,
    controller_init,
    dominates,
    ehv_of_archive,
    ellbound_diagnostic,
    epoch,
    equivalent,
    evaluate,
    grad_penalized,
    hypervolume,
    hypervolume_mc,
    init_params,
    load_trace,
    mu_step,
    optimizer_step,
    pareto_filter,
    problem_digest,
    regslide_check,
    render_dynamics,
    render_phase_portrait,
    run,
    save_trace,
    select_model,
    setpoint_step,
)

__all__ = [
    "Archive",
    "ControllerConfig",
    "ControllerState",
    "EllBoundComponent",
    "EllBoundReport",
    "EpochRecord",
    "MhofError",
    "ModelParams",
    "ObjectiveVector",
    "OptimizerState",
    "ProblemSpec",
    "RefPoint",
    "RegSlideReport",
    "RunResult",
    "SchemeConfig",
    "SchemeKind",
    "Trace",
    "TraceMeta",
    "controller_init",
    "dominates",
    "ehv_of_archive",
    "ellbound_diagnostic",
    "epoch",
    "equivalent",
    "evaluate",
    "grad_penalized",
    "hypervolume",
    "hypervolume_mc",
    "init_params",
    "load_trace",
    "mu_step",
    "optimizer_step",
    "pareto_filter",
    "problem_digest",
    "regslide_check",
    "render_dynamics",
    "render_phase_portrait",
    "run",
    "save_trace",
    "select_model",
    "setpoint_step",
]
