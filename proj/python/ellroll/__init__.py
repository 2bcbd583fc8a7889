"""Python bindings for the ellroll simulation and controllers."""

from ellroll._core import (
    BodyState,
    Checkpoint,
    ConfigError,
    EllipseParams,
    Environment,
    MetricReport,
    NumericalError,
    QNetwork,
    RewardVariant,
    RunConfig,
    SuLqrConfig,
    SuLqrController,
    TaskId,
    TaskSpec,
    UsageError,
    acceleration,
    baseline,
    describe_physics,
    evaluate,
    evaluate_metrics,
    fictitious_torque,
    gravity_torque,
    inertia,
    parse_task,
    potential_energy,
    reward_basic,
    reward_normalized,
    rollout_sulqr,
    solve_care,
    step_physics,
    task_key,
    total_energy,
    train,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
