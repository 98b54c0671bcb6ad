"""Fixed-budget change-point bandits: policies, bounds, Monte Carlo harness."""

from .adaptive import (
    DispatchedPolicy,
    ShaConfig,
    ShaDecision,
    estimate_delta,
    run_sha,
    threshold_tau,
)
from .bounds import (
    BoundQuery,
    BoundValue,
    large_budget_lower,
    sh_upper,
    sha_upper,
    shb_upper,
    small_budget_lower,
    t1_threshold,
)
from .env import (
    Environment,
    NoiseKind,
    RngStream,
    make_environment,
    mean_at,
    sample_reward,
    sample_rewards,
)
from .halving import (
    Decision,
    PhaseStats,
    PolicyResult,
    SamplingSet,
    ZoomHistory,
    backtrack,
    event_el,
    event_ep,
    event_er,
    phases_sh,
    phases_shb,
    run_sh,
    run_shb,
    zoom_left,
    zoom_right,
)
from .harness import (
    ExperimentConfig,
    PolicySpec,
    SweepRow,
    gaussian_ci_halfwidth,
    is_failure,
    run_cell,
    run_sweep,
)
from .offline import best_split, run_grid_ls, split_score

__version__ = "0.1.0"

__all__ = [
    "Environment",
    "NoiseKind",
    "RngStream",
    "make_environment",
    "mean_at",
    "sample_reward",
    "sample_rewards",
    "split_score",
    "best_split",
    "run_grid_ls",
    "Decision",
    "SamplingSet",
    "PhaseStats",
    "ZoomHistory",
    "PolicyResult",
    "phases_sh",
    "phases_shb",
    "event_er",
    "event_el",
    "event_ep",
    "zoom_left",
    "zoom_right",
    "backtrack",
    "run_sh",
    "run_shb",
    "ShaConfig",
    "ShaDecision",
    "DispatchedPolicy",
    "estimate_delta",
    "threshold_tau",
    "run_sha",
    "BoundQuery",
    "BoundValue",
    "t1_threshold",
    "shb_upper",
    "sh_upper",
    "large_budget_lower",
    "small_budget_lower",
    "sha_upper",
    "ExperimentConfig",
    "PolicySpec",
    "SweepRow",
    "is_failure",
    "gaussian_ci_halfwidth",
    "run_cell",
    "run_sweep",
]
