"""Regime-adaptive policy: probe the gap, then dispatch SH or SHB.

Spends ``L`` pulls split evenly between the endpoints 0 and 1 to estimate
the gap ``delta_hat = |mean(x=1) - mean(x=0)|`` (the endpoints straddle
the change point for every x_star in [0, 1)), converts it into a budget
threshold ``tau = gamma * sigma**2 / delta_hat**2 * ln(1/(2*eta))``, and
runs the backtracking policy on the remaining budget when ``T >= tau``,
the plain one otherwise. ``sigma`` is the known noise scale; only this
policy assumes it.

Defaults follow the experimental hyperparameters gamma=120 and
L = T/20 (rounded down to the nearest even count >= 2). Theory admits a
window of gamma values around these, documented in :mod:`cpbandit.bounds`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .env import Environment, RngStream, sample_rewards
from .errors import (
    BadExplorationBudget,
    EtaOutOfRange,
    NonpositiveSigma,
)
from .halving import PolicyResult, run_sh, run_shb

__all__ = [
    "DEFAULT_GAMMA",
    "DEFAULT_L_FRACTION",
    "DispatchedPolicy",
    "ShaConfig",
    "ShaDecision",
    "default_exploration_pulls",
    "estimate_delta",
    "threshold_tau",
    "run_sha",
]

DEFAULT_GAMMA = 120.0
DEFAULT_L_FRACTION = 0.05


class DispatchedPolicy(enum.Enum):
    SH = "sh"
    SHB = "shb"


@dataclass(frozen=True)
class ShaConfig:
    """Hyperparameters of the adaptive policy.

    ``L`` must be even and satisfy 2 <= L <= T - 2; ``sigma`` is the known
    noise scale (> 0) used only for the threshold, never passed to the
    dispatched policy.
    """

    gamma: float = DEFAULT_GAMMA
    L: int = 2
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if self.gamma <= 0:
            raise ValueError(f"gamma={self.gamma} must be > 0")
        if self.L < 2 or self.L % 2 != 0:
            raise BadExplorationBudget(f"L={self.L} must be even and >= 2")
        if self.sigma <= 0:
            raise NonpositiveSigma(f"sigma={self.sigma} must be > 0")


@dataclass(frozen=True)
class ShaDecision:
    """Dispatch record: gap estimate, threshold, and the chosen policy."""

    delta_hat: float
    tau: float
    chosen: DispatchedPolicy


def default_exploration_pulls(T: int, fraction: float = DEFAULT_L_FRACTION) -> int:
    """floor(fraction*T) rounded down to the nearest even count, at least 2."""
    L = int(math.floor(fraction * T))
    L -= L % 2
    return max(L, 2)


def estimate_delta(env: Environment, L: int, rng: RngStream) -> float:
    """|mean of L/2 rewards at x=1 minus mean of L/2 rewards at x=0|."""
    if L < 2 or L % 2 != 0:
        raise BadExplorationBudget(f"L={L} must be even and >= 2")
    half = L // 2
    mean0 = float(sample_rewards(env, 0.0, half, rng).mean())
    mean1 = float(sample_rewards(env, 1.0, half, rng).mean())
    return abs(mean1 - mean0)


def threshold_tau(delta_hat: float, sigma: float, eta: float, gamma: float) -> float:
    """Budget threshold gamma*sigma^2/delta_hat^2 * ln(1/(2*eta)).

    Natural log. Returns +inf when ``delta_hat == 0`` (no detectable gap:
    the small-budget policy is the safe default).
    """
    if not (0.0 < eta < 0.5):
        raise EtaOutOfRange(f"eta={eta} outside (0, 1/2)")
    if sigma <= 0:
        raise NonpositiveSigma(f"sigma={sigma} must be > 0")
    if gamma <= 0:
        raise ValueError(f"gamma={gamma} must be > 0")
    if delta_hat < 0:
        raise ValueError(f"delta_hat={delta_hat} must be >= 0")
    if delta_hat == 0.0:
        return math.inf
    return gamma * sigma**2 / delta_hat**2 * math.log(1.0 / (2.0 * eta))


def run_sha(
    env: Environment,
    T: int,
    eta: float,
    cfg: ShaConfig,
    rng: RngStream,
) -> tuple[PolicyResult, ShaDecision]:
    """Estimate the gap, pick a regime, run the matching policy on T - L.

    Returns the dispatched policy's result (total pulls include the L
    exploration pulls) together with the dispatch record.
    """
    if cfg.L > T - 2:
        raise BadExplorationBudget(
            f"L={cfg.L} leaves no budget to dispatch (T={T})"
        )
    delta_hat = estimate_delta(env, cfg.L, rng)
    tau = threshold_tau(delta_hat, cfg.sigma, eta, cfg.gamma)
    remaining = T - cfg.L
    if T >= tau:
        chosen = DispatchedPolicy.SHB
        inner = run_shb(env, remaining, eta, rng)
    else:
        chosen = DispatchedPolicy.SH
        inner = run_sh(env, remaining, eta, rng)
    result = PolicyResult(
        estimate=inner.estimate,
        pulls_used=cfg.L + inner.pulls_used,
        trace=inner.trace,
        phases=inner.phases,
    )
    return result, ShaDecision(delta_hat=delta_hat, tau=tau, chosen=chosen)
