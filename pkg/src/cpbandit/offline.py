"""Offline least-squares change-point split estimator and a grid baseline.

Given observations ordered by their sample locations, the best single
split under a two-mean piecewise constant fit minimizes the residual sum
of squares. That argmin is equivalent to maximizing the between-segment
score ``r(n-r)/n * (mean(y[:r]) - mean(y[r:]))**2``, which is what
:func:`split_score` evaluates and :func:`best_split` maximizes (it is also
the Gaussian maximum-likelihood index estimate). Ties break to the smallest
index.

:func:`run_grid_ls` wraps the estimator into a non-adaptive baseline
policy: sample a uniform grid, split the per-point empirical means, return
the midpoint of the bracketing grid cell.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .env import Environment, RngStream, sample_rewards
from .errors import BudgetTooSmall, DomainError, SampleTooShort, SplitOutOfRange
from .halving import PolicyResult

__all__ = ["split_score", "best_split", "run_grid_ls", "default_grid_size"]


def split_score(values: Sequence[float], r: int) -> float:
    """Between-segment score of splitting ``values`` after index ``r`` (1-based).

    Equals ``r*(n-r)/n * (mean(values[:r]) - mean(values[r:]))**2``; larger
    means a better two-mean fit with the change after the r-th value.
    """
    n = len(values)
    if n < 2:
        raise SampleTooShort(f"need at least 2 values, got {n}")
    if not (1 <= r <= n - 1):
        raise SplitOutOfRange(f"split index r={r} outside 1..{n - 1}")
    y = np.asarray(values, dtype=float)
    left = y[:r].sum() / r
    right = y[r:].sum() / (n - r)
    return float(r * (n - r) / n * (left - right) ** 2)


def best_split(values: Sequence[float]) -> int:
    """Smallest 1-based index maximizing :func:`split_score`.

    Scores for all splits are computed in O(n) from prefix sums.
    """
    n = len(values)
    if n < 2:
        raise SampleTooShort(f"need at least 2 values, got {n}")
    y = np.asarray(values, dtype=float)
    prefix = np.cumsum(y)
    total = prefix[-1]
    r = np.arange(1, n, dtype=float)
    left_mean = prefix[:-1] / r
    right_mean = (total - prefix[:-1]) / (n - r)
    scores = r * (n - r) / n * (left_mean - right_mean) ** 2
    return int(np.argmax(scores)) + 1  # argmax returns the first maximum


def default_grid_size(eta: float) -> int:
    """Default grid resolution: 2 * ceil(1/(2*eta)) points."""
    import math

    return 2 * math.ceil(1.0 / (2.0 * eta))


def run_grid_ls(
    env: Environment,
    T: int,
    eta: float,
    G: int,
    rng: RngStream,
) -> PolicyResult:
    """Uniform-grid baseline: sample G evenly spaced actions, split the means.

    Plays ``x_i = (i-1)/(G-1)`` for i = 1..G, each ``floor(T/G)`` times,
    estimates the change point as the midpoint of the grid cell found by
    :func:`best_split` on the per-point empirical means. Leftover budget
    ``T - G*floor(T/G)`` is discarded.
    """
    if G < 2:
        raise DomainError(f"grid size G={G} must be >= 2")
    pulls_per_point = T // G
    if pulls_per_point < 1:
        raise BudgetTooSmall(
            f"budget T={T} gives floor(T/G)=0 pulls per grid point (G={G})"
        )
    xs = np.linspace(0.0, 1.0, G)
    means = np.empty(G)
    for i, x in enumerate(xs):
        means[i] = sample_rewards(env, float(x), pulls_per_point, rng).mean()
    r = best_split(means)
    estimate = float((xs[r - 1] + xs[r]) / 2.0)
    return PolicyResult(
        estimate=estimate,
        pulls_used=G * pulls_per_point,
        trace=(),
    )
