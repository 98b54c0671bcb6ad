"""Piecewise constant bandit environments and reproducible reward streams.

An environment is a step function on [0, 1]: mean ``mu1`` up to and
including the change point ``x_star``, mean ``mu2`` strictly to the right
of it. Rewards are the mean plus centered noise with sub-Gaussian scale
``sigma``. The simulator holds the true parameters; policies only ever see
reward draws.

Randomness contract
-------------------
All draws go through :class:`RngStream`, a thin wrapper around numpy's
PCG64 generator seeded via ``SeedSequence([master_seed, stream_index])``.
Distinct ``(master_seed, stream_index)`` pairs yield statistically
independent streams, and a fixed pair reproduces the same sequence
bit-for-bit run after run (within this implementation; cross-language
bit-exactness is not promised). Streams are single-owner: one stream per
replication, never shared across workers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateEnvironment,
    NegativeSigma,
    OutOfRangeAction,
    OutOfRangeChangePoint,
)

__all__ = [
    "NoiseKind",
    "Environment",
    "RngStream",
    "make_environment",
    "mean_at",
    "sample_reward",
    "sample_rewards",
]


class NoiseKind(enum.Enum):
    """Reward noise families. All are sigma^2 sub-Gaussian."""

    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"
    NONE = "none"

    @classmethod
    def parse(cls, name: str) -> "NoiseKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown noise kind {name!r}; expected one of "
                f"{[k.value for k in cls]}"
            ) from None


@dataclass(frozen=True)
class Environment:
    """Immutable problem instance; safe to share across workers."""

    mu1: float
    mu2: float
    x_star: float
    sigma: float
    noise_kind: NoiseKind = NoiseKind.GAUSSIAN

    def delta(self) -> float:
        """Gap |mu1 - mu2| at the change point."""
        return abs(self.mu1 - self.mu2)

    def effective_sigma(self) -> float:
        """Noise scale actually applied (0 when noise_kind is NONE)."""
        return 0.0 if self.noise_kind is NoiseKind.NONE else self.sigma


def make_environment(
    mu1: float,
    mu2: float,
    x_star: float,
    sigma: float,
    noise_kind: NoiseKind | str = NoiseKind.GAUSSIAN,
) -> Environment:
    """Validate parameters and build an :class:`Environment`.

    Raises
    ------
    DegenerateEnvironment
        If ``mu1 == mu2`` (no change to locate).
    OutOfRangeChangePoint
        If ``x_star`` is not in [0, 1).
    NegativeSigma
        If ``sigma < 0``.
    """
    if isinstance(noise_kind, str):
        noise_kind = NoiseKind.parse(noise_kind)
    mu1 = float(mu1)
    mu2 = float(mu2)
    x_star = float(x_star)
    sigma = float(sigma)
    if mu1 == mu2:
        raise DegenerateEnvironment(f"mu1 == mu2 == {mu1}: gap must be positive")
    if not (0.0 <= x_star < 1.0):
        raise OutOfRangeChangePoint(f"x_star={x_star} outside [0, 1)")
    if not (sigma >= 0.0):
        raise NegativeSigma(f"sigma={sigma} must be >= 0")
    return Environment(mu1, mu2, x_star, sigma, noise_kind)


def mean_at(env: Environment, x: float) -> float:
    """Mean reward at action ``x``; the boundary x == x_star is the left piece."""
    if not (0.0 <= x <= 1.0):
        raise OutOfRangeAction(f"action x={x} outside [0, 1]")
    return env.mu1 if x <= env.x_star else env.mu2


# Uniform noise on [-sigma*sqrt(3), sigma*sqrt(3)] has variance sigma^2,
# so its sub-Gaussian parameter matches the Gaussian family for bound
# comparisons.
_UNIFORM_HALFWIDTH = np.sqrt(3.0)


@dataclass
class RngStream:
    """One reproducible random stream, keyed by (master_seed, stream_index)."""

    master_seed: int
    stream_index: int = 0
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        seq = np.random.SeedSequence([int(self.master_seed), int(self.stream_index)])
        self.generator = np.random.Generator(np.random.PCG64(seq))


def sample_rewards(env: Environment, x: float, n: int, rng: RngStream) -> np.ndarray:
    """Draw ``n`` fresh rewards at action ``x``, advancing the stream.

    The per-call draw order is fixed (one batched generator call), so a
    given stream reproduces identical arrays across runs.
    """
    f = mean_at(env, x)
    if n < 1:
        raise ValueError(f"need at least one draw, got n={n}")
    sigma = env.effective_sigma()
    if sigma == 0.0:
        return np.full(n, f, dtype=float)
    if env.noise_kind is NoiseKind.GAUSSIAN:
        return f + rng.generator.normal(0.0, sigma, size=n)
    half = sigma * _UNIFORM_HALFWIDTH
    return f + rng.generator.uniform(-half, half, size=n)


def sample_reward(env: Environment, x: float, rng: RngStream) -> float:
    """Single noisy observation of the mean at ``x``."""
    return float(sample_rewards(env, x, 1, rng)[0])
