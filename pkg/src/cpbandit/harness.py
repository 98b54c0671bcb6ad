"""Seeded Monte Carlo harness: failure-probability sweeps over policy/budget grids.

A sweep runs ``replications`` independent policy runs per (policy, budget)
cell, tallies the failure events ``|estimate - x_star| >= eta``, and
reports the failure proportion with a Gaussian-approximation (Wald)
confidence half-width.

Determinism contract: replication ``i`` of a cell draws from the stream
``(master_seed, blake2b64("<policy>|<T>|<i>"))``, so every cell's result
depends only on the configuration and master seed — never on worker
count or scheduling — and adding budgets to a sweep does not perturb
existing cells. Cells are embarrassingly parallel; the reduction over
replication indices is ordered.

A policy error at some grid point (for example a budget too small for the
phase schedule) produces a flagged invalid row instead of aborting the
sweep, so mixed-validity grids stay plottable.
"""

from __future__ import annotations

import csv
import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, IO, Sequence

from .adaptive import (
    DEFAULT_GAMMA,
    DEFAULT_L_FRACTION,
    DispatchedPolicy,
    ShaConfig,
    default_exploration_pulls,
    run_sha,
)
from .env import Environment, RngStream
from .errors import ConfigError, DomainError, PolicyError
from .halving import PolicyResult, run_sh, run_shb
from .offline import default_grid_size, run_grid_ls

__all__ = [
    "CSV_HEADER",
    "PolicySpec",
    "ExperimentConfig",
    "SweepRow",
    "POLICY_NAMES",
    "is_failure",
    "gaussian_ci_halfwidth",
    "run_cell",
    "run_sweep",
    "write_rows_csv",
]

CSV_HEADER = (
    "policy,T,replications,failures,p_hat,ci_halfwidth,"
    "mean_abs_error,dispatch_shb_rate,valid"
)

POLICY_NAMES = ("sh", "shb", "sha", "grid_ls")


@dataclass(frozen=True)
class PolicySpec:
    """A policy selection: registry name plus optional parameters.

    Supported parameters (matched case-insensitively, so INI configs may
    spell them either way): ``sha`` takes ``gamma`` (default 120),
    ``L_fraction`` (default 0.05), ``L`` (explicit pull count, overrides
    the fraction) and ``sigma`` (defaults to the environment's noise
    scale, or 1.0 when that is zero); ``grid_ls`` takes ``G`` (default
    ``2*ceil(1/(2*eta))``).
    """

    name: str
    params: dict = field(default_factory=dict)

    def label(self) -> str:
        return self.name


@dataclass(frozen=True)
class SweepRow:
    """One (policy, budget) cell of a sweep."""

    policy: str
    T: int
    replications: int
    failures: int
    p_hat: float | None
    ci_halfwidth: float | None
    mean_abs_error: float | None
    dispatch_shb_rate: float | None
    valid: bool
    error: str | None = None


@dataclass
class ExperimentConfig:
    """Full sweep description: environment, grid, replication plan."""

    environment: Environment
    eta: float
    policies: list[PolicySpec]
    budgets: list[int]
    replications: int
    master_seed: int
    confidence_level: float = 0.90
    workers: int = 1

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ConfigError(f"replications={self.replications} must be >= 1")
        if not self.budgets:
            raise ConfigError("budget list is empty")
        if not self.policies:
            raise ConfigError("policy list is empty")
        for spec in self.policies:
            if not isinstance(spec, PolicySpec):
                raise ConfigError(f"not a PolicySpec: {spec!r}")
            if spec.name not in POLICY_NAMES:
                raise ConfigError(
                    f"unknown policy {spec.name!r}; expected one of {POLICY_NAMES}"
                )
        if not (0.0 < self.confidence_level < 1.0):
            raise ConfigError(
                f"confidence_level={self.confidence_level} outside (0, 1)"
            )
        if self.workers < 1:
            raise ConfigError(f"workers={self.workers} must be >= 1")


def is_failure(estimate: float, env: Environment, eta: float) -> bool:
    """Failure event: the estimate misses the change point by eta or more."""
    return abs(estimate - env.x_star) >= eta


# Coefficients of Acklam's rational approximation to the standard normal
# quantile; |relative error| < 1.2e-9, well inside the 1e-6 needed here.
_ACKLAM_A = (
    -3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
    1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00,
)
_ACKLAM_B = (
    -5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
    6.680131188771972e01, -1.328068155288572e01,
)
_ACKLAM_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
    -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00,
)
_ACKLAM_D = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
    3.754408661907416e00,
)


def _norm_quantile(p: float) -> float:
    """Standard normal quantile via Acklam's rational approximation."""
    if not (0.0 < p < 1.0):
        raise DomainError(f"quantile argument p={p} outside (0, 1)")
    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    p_low, p_high = 0.02425, 1.0 - 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        return (
            ((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]
        ) / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    if p <= p_high:
        q = p - 0.5
        r = q * q
        return (
            (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5])
            * q
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
        )
    q = math.sqrt(-2.0 * math.log(1.0 - p))
    return -(
        ((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]
    ) / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)


def gaussian_ci_halfwidth(p_hat: float, n: int, confidence: float) -> float:
    """Wald half-width z * sqrt(p_hat*(1-p_hat)/n) at the given two-sided level."""
    if n < 1:
        raise DomainError(f"n={n} must be >= 1")
    if not (0.0 <= p_hat <= 1.0):
        raise DomainError(f"p_hat={p_hat} outside [0, 1]")
    if not (0.0 < confidence < 1.0):
        raise DomainError(f"confidence={confidence} outside (0, 1)")
    z = _norm_quantile((1.0 + confidence) / 2.0)
    return z * math.sqrt(p_hat * (1.0 - p_hat) / n)


def stream_index_for(policy_label: str, T: int, replication: int) -> int:
    """Stable 64-bit stream index for one replication of one cell."""
    digest = hashlib.blake2b(
        f"{policy_label}|{T}|{replication}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little")


PolicyRunner = Callable[
    [Environment, int, float, RngStream],
    "tuple[PolicyResult, DispatchedPolicy | None]",
]


def _make_runner(spec: PolicySpec, env: Environment, eta: float) -> PolicyRunner:
    name = spec.name
    # INI parsers lowercase option names; match parameters either way
    params = {k.lower(): v for k, v in spec.params.items()}
    if name == "sh":
        return lambda e, T, et, rng: (run_sh(e, T, et, rng), None)
    if name == "shb":
        return lambda e, T, et, rng: (run_shb(e, T, et, rng), None)
    if name == "grid_ls":
        G = int(params.get("g", default_grid_size(eta)))
        return lambda e, T, et, rng: (run_grid_ls(e, T, et, G, rng), None)
    if name == "sha":
        gamma = float(params.get("gamma", DEFAULT_GAMMA))
        fraction = float(params.get("l_fraction", DEFAULT_L_FRACTION))
        fixed_l = params.get("l")
        sigma = params.get("sigma")
        if sigma is None:
            sigma = env.effective_sigma() or 1.0

        def run(e: Environment, T: int, et: float, rng: RngStream):
            L = int(fixed_l) if fixed_l is not None else default_exploration_pulls(T, fraction)
            cfg = ShaConfig(gamma=gamma, L=L, sigma=float(sigma))
            result, decision = run_sha(e, T, et, cfg, rng)
            return result, decision.chosen

        return run
    raise ConfigError(f"unknown policy {name!r}")


def run_cell(
    policy: PolicySpec | str | Callable,
    env: Environment,
    T: int,
    eta: float,
    replications: int,
    master_seed: int,
    confidence: float = 0.90,
) -> SweepRow:
    """Run one (policy, budget) cell and tally its failure statistics.

    ``policy`` may be a :class:`PolicySpec`, a registry name, or (serial
    use only, e.g. stub policies in tests) a callable with the runner
    signature ``(env, T, eta, rng) -> PolicyResult``.
    """
    if callable(policy) and not isinstance(policy, (PolicySpec, str)):
        label = getattr(policy, "__name__", "policy")
        base = policy

        def runner(e, t, et, rng):
            out = base(e, t, et, rng)
            return out if isinstance(out, tuple) else (out, None)
    else:
        spec = PolicySpec(policy) if isinstance(policy, str) else policy
        label = spec.label()
        runner = _make_runner(spec, env, eta)

    failures = 0
    abs_error_sum = 0.0
    shb_dispatches = 0
    saw_dispatch = False
    try:
        for i in range(replications):
            rng = RngStream(master_seed, stream_index_for(label, T, i))
            result, dispatched = runner(env, T, eta, rng)
            failures += is_failure(result.estimate, env, eta)
            abs_error_sum += abs(result.estimate - env.x_star)
            if dispatched is not None:
                saw_dispatch = True
                shb_dispatches += dispatched is DispatchedPolicy.SHB
    except PolicyError as exc:
        return SweepRow(
            policy=label,
            T=T,
            replications=replications,
            failures=0,
            p_hat=None,
            ci_halfwidth=None,
            mean_abs_error=None,
            dispatch_shb_rate=None,
            valid=False,
            error=f"{type(exc).__name__}: {exc}",
        )
    p_hat = failures / replications
    return SweepRow(
        policy=label,
        T=T,
        replications=replications,
        failures=failures,
        p_hat=p_hat,
        ci_halfwidth=gaussian_ci_halfwidth(p_hat, replications, confidence),
        mean_abs_error=abs_error_sum / replications,
        dispatch_shb_rate=shb_dispatches / replications if saw_dispatch else None,
        valid=True,
    )


def _cell_task(args: tuple) -> SweepRow:
    spec, env, T, eta, replications, master_seed, confidence = args
    return run_cell(spec, env, T, eta, replications, master_seed, confidence)


def run_sweep(cfg: ExperimentConfig) -> list[SweepRow]:
    """Run the full policy-by-budget grid, rows in deterministic order.

    Order is policy order as configured, then ascending budget. Results
    are identical for any worker count.
    """
    budgets = sorted(cfg.budgets)
    tasks = [
        (spec, cfg.environment, T, cfg.eta, cfg.replications, cfg.master_seed,
         cfg.confidence_level)
        for spec in cfg.policies
        for T in budgets
    ]
    if cfg.workers == 1 or len(tasks) == 1:
        return [_cell_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(_cell_task, tasks))


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.10g}"


def write_rows_csv(rows: Sequence[SweepRow], out: IO[str]) -> None:
    """Emit the documented CSV schema (floats at 10 significant digits)."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for r in rows:
        writer.writerow(
            [
                r.policy,
                r.T,
                r.replications,
                r.failures,
                _fmt(r.p_hat),
                _fmt(r.ci_halfwidth),
                _fmt(r.mean_abs_error),
                _fmt(r.dispatch_shb_rate),
                "true" if r.valid else "false",
            ]
        )
