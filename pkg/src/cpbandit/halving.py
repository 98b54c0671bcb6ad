"""Sequential halving policies for change-point localization.

Both policies maintain a bracketing interval [a1, a3) of the action space
with midpoint a2, spend a fixed per-phase budget sampling at those points,
and halve the interval toward the side showing the larger jump in
empirical mean. The backtracking variant additionally samples the global
endpoints 0 and 1 each phase and can undo its previous halving when the
evidence says the change point is no longer inside [a1, a3).

Phase decisions
---------------
With per-phase empirical means m0, m1 (endpoints) and ma1, ma2, ma3:

* zoom right when ``|ma1 - ma2| < |ma2 - ma3|`` (strict), else zoom left;
  the two events are exact complements.
* the backtracking variant first checks the five-mean test
  ``Q1 < 3/4 * max(Q2, Q3)`` with
  ``Q1 = |(m0+ma1)/2 - (ma3+m1)/2|``,
  ``Q2 = |(m0+ma1+ma3)/3 - m1|``,
  ``Q3 = |m0 - (ma1+ma3+m1)/3|``,
  and pops the zoom history when it fires.

Per phase, the plain variant pulls each of 3 points ``t_j = floor(T/(3J))``
times over ``J = ceil(log2(1/(2 eta)))`` phases; the backtracking variant
pulls each of 5 slots ``t_j = floor(T/(5J))`` times over
``J = ceil(6 ln(1/(2 eta)))`` phases (natural log). Leftover budget is
discarded; a phase never reuses earlier samples. The final estimate is
the midpoint of the interval left after the last phase's update.

A policy run is strictly sequential; distinct runs with distinct
RngStreams can execute in parallel with no shared mutable state.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

from .env import Environment, RngStream, sample_rewards
from .errors import BudgetTooSmall, DomainError, EtaOutOfRange

__all__ = [
    "Decision",
    "SamplingSet",
    "PhaseStats",
    "ZoomHistory",
    "PhaseRecord",
    "PolicyResult",
    "GuaranteeAssumptionWarning",
    "ResolutionWarning",
    "ROOT_SET",
    "phases_sh",
    "phases_shb",
    "event_er",
    "event_el",
    "event_ep",
    "zoom_right",
    "zoom_left",
    "backtrack",
    "run_sh",
    "run_shb",
]

# Dyadic interval endpoints stay exact in float64 up to this depth; beyond
# it midpoints can collide with the endpoints.
EXACT_DYADIC_DEPTH = 52


class GuaranteeAssumptionWarning(UserWarning):
    """Parameters outside the range the failure-probability guarantee covers."""


class ResolutionWarning(UserWarning):
    """Interval width below what float64 midpoint arithmetic resolves exactly."""


class Decision(enum.Enum):
    ZOOM_LEFT = "zoom_left"
    ZOOM_RIGHT = "zoom_right"
    BACKTRACK = "backtrack"


@dataclass(frozen=True)
class SamplingSet:
    """Bracketing points a1 < a2 < a3 of one phase (endpoints 0, 1 implicit).

    ``a2`` is the exact midpoint and ``a3 - a1 == 2**-depth``; both hold
    exactly in float64 while ``depth <= EXACT_DYADIC_DEPTH``.
    """

    a1: float
    a2: float
    a3: float
    depth: int = 0

    def __post_init__(self) -> None:
        if not (0.0 <= self.a1 <= self.a3 <= 1.0):
            raise DomainError(f"sampling points outside [0, 1]: {self}")
        if self.depth < 0:
            raise DomainError(f"depth must be nonnegative: {self}")
        if self.depth <= EXACT_DYADIC_DEPTH:
            if not (self.a1 < self.a2 < self.a3):
                raise DomainError(f"sampling points must be ordered: {self}")
            if self.a2 != (self.a1 + self.a3) / 2.0:
                raise DomainError(f"a2 must be the exact midpoint: {self}")
            if self.a3 - self.a1 != 2.0 ** (-self.depth):
                raise DomainError(f"width must equal 2**-depth: {self}")

    def width(self) -> float:
        return self.a3 - self.a1


ROOT_SET = SamplingSet(0.0, 0.5, 1.0, depth=0)


@dataclass(frozen=True)
class PhaseStats:
    """Empirical means of one phase; each over exactly pulls_per_slot draws.

    The plain policy populates only the three interval slots; the
    backtracking policy also fills the endpoint means ``mean0``/``mean1``.
    """

    mean_a1: float
    mean_a2: float
    mean_a3: float
    pulls_per_slot: int
    mean0: float | None = None
    mean1: float | None = None


@dataclass
class ZoomHistory:
    """Stack of the sampling sets each zoom departed from."""

    _stack: list[SamplingSet] = field(default_factory=list)

    def push(self, a: SamplingSet) -> None:
        self._stack.append(a)

    def pop(self) -> SamplingSet | None:
        """Remove and return the most recent pre-zoom set; None when empty."""
        return self._stack.pop() if self._stack else None

    def __len__(self) -> int:
        return len(self._stack)


@dataclass(frozen=True)
class PhaseRecord:
    """One phase of a run, for trace dumps and diagnostics."""

    phase: int
    sampling_set: SamplingSet
    stats: PhaseStats
    decision: Decision

    def as_dict(self) -> dict:
        s, st = self.sampling_set, self.stats
        return {
            "phase": self.phase,
            "a1": s.a1,
            "a2": s.a2,
            "a3": s.a3,
            "mean0": st.mean0,
            "mean_a1": st.mean_a1,
            "mean_a2": st.mean_a2,
            "mean_a3": st.mean_a3,
            "mean1": st.mean1,
            "pulls_per_slot": st.pulls_per_slot,
            "decision": self.decision.value,
        }


@dataclass(frozen=True)
class PolicyResult:
    """Outcome of one policy run."""

    estimate: float
    pulls_used: int
    trace: tuple[Decision, ...]
    phases: tuple[PhaseRecord, ...] = ()


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not (0.0 < eta < 0.5):
        raise EtaOutOfRange(f"eta={eta} outside (0, 1/2)")
    return eta


def phases_sh(eta: float) -> int:
    """Phase count ceil(log2(1/(2*eta))) of the plain halving schedule."""
    eta = _check_eta(eta)
    return math.ceil(math.log2(1.0 / (2.0 * eta)))


def phases_shb(eta: float) -> int:
    """Phase count ceil(6*ln(1/(2*eta))) of the backtracking schedule."""
    eta = _check_eta(eta)
    return math.ceil(6.0 * math.log(1.0 / (2.0 * eta)))


def event_er(st: PhaseStats) -> bool:
    """True when the right half shows the strictly larger empirical jump."""
    return abs(st.mean_a1 - st.mean_a2) < abs(st.mean_a2 - st.mean_a3)


def event_el(st: PhaseStats) -> bool:
    """Exact complement of :func:`event_er` (ties go left)."""
    return not event_er(st)


def event_ep(st: PhaseStats) -> bool:
    """Five-mean backtracking test: fit outside [a1, a3) beats fit inside."""
    if st.mean0 is None or st.mean1 is None:
        raise DomainError("endpoint means required for the backtracking test")
    q1 = abs((st.mean0 + st.mean_a1) / 2.0 - (st.mean_a3 + st.mean1) / 2.0)
    q2 = abs((st.mean0 + st.mean_a1 + st.mean_a3) / 3.0 - st.mean1)
    q3 = abs(st.mean0 - (st.mean_a1 + st.mean_a3 + st.mean1) / 3.0)
    return q1 < 0.75 * max(q2, q3)


def zoom_right(a: SamplingSet) -> SamplingSet:
    """Keep the right half: (a2, (a2+a3)/2, a3)."""
    return SamplingSet(a.a2, (a.a2 + a.a3) / 2.0, a.a3, a.depth + 1)


def zoom_left(a: SamplingSet) -> SamplingSet:
    """Keep the left half: (a1, (a1+a2)/2, a2)."""
    return SamplingSet(a.a1, (a.a1 + a.a2) / 2.0, a.a2, a.depth + 1)


def backtrack(a: SamplingSet, h: ZoomHistory) -> SamplingSet:
    """Undo the zoom that produced ``a``; at the root (empty history) a no-op."""
    prev = h.pop()
    return a if prev is None else prev


def _phase_means(
    env: Environment,
    a: SamplingSet,
    t_j: int,
    rng: RngStream,
    with_endpoints: bool,
) -> PhaseStats:
    # Slot order fixed for stream reproducibility: a1, a2, a3, then 0, 1.
    m_a1 = float(sample_rewards(env, a.a1, t_j, rng).mean())
    m_a2 = float(sample_rewards(env, a.a2, t_j, rng).mean())
    m_a3 = float(sample_rewards(env, a.a3, t_j, rng).mean())
    if not with_endpoints:
        return PhaseStats(m_a1, m_a2, m_a3, t_j)
    m0 = float(sample_rewards(env, 0.0, t_j, rng).mean())
    m1 = float(sample_rewards(env, 1.0, t_j, rng).mean())
    return PhaseStats(m_a1, m_a2, m_a3, t_j, mean0=m0, mean1=m1)


def _warn_if_depth_exceeds_resolution(depth: int) -> None:
    if depth == EXACT_DYADIC_DEPTH + 1:
        warnings.warn(
            "interval narrower than float64 resolves exactly; the requested "
            "tolerance is below representable midpoint resolution",
            ResolutionWarning,
            stacklevel=3,
        )


def run_sh(env: Environment, T: int, eta: float, rng: RngStream) -> PolicyResult:
    """Plain sequential halving: J phases of 3 slots, zoom only.

    Requires ``floor(T/(3J)) >= 1``. Uses ``3*J*t_j <= T`` pulls.
    """
    J = phases_sh(eta)
    t_j = T // (3 * J)
    if t_j < 1:
        raise BudgetTooSmall(
            f"budget T={T} gives floor(T/(3*{J}))=0 pulls per slot"
        )
    a = ROOT_SET
    trace: list[Decision] = []
    records: list[PhaseRecord] = []
    for j in range(1, J + 1):
        st = _phase_means(env, a, t_j, rng, with_endpoints=False)
        if event_er(st):
            decision = Decision.ZOOM_RIGHT
            a_next = zoom_right(a)
        else:
            decision = Decision.ZOOM_LEFT
            a_next = zoom_left(a)
        _warn_if_depth_exceeds_resolution(a_next.depth)
        trace.append(decision)
        records.append(PhaseRecord(j, a, st, decision))
        a = a_next
    return PolicyResult(
        estimate=a.a2,
        pulls_used=3 * J * t_j,
        trace=tuple(trace),
        phases=tuple(records),
    )


def run_shb(env: Environment, T: int, eta: float, rng: RngStream) -> PolicyResult:
    """Sequential halving with backtracking: J phases of 5 slots.

    Checks the backtracking test first, then the zoom direction. Requires
    ``floor(T/(5J)) >= 1``; uses ``5*J*t_j <= T`` pulls. Emits a
    :class:`GuaranteeAssumptionWarning` when ``eta >= 1/4`` or
    ``T <= 60*ln(1/(2*eta))``, where the failure-probability guarantee for
    this policy lapses (the run itself proceeds normally).
    """
    J = phases_shb(eta)
    t_j = T // (5 * J)
    if t_j < 1:
        raise BudgetTooSmall(
            f"budget T={T} gives floor(T/(5*{J}))=0 pulls per slot"
        )
    if eta >= 0.25 or T <= 60.0 * math.log(1.0 / (2.0 * eta)):
        warnings.warn(
            f"failure-probability guarantee lapses for eta={eta}, T={T} "
            "(needs eta < 1/4 and T > 60*ln(1/(2*eta)))",
            GuaranteeAssumptionWarning,
            stacklevel=2,
        )
    a = ROOT_SET
    history = ZoomHistory()
    trace: list[Decision] = []
    records: list[PhaseRecord] = []
    for j in range(1, J + 1):
        st = _phase_means(env, a, t_j, rng, with_endpoints=True)
        if event_ep(st):
            decision = Decision.BACKTRACK
            a_next = backtrack(a, history)
        elif event_er(st):
            decision = Decision.ZOOM_RIGHT
            history.push(a)
            a_next = zoom_right(a)
        else:
            decision = Decision.ZOOM_LEFT
            history.push(a)
            a_next = zoom_left(a)
        _warn_if_depth_exceeds_resolution(a_next.depth)
        records.append(PhaseRecord(j, a, st, decision))
        trace.append(decision)
        a = a_next
    return PolicyResult(
        estimate=a.a2,
        pulls_used=5 * J * t_j,
        trace=tuple(trace),
        phases=tuple(records),
    )
