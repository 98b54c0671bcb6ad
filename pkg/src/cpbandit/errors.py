"""Exception types shared across the package.

Hierarchy: everything derives from :class:`CpBanditError`, with
:class:`PolicyError` grouping the failures a policy run can raise at a
given budget (the harness turns those into flagged rows instead of
aborting a sweep).
"""


class CpBanditError(Exception):
    """Base class for all cpbandit errors."""


class ConfigError(CpBanditError):
    """Invalid or incomplete experiment configuration."""


class DomainError(CpBanditError):
    """A numeric argument lies outside its mathematical domain."""


class DegenerateEnvironment(CpBanditError):
    """mu1 == mu2: there is no change in mean to locate."""


class OutOfRangeChangePoint(CpBanditError):
    """x_star outside the half-open unit interval [0, 1)."""


class NegativeSigma(CpBanditError):
    """Noise scale must be nonnegative."""


class OutOfRangeAction(CpBanditError):
    """Queried action outside the action space [0, 1]."""


class SplitOutOfRange(CpBanditError):
    """Split index outside 1..n-1."""


class SampleTooShort(CpBanditError):
    """Fewer than two observations: no admissible split."""


class PolicyError(CpBanditError):
    """Base for errors raised while running a policy."""


class BudgetTooSmall(PolicyError):
    """Budget too small to give every sampling slot at least one pull."""


class EtaOutOfRange(PolicyError):
    """Tolerance eta outside the open interval (0, 1/2)."""


class BadExplorationBudget(PolicyError):
    """Exploration pull count L must be even and at least 2."""


class NonpositiveSigma(PolicyError):
    """The adaptive policy requires a strictly positive known noise scale."""
