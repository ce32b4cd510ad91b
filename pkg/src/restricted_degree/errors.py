"""Exception hierarchy shared by all modules."""


class RestrictedDegreeError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(RestrictedDegreeError, ValueError):
    """Invalid parameters, rule/model pairing or configuration file."""

    exit_code = 2


class InvariantViolation(RestrictedDegreeError, RuntimeError):
    """Bookkeeping inconsistency detected while evolving a replica."""

    exit_code = 3


class Condition6Error(RestrictedDegreeError, ValueError):
    """Some k_d is not positive, so the limit recursion is undefined."""

    def __init__(self, d, k_d):
        super().__init__(f"k_d must be positive, got k_{d} = {k_d!r}")
        self.d = d
        self.k_d = k_d


class EstimationError(RestrictedDegreeError, ValueError):
    """Not enough data for a fit or a normalisation."""
