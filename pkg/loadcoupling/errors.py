class LoadCouplingError(Exception):
    """Base class for every error raised by the loadcoupling package."""


class InvalidConfigError(LoadCouplingError, ValueError):
    """A scenario, formula, option set or input file is malformed."""


class PreconditionError(LoadCouplingError, ValueError):
    """An operation was called on an argument it does not accept."""


class DegenerateLinkError(LoadCouplingError):
    """A serving set delivers zero signal power to its UE."""


class InfeasibleDemandError(LoadCouplingError):
    """A served UE has zero SINR, so its demand needs infinite load."""


class ConvergenceError(LoadCouplingError):
    """A fixed point was required but the iteration did not converge."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ModelError(LoadCouplingError):
    """A linear model could not be built, parsed or decoded."""


class InfeasibleModelError(LoadCouplingError):
    """The linear model has no feasible leaf."""


class SearchLimitError(LoadCouplingError):
    """An exhaustive search would exceed its enumeration guard."""
