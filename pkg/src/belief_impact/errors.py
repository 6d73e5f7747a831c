"""Exception hierarchy shared by the library and the CLI."""


class BeliefImpactError(Exception):
    """Base class for every error raised by this package."""


class InvalidModelError(BeliefImpactError, ValueError):
    """An input violates the Gaussian viewer model or a parameter range."""


class DimensionMismatchError(InvalidModelError):
    """A vector or matrix does not match the environment dimension."""


class DegeneratePopulationError(BeliefImpactError):
    """The population makes a quantity undefined (singular moments, 0/0 ratios)."""


class ConvergenceError(BeliefImpactError, RuntimeError):
    """An iterative search ran out of iterations."""


class InfeasibleSamplingError(BeliefImpactError):
    """Rejection sampling cannot realistically satisfy its condition."""


class ConfigurationError(BeliefImpactError, ValueError):
    """The run configuration is incomplete or inconsistent."""
