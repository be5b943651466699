"""Exception types shared across the package.

Validation problems (bad inputs, inadmissible points, malformed files) derive
from ValueError; failures that can only surface while a computation is running
(sampler overflow, non-finite likelihood, convergence gate) derive from
RuntimeError. The CLI maps the former to exit code 1 and the latter to 2.
"""


class DataError(ValueError):
    """Malformed or inconsistent response data."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class UndefinedRateError(DomainError):
    """Rate of progress requested where it is undefined (zero prior distance)."""


class DegenerateConfigurationError(ValueError):
    """Latent configuration cannot support the requested operation."""


class InsufficientSamplesError(ValueError):
    """Too few posterior samples for the requested diagnostic."""


class UnsupportedExportError(ValueError):
    """Export requested for a geometry or dimension it does not support."""


class SamplerOverflowError(RuntimeError):
    """A rejection sampler exceeded its iteration cap."""


class NonFiniteLikelihoodError(RuntimeError):
    """A chain produced non-finite state; message names the offending block."""


class ConvergenceError(RuntimeError):
    """Convergence gate failed (PSRF above its cutoff)."""
