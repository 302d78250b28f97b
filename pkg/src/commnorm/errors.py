"""Exception types shared across the package."""


class CommnormError(Exception):
    """Base class for all package errors."""


class ArityError(CommnormError, ValueError):
    """Input arity outside the supported range or mismatched."""


class SizeCapError(CommnormError, ValueError):
    """Instance too large for an exact computation path."""


class WeightOverflowError(CommnormError, OverflowError):
    """Threshold-gate arithmetic would exceed checked 64-bit bounds."""


class InvalidCircuitError(CommnormError, ValueError):
    """Circuit violates the constraints of its declared kind."""


class FileFormatError(CommnormError, ValueError):
    """Malformed truth-table or threshold-list file; carries a line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DistributionSpecError(CommnormError, ValueError):
    """Malformed target- or example-distribution specification."""


class SupportNotEnumerableError(CommnormError, ValueError):
    """Operation requires a finite enumerable support the distribution lacks."""


class ProtocolCostError(CommnormError, RuntimeError):
    """A protocol transmitted more bits than its declared cost."""


class BoostStalledError(CommnormError, RuntimeError):
    """Rejection sampling in the filtering booster fell below the acceptance floor."""

    def __init__(self, round_index, attempts, accepted):
        rate = accepted / attempts if attempts else 0.0
        super().__init__(
            f"boosting stalled in round {round_index}: "
            f"{accepted}/{attempts} draws accepted (rate {rate:.2e})"
        )
        self.round_index = round_index
        self.attempts = attempts
        self.accepted = accepted


class ConfigError(CommnormError, ValueError):
    """Invalid experiment configuration."""
