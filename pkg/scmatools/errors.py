"""Exceptions raised by SCMAtools."""


class ScmaError(ValueError):
    """Base class for every error raised by SCMAtools."""


class ZeroEnergy(ScmaError):
    """A constellation with zero average energy cannot be normalized."""


class UnsupportedSize(ScmaError):
    """The requested point count cannot be built by a generator."""


class UnknownName(ScmaError):
    """No builtin, bundled or on-disk constellation has the given name."""


class ParseError(ScmaError):
    """A constellation or configuration file is malformed."""


class InvariantViolation(ScmaError):
    """A constellation breaks one of its structural invariants."""

    def __init__(self, invariant, message):
        """
        Create a new InvariantViolation.

        Parameters:
            invariant (str): Name of the failed invariant check
            message (str): Human readable description
        """
        super().__init__(f'[{invariant}] {message}')
        self.invariant = invariant


class NotUnitary(ScmaError):
    """A rotation is not unitary within tolerance."""


class DegeneratePair(ScmaError):
    """Two constellation points coincide in every dimension."""


class DimensionMismatch(ScmaError):
    """Array shapes do not agree with the system configuration."""


class InvalidN0(ScmaError):
    """Noise spectral density must be positive."""


class InvalidConfig(ScmaError):
    """Detector inputs are inconsistent with the system configuration."""


class NonFinite(ScmaError):
    """A numerical routine produced NaN or infinite values."""


class TooLarge(ScmaError):
    """Exhaustive enumeration would exceed the hypothesis guard."""


class LengthMismatch(ScmaError):
    """A bit or LLR vector has the wrong length for the frame plan."""


class ConfigError(ScmaError):
    """An experiment or sweep configuration is invalid."""


class GridMismatch(ScmaError):
    """Sweep results do not share the requested SNR point."""


class WorkerFailure(RuntimeError):
    """A sweep worker process exited with an error."""
