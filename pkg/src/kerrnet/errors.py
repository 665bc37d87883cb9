"""Exception types shared across the package."""


class KerrnetError(Exception):
    """Base class for package errors."""


class CapacityError(KerrnetError):
    """Requested object exceeds a configured size limit."""


class BasisMismatchError(KerrnetError):
    """Operands are defined on different occupation bases."""


class ConfigError(KerrnetError):
    """Invalid run configuration; message carries the offending key path."""


class StepSizeError(KerrnetError):
    """Integrator drift exceeded tolerance; a smaller dt is required."""


class PositivityError(KerrnetError):
    """Density matrix developed a negative eigenvalue beyond tolerance."""


class NumericalError(KerrnetError):
    """An underlying numerical routine failed (e.g. eigensolver)."""
