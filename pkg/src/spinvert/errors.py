"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Inputs violate a documented precondition or type invariant."""


class SolverError(RuntimeError):
    """A solver could not run or produce a result (e.g. size cap exceeded)."""


class FileFormatError(ValueError):
    """A data file could not be parsed; message carries path and line number."""
