"""Exception types shared across the package."""


class SelmetError(Exception):
    """Base class for all selmet errors."""


class InvalidInputError(SelmetError, ValueError):
    """An operation received arguments violating its preconditions."""


class BlowUpError(SelmetError, RuntimeError):
    """Integration produced a non-finite state.

    Carries the index of the step at which the state first became
    non-finite.
    """

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"non-finite state at integration step {step}")


class SolverFailureError(SelmetError, RuntimeError):
    """The shooting solver could not evaluate any trajectory."""


class SamplerInitError(SelmetError, RuntimeError):
    """The initial shooting solve of an MCMC chain did not converge."""


class DegenerateSeriesError(SelmetError, ValueError):
    """A chain statistic was requested for a zero-variance series."""


class ConfigError(SelmetError, ValueError):
    """Configuration file failed to parse or validate.

    ``violations`` lists every constraint violation found (empty for
    pure parse errors).
    """

    def __init__(self, message, violations=None):
        self.violations = list(violations or [])
        super().__init__(message)


class FileFormatError(SelmetError, ValueError):
    """A delimited data file did not match its schema.

    ``row`` is the 1-based line number of the offending row when known.
    """

    def __init__(self, path, message, row=None):
        self.path = str(path)
        self.row = row
        where = f"{path}:{row}" if row is not None else str(path)
        super().__init__(f"{where}: {message}")
