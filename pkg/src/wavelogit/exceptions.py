"""Exception hierarchy; the CLI maps these onto exit codes."""


class WavelogitError(Exception):
    """Base class for all package errors."""


class DataError(WavelogitError, ValueError):
    """Invalid input data, parameters, or file contents (CLI exit code 2)."""


class ParseError(DataError):
    """A file could not be parsed; carries the offending line number."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class DimensionError(DataError):
    """Shapes of interacting values do not agree."""


class ModelFileError(DataError):
    """A model file is corrupted or carries an unsupported format version."""


class NumericalError(WavelogitError, RuntimeError):
    """Numerical failure while fitting (CLI exit code 3)."""


class ConvergenceError(NumericalError):
    """Iteration cap reached before the convergence test passed.

    Carries the last iterate so callers can inspect how far the solver got.
    """

    def __init__(self, message, last_solution=None, residual=None):
        self.last_solution = last_solution
        self.residual = residual
        super().__init__(message)


class SingularityError(NumericalError):
    """A linear system was singular beyond the jittered fallback."""


class SeparationError(NumericalError):
    """Classes are (quasi-)separable; an unpenalized fit diverged."""


class RankDeficiencyError(NumericalError):
    """Component extraction ran out of rank before reaching the requested count."""

    def __init__(self, message, components_achieved):
        self.components_achieved = components_achieved
        super().__init__(message)


class SparsityError(NumericalError):
    """Soft-thresholding annihilated an entire loading."""

    def __init__(self, message, component_index):
        self.component_index = component_index
        super().__init__(message)


class SelectionError(NumericalError):
    """Every grid point failed during model selection."""


class CriterionUndefinedError(NumericalError):
    """An information criterion is undefined for the given fit (treated as +inf)."""
