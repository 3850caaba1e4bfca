"Exceptions raised by marswitch, each carrying the CLI exit code."


class MarswitchError(RuntimeError):
    """Base class for errors that map to a stable CLI exit code."""
    exit_code = 1


class ModelValidityError(MarswitchError):
    """The model specification is invalid or not stationary."""
    exit_code = 2


class RankConditionError(MarswitchError):
    """A rank or identification condition does not hold."""
    exit_code = 3


class SingularGramError(RankConditionError):
    """A Gram matrix of the alternating least squares is singular.

    Parameters
    ----------
    factor : str
        Name of the coefficient matrix being updated (``'A'``, ``'B'``,
        ``'C'`` or ``'D'``).
    cause : str
        Human readable description of why the matrix is singular.
    """

    def __init__(self, factor, cause):
        self.factor = factor
        self.cause = cause
        super().__init__(
            f"Gram matrix for the update of {factor} is singular: {cause}"
        )


class SeriesFormatError(MarswitchError):
    """A series, fit or result file is malformed."""
    exit_code = 4


class ConfigError(MarswitchError):
    """A run configuration is invalid (strict mode)."""
    exit_code = 4
