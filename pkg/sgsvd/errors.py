"""
The `errors` module defines the exception hierarchy shared by the `sgsvd` and `sgbench` packages.

Every exception derives from `SgsvdError` and from the builtin that describes the failure, so callers
may catch either the package class or the familiar builtin (`ValueError`, `ArithmeticError`).

Classes:
    - SgsvdError: Base class for all package errors.
    - ConfigError: Invalid solver or simulation parameters.
    - DimensionMismatchError: Vector, matrix or graph sizes that do not agree.
    - GraphError: Malformed prior graph (self-loop, duplicate edge, bad vertex id).
    - DegenerateUpdateError: An update that collapsed to the zero vector or divided by zero.
    - FormatError: A malformed input file.
"""


class SgsvdError(Exception):
    """
    Base class for every error raised by this project.
    """


class ConfigError(SgsvdError, ValueError):
    """
    Raised when a configuration value is out of range or an option combination is invalid.
    """


class DimensionMismatchError(SgsvdError, ValueError):
    """
    Raised when the lengths of vectors, matrices or graphs involved in one operation disagree.
    """


class GraphError(SgsvdError, ValueError):
    """
    Raised when a prior graph would contain a self-loop, a duplicate edge or an unknown vertex.
    """


class DegenerateUpdateError(SgsvdError, ArithmeticError):
    """
    Raised when an update produces an all-zero vector (so it cannot be normalized) or when a
    coordinate denominator is zero.

    Attributes:
        factor_index (int | None): Index of the factor being extracted when the error was raised
            from a deflation loop, otherwise None.
    """

    def __init__(self, message, factor_index=None):
        """
        :param message: Description of the degenerate situation.
        :param factor_index: Optional index of the factor being fitted.
        """
        if factor_index is not None:
            message = f"factor {factor_index}: {message}"
        super().__init__(message)
        self.factor_index = factor_index


class FormatError(SgsvdError, ValueError):
    """
    Raised when an input file cannot be parsed.

    Attributes:
        path (str): The offending file.
        line (int | None): 1-based line number, when known.
    """

    def __init__(self, path, message, line=None):
        """
        :param path: Path of the file being read.
        :param message: What was wrong.
        :param line: 1-based line number of the problem, if known.
        """
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = str(path)
        self.line = line
