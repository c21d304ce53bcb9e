from typing import List, Optional


class InvalidFileFormatError(ValueError):
    """
    Exception raised when an invalid file format is encountered.

    Inherits from `ValueError` and is used to indicate that a file (configuration, matrix, group element
    or state file) has an unsupported or malformed format.
    """
    pass


class ConfigFileNotFoundError(FileNotFoundError):
    """
    Exception raised when a configuration file cannot be found.

    Inherits from `FileNotFoundError` and is used to indicate that the specified configuration file
    does not exist or cannot be accessed.
    """
    pass


class ExperimentBootstrapError(Exception):
    """
    Exception raised when there is an error during the experiment bootstrap process.

    This class is used to represent errors that occur when loading or initializing an experiment plugin.
    """
    pass


class InvalidInputError(ValueError):
    """
    Exception raised when an operation is called with inputs violating its preconditions.
    """
    pass


class DimensionMismatchError(InvalidInputError):
    """
    Exception raised when matrices, vectors or spaces of incompatible sizes are combined.
    """
    pass


class SpectrumError(InvalidInputError):
    """
    Exception raised when a shift parameter lies on (or numerically next to) the spectrum of a Dirac operator.
    """
    pass


class TowerMismatchError(InvalidInputError):
    """
    Exception raised when an operator built on one tensor tower is used with another one.
    """
    pass


class BudgetError(InvalidInputError):
    """
    Exception raised when an estimation budget cannot support the requested computation.
    """
    pass


class ResourceCapError(RuntimeError):
    """
    Exception raised when a computation would exceed a configured resource cap (ball size, tower dimension).
    """
    pass


class InvariantViolationError(AssertionError):
    """
    Exception raised when an identity that must hold exactly is violated beyond its numerical tolerance.

    Attributes:
        failures (List[str]): Human readable descriptions of every violated identity.
    """

    def __init__(self, message: str, failures: Optional[List[str]] = None):
        super().__init__(message)
        self.failures = failures or [message]


class DegeneracyError(ValueError):
    """
    Exception raised when a seminorm-equivalence constant is infinite where a finite one is required.

    Attributes:
        level (int): The first tower level with an infinite constant.
    """

    def __init__(self, message: str, level: int):
        super().__init__(message)
        self.level = level
