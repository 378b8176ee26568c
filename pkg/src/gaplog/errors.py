"""Exception hierarchy shared across the package."""

from __future__ import annotations


class GaplogError(Exception):
    """Base class for all errors raised by this package."""


class ConfigMismatchError(GaplogError):
    """Two values from different lattice configurations were combined."""


class OffGridError(GaplogError):
    """A numeric annotation is not exactly representable on the grid."""


class ConversionError(GaplogError):
    """An interval cannot be mapped exactly onto the target grid."""


class ParseError(GaplogError):
    """Syntax or well-formedness error in DSL text."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ReservedSymbolError(GaplogError):
    """The reserved atom `incon` was used where it is not allowed."""


class UndefinedSatisfactionError(GaplogError):
    """Satisfaction was queried against a conflicted interpretation."""


class InconsistentProgramError(GaplogError):
    """Entailment was queried on an inconsistent program."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class OracleTooLargeError(GaplogError):
    """An exhaustive oracle's search space exceeds its configured cap."""


class InternalInvariantError(GaplogError):
    """A result contradicts a guaranteed invariant; indicates a bug."""


class DatasetError(GaplogError):
    """A training dataset is malformed or inconsistent with the program."""


class TrainingError(GaplogError):
    """Training cannot proceed or could not accept any update."""

    def __init__(self, message: str, history=None):
        super().__init__(message)
        self.history = history
