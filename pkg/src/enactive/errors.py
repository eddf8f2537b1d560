"""Exception hierarchy shared by every module."""

from __future__ import annotations


class EnactiveError(Exception):
    """Base class for all errors raised by the library."""


class CapacityError(EnactiveError):
    """An input exceeds a configured enumeration cap."""

    def __init__(self, what: str, size: int, cap: int) -> None:
        super().__init__(f"{what} of size {size} exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


class InvalidStatementError(EnactiveError, ValueError):
    """A bit vector is not a statement of the language at hand."""


class VocabularyMismatchError(EnactiveError, ValueError):
    """Two objects that must share a language do not."""


class TaskValidationError(EnactiveError, ValueError):
    """A pair of statement sets does not form a valid task."""


class EmptyInputsError(TaskValidationError):
    pass


class EmptyOutputsError(TaskValidationError):
    pass


class OutputsNotInExtensionError(TaskValidationError):
    """Some correct output is not a completion of any input."""

    def __init__(self, message: str, offending: tuple = ()) -> None:
        super().__init__(message)
        self.offending = offending


class ForeignStatementError(TaskValidationError):
    """A task refers to a statement outside its language."""


class NoOutputError(EnactiveError):
    """A policy admits no completion of the presented input."""


class UnlearnableError(EnactiveError):
    """The task has no correct policy, so nothing can be learned."""


class IncorrectPolicyError(EnactiveError, ValueError):
    """An operation needs a policy that is correct for the task."""


class UndefinedUtilityError(EnactiveError):
    """Utility of a task without correct policies is undefined."""


class NoParentError(EnactiveError):
    """The task has no parent, so generalisation is vacuous."""


class UninstantiableError(EnactiveError):
    """An uninstantiated task has no child in the requested vocabulary."""

    def __init__(self, message: str, cause: str) -> None:
        super().__init__(message)
        self.cause = cause


class StackError(EnactiveError, ValueError):
    """Layers do not form a stack (each layer must be a child of the one below)."""


class NotOverConstrainedError(EnactiveError, ValueError):
    """Splintering requires a collective without a shared policy."""


class IrrecoverableCollectiveError(EnactiveError):
    """No subset of the parts of a collective has a shared policy."""

    def __init__(self, message: str, conflicts: list[list[bool]]) -> None:
        super().__init__(message)
        self.conflicts = conflicts


class DegenerateUniverseError(EnactiveError):
    """Random universe generation kept producing degenerate draws."""


class ConfigError(EnactiveError, ValueError):
    """A configuration or scenario file is malformed."""


class RejectionBudgetExhausted(EnactiveError):
    """Rejection sampling gave up before finding an acceptable draw."""
