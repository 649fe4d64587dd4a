"""Exception types shared across the engine."""


class VarplanError(Exception):
    """Base class for all engine errors."""


class UnknownConceptError(VarplanError):
    pass


class UnknownParentError(VarplanError):
    pass


class CycleError(VarplanError):
    pass


class DuplicatePropertyError(VarplanError):
    pass


class UnknownInstanceError(VarplanError):
    pass


class UnknownPropertyError(VarplanError):
    pass


class DomainMismatchError(VarplanError):
    pass


class InvariantError(VarplanError):
    """A model invariant would be violated (e.g. container over capacity)."""


class EmptyVariationError(VarplanError):
    pass


class PreconditionViolatedError(VarplanError):
    pass


class NoChangesDetectedError(VarplanError):
    pass


class InvalidAnswerError(VarplanError):
    pass


class StaleVersionError(VarplanError):
    pass


class DocumentError(VarplanError):
    """A document in the interchange format failed validation.

    Carries the path to the offending node so clients can point at it.
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message
