"""Exception hierarchy shared by every module."""


class PetriNetError(Exception):
    """Base class for all errors raised by ntpetri."""


class DuplicateName(PetriNetError, ValueError):
    pass


class EmptyColorTable(PetriNetError, ValueError):
    pass


class UnknownNode(PetriNetError, LookupError):
    """A place, color or transition name/id that the net does not declare."""


class NegativeTokens(PetriNetError, ValueError):
    """Applying a delta would leave some (place, color) below zero tokens."""


class NotEnabled(PetriNetError):
    pass


class DeltaLimitExceeded(PetriNetError):
    """A custom transition produced more deltas than the configured cap."""


class ContractViolation(PetriNetError):
    """Host code broke a documented contract (e.g. a delta touching undeclared places)."""


class NotAPartition(PetriNetError, ValueError):
    pass


class InvalidPartition(PetriNetError, ValueError):
    pass


class IndexOutOfRange(PetriNetError, IndexError):
    pass


class MismatchedStart(PetriNetError, ValueError):
    pass


class CallbackError(PetriNetError):
    """A transition callback raised; the run was aborted.

    ``trace`` holds every firing committed before the abort.
    """

    def __init__(self, message, trace=None, transition=None):
        super().__init__(message)
        self.trace = trace
        self.transition = transition


class NetSyntaxError(PetriNetError):
    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class NetSemanticError(PetriNetError):
    pass


class VersionError(PetriNetError):
    pass


class UnserializableTransition(PetriNetError):
    pass


class InvalidArc(PetriNetError, ValueError):
    """Arc weight below 1 or otherwise unusable arc entry."""
