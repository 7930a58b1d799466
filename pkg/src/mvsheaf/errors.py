"""Exception hierarchy shared by every module of the package."""


class MvError(Exception):
    """Base class for domain errors (CLI exit status 1)."""


class PreconditionError(MvError):
    """An operation was called on inputs violating its precondition.

    ``witness`` carries whatever concrete data shows the violation
    (a vertex, a pair of elements, ...), or ``None``.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ResourceLimitError(MvError):
    """A configured size cap would be exceeded."""


class TrivialAlgebraError(MvError):
    """The trivial algebra has no prime ideals, so it has no spectrum."""


class InternalInconsistencyError(MvError):
    """Two characterizations that must agree did not.

    Raised when equivalent definitions disagree, which means the input
    tables are corrupted (or there is a bug).
    """


class TermSyntaxError(MvError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position
