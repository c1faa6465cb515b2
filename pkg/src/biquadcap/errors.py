"""Exception types shared by every module."""


class PreconditionError(ValueError):
    """Input outside the family of fields the library handles."""


class InconsistencyError(RuntimeError):
    """An exact verification failed.

    Either a bug or a falsified mathematical claim; callers must never
    swallow it silently.
    """
