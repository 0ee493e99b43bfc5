"""Exception types shared across the package."""


class NspLabError(Exception):
    """Base class for domain errors raised by nsplab."""


class SymbolError(NspLabError, ValueError):
    """A string contains a symbol outside the automaton's alphabet."""


class InvalidStateError(NspLabError, ValueError):
    pass


class AlphabetMismatchError(NspLabError, ValueError):
    pass


class NotFixedLengthError(NspLabError, ValueError):
    """The automaton does not accept a subset of Sigma^N for the requested N."""


class InfeasibleBudgetError(NspLabError, ValueError):
    pass


class ShapeMismatchError(NspLabError, ValueError):
    pass


class EmptySampleError(NspLabError, ValueError):
    pass


class EmptyLanguageError(NspLabError, ValueError):
    pass


class EmptySupportError(NspLabError, ValueError):
    pass


class NotPositiveError(NspLabError, ValueError):
    """A string offered as a positive example is not in the target language."""


class BudgetExceededError(NspLabError, ValueError):
    pass


class InconsistentExampleError(NspLabError, ValueError):
    pass


class LabelConflictError(NspLabError, ValueError):
    """Two observations disagree, so no single language explains the sample."""

    def __init__(self, prefix, message):
        super().__init__(f"label conflict at prefix {prefix!r}: {message}")
        self.prefix = prefix
