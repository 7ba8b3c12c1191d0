"""Exception hierarchy shared by all modules.

Every error carries a short machine-parsable ``reason`` used by the CLI when
mapping failures to exit codes.
"""

from __future__ import annotations


class RepGapError(Exception):
    """Base class. ``exit_code`` is what the CLI returns for this failure."""

    exit_code = 1

    @property
    def reason(self) -> str:
        return f"{type(self).__name__}: {self}"


class DiagramError(RepGapError):
    exit_code = 1


class LetterMismatch(DiagramError):
    pass


class CrossingPairs(DiagramError):
    pass


class UncoveredPosition(DiagramError):
    pass


class FamilyViolation(DiagramError):
    pass


class BoundaryMismatch(DiagramError):
    pass


class NotEndomorphism(DiagramError):
    pass


class ParseError(DiagramError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class BudgetExceeded(RepGapError):
    exit_code = 2

    def __init__(self, predicted: int, budget: int):
        super().__init__(f"predicted {predicted} elements exceeds budget {budget}")
        self.predicted = predicted
        self.budget = budget


class EmptyWindow(RepGapError):
    exit_code = 2


class BadParameters(RepGapError):
    exit_code = 2


class PoleError(RepGapError):
    exit_code = 2

    def __init__(self, index: int):
        super().__init__(f"pole at term {index}")
        self.index = index


class HypothesisViolated(RepGapError):
    exit_code = 2


class NotPrime(RepGapError):
    exit_code = 1


class NotStated(RepGapError):
    exit_code = 2


class UnknownPrefactor(RepGapError):
    exit_code = 2


class FormulaBruteMismatch(RepGapError):
    exit_code = 3


class StructureMismatch(RepGapError):
    exit_code = 3

    def __init__(self, message: str, witness=None):
        super().__init__(message if witness is None else f"{message}: {witness}")
        self.witness = witness
