"""Shared exception types."""


class BudgetExceeded(RuntimeError):
    """A computation refused to start because a resource cap would be exceeded.

    The message always names the limiting quantity so callers can tell which
    knob to raise.
    """

    def __init__(self, quantity, value, limit):
        self.quantity = quantity
        self.value = value
        self.limit = limit
        super().__init__(f"{quantity} = {value} exceeds budget {limit}")


class DegreeMismatch(ValueError):
    """Operands act on point sets of different sizes."""


class FormatError(ValueError):
    """Malformed group / matrix / coloring file."""


class LemmaInapplicable(RuntimeError):
    """A conditional reduction was asked for but its hypothesis fails.

    Distinct from a check returning False: the reduction simply does not
    apply to the given input (e.g. the closure is no longer an affine group).
    """


class HypothesisNotMet(RuntimeError):
    """A conditional equivalence check was given inputs outside its hypotheses.

    Raised so that a vacuous pass can never masquerade as a verified
    conclusion.
    """


class NotDecomposable(ValueError):
    """A map does not respect the tensor decomposition; carries a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
