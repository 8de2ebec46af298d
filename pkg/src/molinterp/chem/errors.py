"""Exception hierarchy for the chemistry core."""

from __future__ import annotations


class ChemError(ValueError):
    """Base class for every chemistry-level failure."""


class SmilesError(ChemError):
    """Raised when a SMILES string cannot be turned into a molecule."""

    def __init__(self, message: str, text: str = "", position: int | None = None):
        self.text = text
        self.position = position
        if position is not None:
            message = f"{message} (at position {position} in {text!r})"
        super().__init__(message)


class SmilesSyntaxError(SmilesError):
    pass


class UnclosedRing(SmilesError):
    pass


class UnbalancedParen(SmilesError):
    pass


class UnknownElement(SmilesError):
    pass


class ValenceError(SmilesError):
    pass


class KekulizationError(SmilesError):
    pass


class IndexOutOfRange(IndexError):
    """An atom index does not exist in the molecule."""
