"""Errors raised by the numerical kit."""

from __future__ import annotations


class ShapeMismatch(ValueError):
    pass


class MissingCache(RuntimeError):
    pass


class SingleClass(ValueError):
    """A ranking metric was asked for with only one class present."""


class NonFiniteLoss(FloatingPointError):
    def __init__(self, message: str, epoch: int | None = None, step: int | None = None):
        super().__init__(message)
        self.epoch = epoch
        self.step = step
