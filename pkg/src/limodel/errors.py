"""Exception classes. Each carries the CLI exit code it maps to."""

from __future__ import annotations


class LiModelError(Exception):
    exit_code = 10


class DomainError(LiModelError, ValueError):
    """Argument outside the documented domain (bad n, k, T, ...)."""

    exit_code = 7


class PoleError(DomainError):
    """Evaluation requested at (or numerically on top of) a pole."""

    exit_code = 7


class NearZeroError(DomainError):
    """Logarithmic derivative requested too close to a zero."""

    exit_code = 7


class AccuracyError(LiModelError, ArithmeticError):
    """Series cutoff exhausted before the requested accuracy was reached."""

    exit_code = 8


class OverflowRiskError(DomainError):
    exit_code = 7


class MissedZeroError(LiModelError):
    """Zero count disagrees with the Riemann-von Mangoldt estimate."""

    exit_code = 6


class CacheError(LiModelError):
    exit_code = 3


class BudgetExceededError(LiModelError):
    """Adaptive quadrature hit max_subdivisions. ``partial`` holds the result so far."""

    exit_code = 4

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class FitFailureError(LiModelError):
    """Tail-model fit window unusable (span too small or residual too large)."""

    exit_code = 5
