"""Shared exception types.

CoverageError and RegionError are precondition failures (CLI exit 2);
IngestError covers malformed or inconsistent coefficient data.
"""

from __future__ import annotations


class CoverageError(ValueError):
    """A computation needs coefficients beyond the available table."""

    def __init__(self, message: str, required_n_max: int | None = None):
        super().__init__(message)
        self.required_n_max = required_n_max


class IngestError(ValueError):
    """Coefficient input is malformed or fails validation."""


class RegionError(ValueError):
    """Evaluation point lies outside the enforced convergence region."""

    def __init__(self, message: str, thresholds: dict | None = None):
        super().__init__(message)
        self.thresholds = thresholds or {}
