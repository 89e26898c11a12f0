"""Exception hierarchy shared by every module.

The CLI maps these onto process exit codes, see ``src/cli/main.py``.
"""

from __future__ import annotations

from typing import Any


class FkProbeError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class DomainError(FkProbeError, ValueError):
    """An argument violates a documented precondition."""

    exit_code = 2


class ConfigError(FkProbeError):
    """A configuration file or environment value cannot be used."""

    exit_code = 2


class NumericError(FkProbeError, ArithmeticError):
    """A numerical routine failed to reach its tolerance.

    ``diagnostics`` holds whatever the failing routine knew at the time
    (iterations, achieved error, bracket, ...) so callers can report it.
    """

    exit_code = 3

    def __init__(self, message: str, **diagnostics: Any) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = ", ".join(f"{key}={value!r}" for key, value in sorted(self.diagnostics.items()))
        return f"{base} ({details})"


class SlowConvergenceError(NumericError):
    """Eigen-series evaluated below its usable time range."""


class AcceptanceError(FkProbeError):
    """A numerical self-check failed."""

    exit_code = 4

    def __init__(self, message: str, **statistics: Any) -> None:
        super().__init__(message)
        self.statistics = statistics
