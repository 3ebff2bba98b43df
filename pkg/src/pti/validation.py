"""Shared parameter checks used by the estimators and the CLI."""

from __future__ import annotations

__all__ = ["check_non_negative", "check_positive_int", "check_unit_interval"]


def check_non_negative(value: float, name: str) -> float:
    if value < 0:
        raise ValueError(f"{name} must be >= 0, got {value}")
    return value


def check_positive_int(value: int, name: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return value


def check_unit_interval(value: float, name: str) -> float:
    """Require ``0 <= value < 1`` (the valid range for pruning thresholds)."""
    if not 0 <= value < 1:
        raise ValueError(f"{name} must be in [0, 1), got {value}")
    return value
