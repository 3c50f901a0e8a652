"""Exception hierarchy shared across the package."""

from __future__ import annotations


class RPGuardError(Exception):
    """Base class for all package errors."""


class SchemaError(RPGuardError):
    """A file does not match its declared schema (header, version, dimensions)."""


class RecordError(SchemaError):
    """A single record failed validation; carries file position and field."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
        if line is not None:
            prefix = f"{prefix}{line}:"
        super().__init__(f"{prefix} {message}" if prefix else message)


class ValidationError(RPGuardError):
    """A dataset-level invariant was violated (duplicate uids, overlapping splits)."""


class ConfigError(RPGuardError):
    """Invalid configuration value or combination."""


class RuleConfigError(RPGuardError):
    """A hot-fix rule is malformed or cannot be applied to an interaction."""


class CheckpointError(RPGuardError):
    """A policy checkpoint is unreadable, truncated, or from an unknown format version."""


class NumericsError(RPGuardError):
    """Non-finite values encountered during a numerical computation."""


class DeprecatedSampleError(RPGuardError):
    """An operation was asked to consume a sample whose lifecycle status is DEPRECATED."""


class StageError(RPGuardError):
    """A lifecycle stage failed; carries the stage tag."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")
