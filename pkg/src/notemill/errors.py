"""Shared exception types."""


class NoteMillError(Exception):
    """Base class for all package errors."""


class RuleLoadError(NoteMillError, ValueError):
    """A rule file could not be parsed, validated, or compiled."""


class ConfigError(NoteMillError, ValueError):
    """A pipeline configuration is missing, malformed, or inconsistent."""


class CacheError(NoteMillError, ValueError):
    """A persisted index cache is unreadable, stale, or version-mismatched."""
