"""Exception types and process exit codes shared across the toolkit."""

from __future__ import annotations

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_BACKEND = 4


class ToolkitError(Exception):
    """Base error. Carries a machine-readable name and a CLI exit code."""

    exit_code = EXIT_DATA

    def to_json(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


class DataError(ToolkitError):
    """Malformed or inconsistent input data."""

    exit_code = EXIT_DATA


class LineCountMismatch(DataError):
    pass


class UnknownPair(DataError):
    pass


class UnlocatableAnswer(DataError):
    pass


class SpanOutOfWindow(DataError):
    pass


class ExtractivityViolation(DataError):
    pass


class SchemaViolation(DataError):
    pass


class MissingAlternateAnswer(DataError):
    pass


class NoOverlap(DataError):
    pass


class BackendError(ToolkitError):
    """A configured model backend failed or misbehaved."""

    exit_code = EXIT_BACKEND


class BackendUnavailable(BackendError):
    pass


class ProtocolViolation(BackendError):
    pass


class BackendTimeout(BackendError):
    pass


class EmptyTranslation(BackendError):
    pass
