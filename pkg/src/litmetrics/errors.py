"""Exception types shared across the toolkit.

Everything user-facing derives from ValidationError so the CLI can map any
contract violation to a single exit code.
"""


class ValidationError(ValueError):
    """Input violates a documented contract."""


class CorpusFormatError(ValidationError):
    """Corpus file is malformed; message names the offending line."""


class AlignmentError(ValidationError):
    """Alignment data is malformed or out of range."""


class MetricsError(ValidationError):
    """Metric computation received degenerate or inconsistent input."""


class LangIDError(ValidationError):
    """Language identification or score filtering cannot proceed."""


class PromptError(ValidationError):
    """Prompt construction received invalid inputs."""


class CompletionError(RuntimeError):
    """Completion request failed terminally."""

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class SessionError(ValidationError):
    """Annotation session state is invalid or missing."""


class DuplicateJudgmentError(SessionError):
    """The same annotator already judged this task."""
