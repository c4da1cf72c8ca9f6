"""Exception types shared across the package.

Plain ``ValueError`` is used for ordinary argument validation; the classes
here exist where callers need to catch a specific failure or carry extra
payload (e.g. which query tokens were dropped).
"""


class ChromatikaError(Exception):
    """Base class for package-specific errors."""


class IngestError(ChromatikaError):
    """A corpus entry could not be ingested. Carries the entry id."""

    def __init__(self, entry_id: str, message: str):
        super().__init__(f"entry {entry_id!r}: {message}")
        self.entry_id = entry_id


class DegenerateHistogramError(ChromatikaError):
    """A color histogram has too few nonzero bins to match a 5-color palette."""


class QueryError(ChromatikaError):
    """No query token survived normalization and vocabulary lookup."""

    def __init__(self, dropped_tokens: list[str]):
        joined = ", ".join(dropped_tokens) or "(empty query)"
        super().__init__(f"no in-vocabulary tokens in query; dropped: {joined}")
        self.dropped_tokens = list(dropped_tokens)


class CheckpointError(ChromatikaError):
    """A model checkpoint is missing, malformed, or fails validation."""
