"""Exception types shared across the engine.

Argument and precondition violations raise plain ``ValueError``; the classes
here cover failure modes that callers are expected to branch on.
"""


class BackendUnavailable(Exception):
    """The model backend could not be reached. Retryable."""


class ProtocolError(Exception):
    """The backend answered, but the payload violates the wire contract."""


class TraceParseError(Exception):
    """A trace file is malformed. Carries the 1-based line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number
