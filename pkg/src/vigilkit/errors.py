"""Exception types shared across the toolkit."""


class VigilkitError(Exception):
    """Base class for all toolkit-specific errors."""


class ParseError(VigilkitError):
    """A malformed event-log line. Carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class StructureError(VigilkitError):
    """An event log that parses line-by-line but violates session structure."""


class CalibrationError(VigilkitError):
    """Not enough response times to calibrate adaptive thresholds."""


class PipelineError(VigilkitError):
    """A signal-processing stage produced an unusable result."""


class SingularFitError(VigilkitError):
    """Rank-deficient regression design. Carries the offending column indices."""

    def __init__(self, columns, message: str | None = None):
        self.columns = tuple(columns)
        super().__init__(message or f"design matrix is rank deficient; collinear columns: {self.columns}")
