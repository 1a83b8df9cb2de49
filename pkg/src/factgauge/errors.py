"""Exception types shared across the harness."""


class FactGaugeError(Exception):
    """Base class for all harness errors."""


class CorpusError(FactGaugeError):
    """Malformed corpus input: bad record, dangling reference, duplicate id."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class LexiconError(FactGaugeError):
    """Unreadable or inconsistent lexicon resource."""


class PerturbError(FactGaugeError):
    """Diagnostic generation failed a precondition (e.g. missing annotations)."""


class MetricError(FactGaugeError):
    """Metric resolution or scoring failed at the engine level."""


class AdapterError(MetricError):
    """Systemic adapter failure: launch, handshake, or broken stream."""


class UndefinedCorrelationError(FactGaugeError):
    """Correlation requested on a zero-variance input; never reported as 0."""


class StatsError(FactGaugeError):
    """Meta-statistics precondition failure (too few levels, missing scores)."""


class ReportError(FactGaugeError):
    """Report rendering failed (unknown format, incomplete bundle)."""


class ConfigError(FactGaugeError):
    """Run configuration failed validation; maps to exit status 2."""
