"""Exception types shared across the toolkit.

Everything raised for malformed data or bad inputs derives from
:class:`NordialError`, so callers (and the CLI) can distinguish data
problems from programming errors.
"""


class NordialError(Exception):
    """Base class for data and format errors raised by this package."""


class CorpusError(NordialError):
    """Invalid corpus content or a malformed corpus file."""


class LexiconError(NordialError):
    """Invalid term lexicon content or a malformed lexicon file."""


class AnalyticsError(NordialError):
    """Degenerate input to a statistical routine (empty, zero marginal, ...)."""


class ModelError(NordialError):
    """Invalid training input or a malformed model / feature-space file."""
