"""Exception hierarchy shared by all pcstream modules."""


class PcstreamError(Exception):
    """Base class; the CLI maps every subclass to a nonzero exit code."""


class DegenerateSegment(PcstreamError, ValueError):
    pass


class InvalidCurve(PcstreamError, ValueError):
    pass


class TooFewSamples(PcstreamError, ValueError):
    pass


class NonMonotoneTime(PcstreamError, ValueError):
    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class DuplicateClass(PcstreamError, ValueError):
    pass


class DimensionMismatch(PcstreamError, ValueError):
    pass


class EmptyWindow(PcstreamError, ValueError):
    pass


class EmptyPattern(PcstreamError, ValueError):
    pass


class OffsetOutOfRange(PcstreamError, ValueError):
    pass


class InvalidClass(PcstreamError, ValueError):
    pass


class MissingColumn(PcstreamError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ParseError(PcstreamError, ValueError):
    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class ConfigError(PcstreamError, ValueError):
    pass
