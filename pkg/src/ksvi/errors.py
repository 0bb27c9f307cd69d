"""Exception hierarchy shared by all ksvi modules."""


class KsviError(Exception):
    """Base class for every error raised by ksvi."""


class ZeroVector(KsviError, ValueError):
    pass


class DegenerateCross(KsviError, ValueError):
    pass


class UnsupportedComplexCross(KsviError, ValueError):
    pass


class DegeneratePair(KsviError, ValueError):
    pass


class UnknownObservable(KsviError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownContext(KsviError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ParseError(KsviError, ValueError):
    """Malformed input document; ``location`` names the offending path."""

    def __init__(self, message, location=""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class SeedConflict(KsviError, ValueError):
    pass


class CompletionFailed(KsviError, RuntimeError):
    pass


class TheoremCheckFailed(KsviError, AssertionError):
    pass


class OutOfRange(KsviError, ValueError):
    pass


class InsufficientData(KsviError, ValueError):
    pass


class NotUnitary(KsviError, ValueError):
    def __init__(self, max_deviation):
        self.max_deviation = max_deviation
        super().__init__(f"matrix is not unitary (max |UU^dag - I| = {max_deviation:.3e})")


class BadPort(KsviError, ValueError):
    pass
