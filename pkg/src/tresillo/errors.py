"""Exception hierarchy.

Every error carries the process exit code the command line uses for it, so
``cli`` can map failures without a lookup table.
"""


class TresilloError(Exception):
    exit_code = 1


# -- parsing / file format (exit 2) ------------------------------------------

class SmfError(TresilloError):
    exit_code = 2


class MalformedVlq(SmfError):
    pass


class BadHeader(SmfError):
    pass


class UnsupportedDivision(SmfError):
    pass


class UnsupportedFormat(SmfError):
    pass


class TruncatedTrack(SmfError):
    pass


class MalformedEvent(SmfError):
    """Data byte with no running status to apply it to."""


class ManifestParseError(TresilloError):
    exit_code = 2

    def __init__(self, row, reason):
        super().__init__(f"row {row}: {reason}")
        self.row = row
        self.reason = reason


class TrendParseError(TresilloError):
    exit_code = 2


# -- rhythm content (exit 3) -------------------------------------------------

class NotFourFour(TresilloError):
    exit_code = 3


class EmptyRhythm(TresilloError):
    exit_code = 3


# -- numeric preconditions ---------------------------------------------------

class EmptyInput(TresilloError, ValueError):
    pass


class ZeroVector(TresilloError, ValueError):
    pass


class DegenerateTheta(TresilloError, ValueError):
    pass


class ZeroDenominator(TresilloError, ZeroDivisionError):
    pass


class ZeroVariance(TresilloError, ValueError):
    pass


class EmptySeries(TresilloError, ValueError):
    pass


class FitFailed(TresilloError):
    exit_code = 4


class InsufficientData(TresilloError, ValueError):
    exit_code = 5


class NoScoredSongs(TresilloError):
    exit_code = 6
