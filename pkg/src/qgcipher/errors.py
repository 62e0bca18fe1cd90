"""Exception hierarchy.

Everything raised for bad input derives from :class:`QGError`, which the CLI
maps to exit code 2.
"""


class QGError(ValueError):
    """Base class for data and format errors."""


class DuplicateInRowError(QGError):
    def __init__(self, row):
        super().__init__(f"duplicate symbol in row {row}")
        self.row = row


class DuplicateInColumnError(QGError):
    def __init__(self, col):
        super().__init__(f"duplicate symbol in column {col}")
        self.col = col


class SymbolOutOfRangeError(QGError):
    pass


class OrderOutOfRangeError(QGError):
    pass


class OrderTooLargeForExhaustiveError(QGError):
    pass


class TableFormatError(QGError):
    pass


class WrongTableOrderError(QGError):
    pass


class KeyFormatError(QGError):
    pass


class UnalignedInputError(QGError):
    pass


class MalformedEnvelopeError(QGError):
    pass


class BadPaddingError(QGError):
    pass


class SequenceTooShortError(QGError):
    pass


class DuplicateNameError(QGError):
    pass


class SmokeTestFailedError(QGError):
    pass


class UnknownCipherError(QGError, KeyError):
    pass


class NotRiffError(QGError):
    pass


class UnsupportedFormatError(QGError):
    pass


class TruncatedChunkError(QGError):
    pass
