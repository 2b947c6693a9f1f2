"""Exception hierarchy shared by every stage of the engine."""


class BallisticsError(Exception):
    """Base class for all errors raised by this package."""


class MalformedJpeg(BallisticsError):
    pass


class NoFrameHeader(BallisticsError):
    pass


class NoQuantTable(BallisticsError):
    pass


class NotExif(BallisticsError):
    pass


class MalformedTiff(BallisticsError):
    pass


class ZeroVector(BallisticsError):
    pass


class EmptyDataset(BallisticsError):
    pass


class ManifestError(BallisticsError):
    pass


class FormatError(BallisticsError):
    pass


class BadParams(BallisticsError):
    pass


class EmptySamples(BallisticsError):
    pass


class UnknownProfile(BallisticsError):
    pass


class TooFewSamples(BallisticsError):
    pass


class DecodeError(BallisticsError):
    pass
