class BianchiError(ValueError):
    """Base class for every error raised by bianchi_height."""


class InvalidFieldError(BianchiError):
    pass


class ZeroIdealError(BianchiError):
    pass


class NotCoprimeError(BianchiError):
    pass


class NonPrincipalError(BianchiError):
    pass


class NotPositiveDefiniteError(BianchiError):
    pass


class ReductionError(BianchiError):
    """An exact check that the reduction algorithm guarantees did not hold."""


class CountingError(BianchiError):
    pass


class CodecError(BianchiError):
    """Malformed rational, point, matrix or certificate payload."""
