"""Error taxonomy shared by every module.

Three failure kinds cover the whole surface: bad caller input, a numerical
procedure that did not meet its tolerance contract, and requests beyond the
desk-scale caps this package is designed for.
"""


class InvalidInput(ValueError):
    """Caller-supplied data violates a documented precondition."""


class NumericalFailure(RuntimeError):
    """An iterative solve or consistency check missed its tolerance."""


class ResourceLimit(RuntimeError):
    """Problem size exceeds a documented desk-scale cap."""
