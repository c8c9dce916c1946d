"""Exception taxonomy shared across the package.

Domain failures (bad data, broken contracts, degenerate geometry) all derive
from TopodivError so callers, and in particular the command line layer, can
separate them from programming errors and map them to a stable exit code.
"""


class TopodivError(Exception):
    """Base class for every domain error raised by this package."""


class ValidationError(TopodivError):
    """Input violates a documented contract (shape, symmetry, ordering...)."""


class SingularityError(TopodivError):
    """A subgradient is undefined because two active points coincide.

    Carries the offending point indices so training loops can log which
    pair collapsed before deciding to skip the term.
    """

    def __init__(self, message: str, indices: tuple[int, int] | None = None):
        super().__init__(message)
        self.indices = indices
