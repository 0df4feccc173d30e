"""Exception hierarchy.

Everything numerical derives from :class:`SimulationError` so the command line
can map it to a single exit status; configuration problems are separate.
"""


class SimulationError(Exception):
    """Base class for numerical or resolution failures."""


class UnsupportedOrderError(SimulationError, ValueError):
    """Hermite order beyond the supported recurrence range."""


class WindowingError(SimulationError):
    """The field reached the edge of its sampling window."""


class MisplacedElementError(SimulationError, ValueError):
    """An optical element does not sit on the plane it is applied at."""


class ResolutionError(SimulationError):
    """A sampled kernel failed its closed-form cross-check."""


class InsufficientFringesError(SimulationError, ValueError):
    """Too few fringes to estimate a spacing."""


class UndefinedVisibilityError(SimulationError, ValueError):
    """Visibility requested on a window with zero signal."""


class GridMismatchError(SimulationError, ValueError):
    """Two profiles that must share a scan grid do not."""


class ConfigError(ValueError):
    """Malformed scenario configuration.

    Parameters
    ----------
    message : str
        What went wrong.
    line : int, optional
        1-based line number in the source text.
    key : str, optional
        Offending key, if any.
    """

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
