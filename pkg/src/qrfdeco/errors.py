"""Exception hierarchy shared by all modules."""


class QRFError(Exception):
    """Base class. ``module`` is filled in by the scenario runner."""

    module = None


class ConfigurationError(QRFError, ValueError):
    """Invalid grid, spec or configuration document.

    ``line`` and ``key`` point at the offending input when known.
    """

    def __init__(self, message, line=None, key=None):
        super().__init__(message)
        self.line = line
        self.key = key


class InvariantError(QRFError):
    """A numerical invariant (norm, trace, hermiticity, positivity) failed."""


class EdgeGuardError(InvariantError):
    """Amplitude leaked into the outer band of a periodic momentum grid."""


class GridMismatchError(QRFError, ValueError):
    """Operands live on different grids or have different dimensions."""


class NoDecoherenceError(QRFError, ValueError):
    """The requested timescale is infinite (no decoherence)."""


class ParameterRegimeError(InvariantError):
    """Parameters put an integrand outside the range a grid can represent."""


class EmptyBinError(QRFError, ValueError):
    """A pointer bin holds no grid points or no probability. ``bins`` lists them."""

    def __init__(self, message, bins=()):
        super().__init__(message)
        self.bins = tuple(bins)
