"""Exception types raised by the solvers and tools."""


class SeqbapError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInstance(SeqbapError, ValueError):
    """Malformed graph, matching or instance file."""


class InfeasibleError(SeqbapError, ValueError):
    """The tasks of the graph cannot all be matched."""


class NotAnMCMError(SeqbapError, ValueError):
    """A matching passed as an MCM is not a maximum cardinality matching."""


class EnumerationLimitError(SeqbapError, ValueError):
    """Instance too large for exhaustive enumeration."""


class DisconnectedTopology(SeqbapError, ValueError):
    """The communication graph is not connected."""
