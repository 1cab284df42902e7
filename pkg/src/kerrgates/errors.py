"""Exception hierarchy for the simulator."""


class SimulationError(Exception):
    """Base class for errors raised by the simulator."""


class RegistryError(SimulationError):
    """A path, mode or probe was used without being declared, or registries disagree."""


class ZeroNormError(SimulationError):
    """Raised when normalizing a branch that has no amplitude left.

    This is what an impossible post-selection looks like.
    """


class NonUnitaryError(SimulationError, ValueError):
    pass


class OccupationError(SimulationError):
    """The photon occupation of a path is not what the operation requires."""


class CircuitError(SimulationError):
    """Malformed circuit (e.g. feedforward on an outcome that was never measured)."""


class OracleLimitError(SimulationError):
    pass
