"""Exception types raised by the simulator.

Two families matter for callers: ``ValidationError`` (bad inputs, caught before
any numerics run) and ``NumericalError`` (the computation itself went outside
its guaranteed regime, e.g. truncation tail mass too large).  The CLI maps the
families to exit codes 2 and 3.
"""


class SimulationError(Exception):
    """Base class for all package errors."""


class ValidationError(SimulationError):
    """Inputs violate a precondition."""


class NumericalError(SimulationError):
    """The computation left its numerically trustworthy regime."""


class DimensionMismatch(ValidationError):
    """Operands live on different spaces."""


class UnknownAtom(ValidationError):
    """Referenced atom label does not exist in the state."""


class WrongAtomCount(ValidationError):
    """Operation requires a specific number of atoms."""


class WrongLevelPair(ValidationError):
    """Operation applies only to atoms with the other level pair."""


class DegenerateCat(ValidationError):
    """Odd cat state at zero amplitude is the zero vector."""


class InvalidPhotonNumber(ValidationError):
    """Mean photon number must round to a positive integer."""


class NonUnitaryRotation(ValidationError):
    """A 2x2 rotation matrix failed the unitarity check."""


class TailMassExceeded(NumericalError):
    """Probability mass at the Fock-space truncation boundary is too large."""


class ZeroProbabilityBranch(NumericalError):
    """Post-selected a measurement outcome of (numerically) zero probability."""
