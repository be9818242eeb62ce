"""
Simulation errors
Every error derives from ValueError so API callers can map them uniformly
"""


class SimulationError(ValueError):
    """Base class for all simulator errors"""


class InvalidParameter(SimulationError):
    """A scalar argument (N, theta, grid size) is outside its allowed range"""


class NonHermitianInput(SimulationError):
    """Matrix asymmetry exceeds the Hermiticity tolerance"""


class NoConvergence(SimulationError):
    """Iterative diagonalization did not converge within the sweep cap"""


class NotPSD(SimulationError):
    """Matrix has an eigenvalue below the negative-dust tolerance"""


class DimensionMismatch(SimulationError):
    """Shapes or subsystem dimensions are inconsistent"""


class InvalidDensityMatrix(SimulationError):
    """Input is not Hermitian, positive semidefinite and unit trace"""


class NotNormalized(SimulationError):
    """State vector does not have unit norm"""


class MaximalEntanglementExcluded(SimulationError):
    """The six-angle parameterization cannot represent chi = pi/2"""


class TooLarge(SimulationError):
    """Requested full Hilbert space exceeds the dense guard"""


class InvalidQuantumNumbers(SimulationError):
    """Angular momentum labels (j, m) are inconsistent"""


class SingularN(SimulationError):
    """Closed-form expression is singular for this bath size"""


class UnsupportedFamily(SimulationError):
    """Operation has no definition for the requested state family"""


class InsufficientSamples(SimulationError):
    """Too few distinct points for a fit"""


class ConsistencyError(SimulationError):
    """Two independent evaluation routes disagree"""
