"""Exception types shared across the package."""


class HenonError(Exception):
    """Base class for all library-specific errors."""


class ParameterError(HenonError, ValueError):
    """Invalid problem parameters (dimension, weight or exponent)."""


class SolverError(HenonError, RuntimeError):
    """A numerical procedure failed to produce an acceptable result."""


class StepFailureError(SolverError):
    """Adaptive ODE integrator could not meet its tolerance."""


class NoZeroFoundError(SolverError):
    """The normalized profile never crossed zero (p >= p_alpha or horizon too small)."""


class DegenerateProfileError(SolverError):
    """A radial profile violates monotonicity (w = -u' vanishes inside (0,1])."""


class DiscretizationFailureError(SolverError):
    """Eigenpair residuals exceed tolerance even after mesh refinement."""


class TruncationUncertifiedError(SolverError):
    """Morse-index truncation certificate failed: Lambda_{1,k_max} <= 1."""


class ParityViolationError(SolverError):
    """An even number of Morse-index changing points was found (a root was missed)."""


class NoConvergenceError(SolverError):
    """Newton iteration did not converge within the iteration budget."""


class JacobianSingularError(SolverError):
    """Linearized system is singular; a bordered formulation is required."""


class SchemaError(HenonError, ValueError):
    """Serialized artifact has a missing or incompatible schema version."""
