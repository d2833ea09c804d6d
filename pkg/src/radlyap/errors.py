"""Exception hierarchy for solver and configuration failures."""


class RadlyapError(Exception):
    """Base class for all library errors."""


class ConfigError(RadlyapError):
    """Invalid parameters or configuration."""


class SolverError(RadlyapError):
    """Base class for numerical failures."""


class NonConvergence(SolverError):
    """An eigenvalue bracket could not be isolated within the scan budget."""


class DegenerateAnnulus(ConfigError):
    """Annulus width below the validated minimum."""


class ZeroCountMismatch(SolverError):
    """Detected zero count differs from the expected oscillation index."""


class AmbiguousZero(SolverError):
    """Solution hovers near zero without a clean sign change."""


class SingularPotential(SolverError):
    """Potential evaluation overflowed near the origin."""


class StepFailure(SolverError):
    """Integrator produced non-finite values."""


class MembershipFailure(SolverError):
    """Operation requires an admissible potential but membership failed."""


class GluingFailure(SolverError):
    """Interface derivative numerically zero; pieces cannot be C^1-matched."""


class NoRootInRange(SolverError):
    """Amplitude scan found no solvability crossing below the cap."""


class MethodDisagreement(SolverError):
    """Two independent methods for the same constant disagree beyond tolerance."""
