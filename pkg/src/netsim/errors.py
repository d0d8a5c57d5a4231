"""Exception types raised by the simulation engine."""


class NetsimError(Exception):
    """Base class for all engine errors."""


class DanglingReference(NetsimError):
    """An id refers to an entity that does not exist in the world."""


class OverConstrained(NetsimError):
    """Constraint rows exceed the degrees of freedom of a component."""


class InitialViolation(NetsimError):
    """Initial constraint residual is inconsistent with the placement."""


class SolverSingular(NetsimError):
    """The constraint Jacobian is rank deficient this step."""


class NonFinite(NetsimError):
    """A state became NaN/Inf; usually the step is too large for the
    active contact stiffness."""


class NonPositiveLength(NetsimError):
    """A rope segment was evaluated at non-positive length."""


class DegenerateChord(NetsimError):
    """Rope end points coincide; the layout direction is undefined."""


class CoincidentCenters(NetsimError):
    """Collision sphere centers coincide; the contact normal is undefined."""


class BadKnots(NetsimError):
    """Smoothstep knots are not strictly increasing."""


class SingularAllocation(NetsimError):
    """Rotor geometry yields a non-invertible allocation matrix."""


class InsufficientObservations(NetsimError):
    """Target fusion needs at least three camera observations."""


class DegenerateGeometry(NetsimError):
    """Camera centers are (near) collinear; no usable baseline."""


class DegenerateBox(NetsimError):
    """A detection box with zero area cannot be ranged."""


class EpisodeFinished(NetsimError):
    """step() was called on an environment whose episode already ended."""


class ConfigError(NetsimError):
    """Scenario configuration failed validation."""
