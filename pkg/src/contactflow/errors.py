"""Exception types shared across the library."""


class ContactflowError(Exception):
    """Base class for all library errors."""


class NoConvergence(ContactflowError):
    """An iterative solver exhausted its iteration budget."""


class SingularUpdate(ContactflowError):
    """A z-update or Legendre denominator is (numerically) zero."""


class SingularJacobian(ContactflowError):
    """A Newton Jacobian is singular to working precision."""


class StepTooLarge(ContactflowError):
    """The step size violates a positivity requirement of a stepper."""


class UnsupportedSystem(ContactflowError):
    """The requested operation is only available for the built-in systems."""


class InconsistentAction(ContactflowError):
    """A supplied action rate does not match the Lagrangian value."""


class MismatchedTrajectories(ContactflowError):
    """Two trajectories expected to share their x-history do not."""


class ResonanceError(ContactflowError):
    """Undamped resonant forcing has no bounded particular solution."""


class DomainError(ContactflowError):
    """An input is outside the domain where the operation is meaningful."""


class ConfigError(ContactflowError):
    """Invalid benchmark or CLI configuration."""
