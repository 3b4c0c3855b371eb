"""Structure-preserving integrators for contact Hamiltonian systems."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    ContactState,
    DampingKind,
    HerglotzLagrangian,
    OscillatorSystem,
    SinusoidalForcing,
    Trajectory,
    contact_hamiltonian,
    contact_vector_field,
    energy,
    eval_lagrangian,
    exact_damped_solution,
    exact_forced_solution,
)
from .integrators import StepperId, integrate  # noqa: F401
