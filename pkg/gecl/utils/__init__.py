# Utils module for the GECL lab
from .jets import Jet
from .linalg import (
    SingularMatrixError,
    condition,
    det2,
    eigenvalues2,
    inverse2,
    singular_values,
    spectral_norm,
)
from .grids import geometric_time_grid, log_frequency_grid, refine_with_packets
from .timing import PhaseTimer, Timer, timed

__all__ = [
    'Jet',
    'SingularMatrixError',
    'condition',
    'det2',
    'eigenvalues2',
    'inverse2',
    'singular_values',
    'spectral_norm',
    'geometric_time_grid',
    'log_frequency_grid',
    'refine_with_packets',
    'PhaseTimer',
    'Timer',
    'timed',
]
