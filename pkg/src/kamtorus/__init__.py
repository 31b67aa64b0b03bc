"""Small-divisor arithmetic, exact vector construction, direction-resolved
regularity schedules, truncated-Fourier calculus, and a KAM linearization
loop for analytic torus maps close to a rotation."""

from .precision import (
    DEFAULT_PRECISION,
    set_working_precision,
    working_precision,
    working_precision_bits,
)

__all__ = [
    "DEFAULT_PRECISION",
    "set_working_precision",
    "working_precision",
    "working_precision_bits",
]

__version__ = "0.1.0"
