"""growthlab: random growth models, random matrix edge laws and their exact identities.

Modules
-------
special        Airy, Bessel J, Gauss-Legendre
combinatorics  partitions, Schur polynomials, RSK, exact LIS laws
growth         last-passage percolation, PNG, Hammersley Monte Carlo
ensembles      orthogonal polynomial ensembles, Christoffel-Darboux kernels
limits         Airy and discrete Bessel kernels, Tracy-Widom F2
toeplitz       Toeplitz determinants, Gessel/Heine/MacMahon, CUE moments
stats          empirical distributions and KS distances
cli            command-line driver
"""

from .errors import (
    AccuracyError,
    ConditioningError,
    DomainError,
    GrowthLabError,
    InstabilityError,
    PreconditionError,
    ResourceError,
)
from .rng import SeededStream

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "ConditioningError",
    "DomainError",
    "GrowthLabError",
    "InstabilityError",
    "PreconditionError",
    "ResourceError",
    "SeededStream",
]
