"""Numerical laboratory for primes in progressions to square moduli."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BudgetError,
    BVSquaresError,
    ChainError,
    ConfigurationError,
    DomainError,
    RangeError,
)
from .sieve import (  # noqa: E402
    PrimeTable,
    build_prime_table,
    euler_phi,
    mobius,
    squarefree_square_split,
    von_mangoldt,
)

__all__ = [
    "BudgetError",
    "BVSquaresError",
    "ChainError",
    "ConfigurationError",
    "DomainError",
    "RangeError",
    "PrimeTable",
    "build_prime_table",
    "euler_phi",
    "mobius",
    "squarefree_square_split",
    "von_mangoldt",
]
