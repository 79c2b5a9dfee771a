"""Orthogonal dice: uniform counting laws with equal mean and variance, and the
mixed binomial random measures they drive."""

from .dice import (
    DiceVariant,
    OrthogonalDie,
    SupportPair,
    classify,
    die_from_index,
    die_from_prime_product,
    enumerate_orthogonal,
    first_die_with_mean_at_least,
    nearest_die,
)
from .errors import OrthoDiceError

__version__ = "0.1.0"

__all__ = [
    "DiceVariant",
    "OrthoDiceError",
    "OrthogonalDie",
    "SupportPair",
    "classify",
    "die_from_index",
    "die_from_prime_product",
    "enumerate_orthogonal",
    "first_die_with_mean_at_least",
    "nearest_die",
]
