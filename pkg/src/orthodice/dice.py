"""Orthogonal dice: discrete uniform counting laws whose mean equals their variance.

A die is ``Uniform{m, ..., n}``.  It is orthogonal when
``(m + n) / 2 == ((n - m + 1)**2 - 1) / 12``, and the orthogonal dice are
exactly the supports ``m = (k**2 - 1) / 3``, ``n = 2k + m + 2`` for positive
``k`` not divisible by three.  The side count ``2k + 3`` then runs over every
integer >= 5 coprime to 6.

All arithmetic is on Python integers (promoted to ``gmpy2.mpz`` once operands
get large), so dice indexed by Mersenne-scale primes are handled exactly.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Rational

import gmpy2
import numpy as np

from .errors import DomainTooSmall, IndexNotInI, InvalidSideCount, InvalidSupport

# above this many bits products go through GMP
_BIG_BITS = 1 << 14


def _int(x, name="value"):
    if isinstance(x, bool) or not isinstance(x, (Integral, type(gmpy2.mpz(0)))):
        raise TypeError(f"{name} must be an integer, got {type(x).__name__}")
    if isinstance(x, int) and x.bit_length() > _BIG_BITS:
        return gmpy2.mpz(x)
    return x


def _isqrt(x):
    if isinstance(x, int):
        return math.isqrt(x)
    return gmpy2.isqrt(x)


@dataclass(frozen=True)
class SupportPair:
    """Support ``{m, ..., n}`` of a discrete uniform counting law."""

    m: int
    n: int

    def __post_init__(self):
        m, n = self.m, self.n
        _int(m, "m")
        _int(n, "n")
        if m < 0 or m > n:
            raise InvalidSupport(f"need 0 <= m <= n, got ({m}, {n})")
        if m == 0 and n == 0:
            raise InvalidSupport("(0, 0) is not a permissible support")

    @property
    def sides(self):
        return self.n - self.m + 1

    @property
    def mean(self) -> Fraction:
        return Fraction(self.m + self.n, 2)

    @property
    def variance(self) -> Fraction:
        return Fraction(self.sides**2 - 1, 12)


@dataclass(frozen=True)
class OrthogonalDie:
    """Member of the orthogonal family at canonical index ``k``.

    ``prime`` is an optional annotation (None when not checked) telling
    whether the side count is itself prime.
    """

    k: int
    support: SupportPair
    mean_c: int
    sides_p: int
    position: int
    prime: bool | None = field(default=None, compare=False)

    @property
    def m(self):
        return self.support.m

    @property
    def n(self):
        return self.support.n

    @property
    def variance(self):
        # equal to the mean by construction
        return self.mean_c

    def as_dict(self) -> dict:
        out = {
            "k": self.k,
            "m": self.m,
            "n": self.n,
            "c": self.mean_c,
            "sides": self.sides_p,
            "position": self.position,
        }
        if self.prime is not None:
            out["prime"] = self.prime
        return out


class DiceVariant(enum.Enum):
    ORTHOGONAL = "Orthogonal"
    POSITIVE = "PositiveDie"
    NEGATIVE = "NegativeDie"


@dataclass(frozen=True)
class DiceClass:
    variant: DiceVariant
    degenerate: bool


@dataclass(frozen=True)
class DieDecomposition:
    """Dirac at ``center`` convolved with ``Uniform{-halfwidth..halfwidth}``."""

    center: int
    halfwidth: int


def in_index_set(k) -> bool:
    return k >= 1 and k % 3 != 0


def mean_of_index(k):
    """Mean ``(k+1)(k+2)/3`` of the die at index ``k`` (an integer on the index set)."""
    return (k + 1) * (k + 2) // 3


def die_from_index(k) -> OrthogonalDie:
    k = _int(k, "k")
    if not in_index_set(k):
        raise IndexNotInI(f"k={k} is not a positive integer coprime to 3")
    m = (k * k - 1) // 3
    n = 2 * k + m + 2
    return OrthogonalDie(
        k=k,
        support=SupportPair(m, n),
        mean_c=(m + n) // 2,
        sides_p=2 * k + 3,
        position=(2 * k + 2) // 3,
    )


def iter_index_set(start=1):
    k = max(1, start)
    while True:
        if k % 3:
            yield k
        k += 1


def enumerate_orthogonal(count: int) -> list[OrthogonalDie]:
    """First ``count`` orthogonal dice in increasing index order."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out = []
    for k in iter_index_set():
        out.append(die_from_index(k))
        if len(out) == count:
            return out


def die_from_prime_product(p, check_prime: bool = False) -> OrthogonalDie:
    """Orthogonal die with ``p`` sides.

    ``p`` must be >= 5 and coprime to 6; it is not factorised.  With
    ``check_prime`` the result carries a primality annotation (Miller-Rabin,
    deterministic below 3.3e24).
    """
    p = _int(p, "p")
    if p < 5 or p % 2 == 0 or p % 3 == 0:
        raise InvalidSideCount(f"side count must be >= 5 and coprime to 6, got {p}")
    pm1 = p - 1
    m = (p - 5) * pm1 // 12
    n = (p + 7) * pm1 // 12
    c = (p * p - 1) // 12
    k = (p - 3) // 2
    prime = is_probable_prime(p) if check_prime else None
    return OrthogonalDie(
        k=k,
        support=SupportPair(m, n),
        mean_c=c,
        sides_p=p,
        position=(p + 2) // 3 - 1,
        prime=prime,
    )


def classify(support: SupportPair) -> DiceClass:
    """Sign class of ``variance - mean`` for a uniform die.

    ``variance - mean`` has the sign of ``(n-m-2)**2 - 4(3m+1)`` when
    ``n - m - 2 > 0`` and is negative otherwise; no square roots are taken.
    """
    if not isinstance(support, SupportPair):
        support = SupportPair(*support)
    m, n = support.m, support.n
    d = n - m - 2
    if d <= 0:
        variant = DiceVariant.NEGATIVE
    else:
        lhs, rhs = d * d, 4 * (3 * m + 1)
        if lhs == rhs:
            variant = DiceVariant.ORTHOGONAL
        elif lhs > rhs:
            variant = DiceVariant.POSITIVE
        else:
            variant = DiceVariant.NEGATIVE
    return DiceClass(variant, degenerate=(m == n))


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (Rational, int)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(int(x))


def nearest_die(c_star) -> OrthogonalDie:
    """Orthogonal die whose mean is closest to ``c_star``; ties go to the smaller index.

    The real root of ``(k+1)(k+2) = 3 c_star`` is bracketed with an integer
    square root and only the handful of neighbouring indices are compared.
    """
    c_star = _as_fraction(c_star)
    if c_star <= 0:
        raise ValueError("c_star must be positive")
    disc = math.floor(12 * c_star + 1)
    k0 = (_isqrt(disc) - 3) // 2
    best = None
    for k in range(max(1, k0 - 2), k0 + 4):
        if k % 3 == 0:
            continue
        gap = abs(mean_of_index(k) - c_star)
        if best is None or gap < best[0]:
            best = (gap, k)
    return die_from_index(best[1])


def first_die_with_mean_at_least(c_min) -> OrthogonalDie:
    """Smallest-index orthogonal die with mean >= ``c_min``."""
    c_min = _as_fraction(c_min)
    if c_min < 1:
        raise ValueError("c_min must be >= 1")
    target = -((-c_min.numerator) // c_min.denominator)  # ceil; means are integers
    k = max(1, (_isqrt(12 * target + 1) - 3) // 2 - 1)
    while k % 3 == 0 or mean_of_index(k) < target:
        k += 1
    return die_from_index(k)


def count_coprime23(n: int) -> int:
    """Number of ``1 <= j <= n`` coprime to 6, by the closed form (valid for n >= 5)."""
    if n < 5:
        raise DomainTooSmall(f"closed form needs n >= 5, got {n}")
    return -(-n // 3) - (1 if (n - 4) % 6 == 0 else 0)


def count_coprime23_oracle(n: int) -> int:
    """Same count by direct gcd scan."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return sum(1 for j in range(1, n + 1) if math.gcd(j, 6) == 1)


def count_coprime23_inclusion_exclusion(n: int) -> int:
    return n - n // 2 - n // 3 + n // 6


def coprime23_counts_upto(n_max: int) -> np.ndarray:
    """Array whose entry ``j`` is the gcd-scan count up to ``j`` (entry 0 is 0)."""
    j = np.arange(n_max + 1, dtype=np.int64)
    hits = np.gcd(j, 6) == 1
    hits[0] = False
    return np.cumsum(hits)


def decompose(die) -> DieDecomposition:
    support = die.support if isinstance(die, OrthogonalDie) else die
    m, n = support.m, support.n
    if (n - m) % 2:
        raise InvalidSupport(f"({m}, {n}) has an even side count; no integer centre")
    return DieDecomposition(center=(m + n) // 2, halfwidth=(n - m) // 2)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_LIMIT = 3_317_044_064_679_887_385_961_981


def is_probable_prime(n, rounds: int = 24) -> bool:
    """Miller-Rabin; deterministic below 3.3e24, probabilistic (seeded) above."""
    n = int(n)
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < _MR_DETERMINISTIC_LIMIT:
        bases = _MR_BASES
    else:
        rng = random.Random(int(n % (1 << 64)))
        bases = [rng.randrange(2, min(n - 2, 1 << 64)) for _ in range(rounds)]
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_sieve(limit: int) -> np.ndarray:
    """Boolean array ``is_prime[0..limit]`` by the sieve of Eratosthenes."""
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if flags[q]:
            flags[q * q :: q] = False
    return flags


def prime_rank(p: int, limit: int | None = None) -> int | None:
    """1-based rank of ``p`` among the primes, or None if ``p`` is composite."""
    flags = prime_sieve(limit if limit is not None else p)
    if not flags[p]:
        return None
    return int(np.count_nonzero(flags[: p + 1]))


def decimal_digits(x) -> int:
    """Exact decimal digit count of a positive integer, without a full conversion."""
    x = gmpy2.mpz(x)
    if x <= 0:
        raise ValueError("x must be positive")
    est = int(gmpy2.num_digits(x, 10))  # exact or one too large
    return est if x >= gmpy2.mpz(10) ** (est - 1) else est - 1
