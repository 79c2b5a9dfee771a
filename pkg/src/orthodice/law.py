"""Exact pgf, pmf and moment machinery for uniform counting laws and their thinnings.

Conventions: a die is a :class:`~orthodice.dice.SupportPair`; thinning keeps
each point independently with probability ``a`` in (0, 1], so the thinned
count has pgf ``psi(a t + 1 - a)``.  Rational inputs give exact ``Fraction``
results; float inputs take numerically stable float paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Sequence

import gmpy2
import numpy as np
from scipy import stats

from .dice import SupportPair, die_from_index, in_index_set, mean_of_index
from .errors import IndexNotInI, InvalidThinning, SupportTooLarge

MAX_EXACT_SUPPORT = 10**6
SERIES_SWITCH = 1e-8
DEFAULT_TAIL_TOL = 1e-12
DEFAULT_GRID = 1001


@dataclass(frozen=True)
class DiscreteLaw:
    """pmf on the integer window ``offset, offset + 1, ...``.

    ``probs`` holds rationals (``Fraction`` or ``gmpy2.mpq``) for exact laws and floats for
    truncated ones; ``tail_mass`` is the mass beyond the window that a
    truncation dropped (zero for exact laws).
    """

    offset: int
    probs: tuple
    tail_mass: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(self.probs))
        if self.offset < 0:
            raise ValueError("offset must be non-negative")
        if any(p < 0 for p in self.probs):
            raise ValueError("probabilities must be non-negative")
        if self.is_exact:
            if sum(self.probs) != 1:
                raise ValueError("exact pmf must sum to 1")
        elif abs(math.fsum(map(float, self.probs)) + self.tail_mass - 1.0) > 1e-9:
            raise ValueError("pmf plus tail mass must sum to 1")

    @property
    def is_exact(self) -> bool:
        return self.tail_mass == 0 and all(isinstance(p, Rational) for p in self.probs)

    @property
    def support_max(self) -> int:
        return self.offset + len(self.probs) - 1

    def __len__(self):
        return len(self.probs)

    def pmf(self, x: int):
        i = x - self.offset
        if 0 <= i < len(self.probs):
            return self.probs[i]
        return Fraction(0) if self.is_exact else 0.0

    def moment(self, r: int):
        return sum(p * (self.offset + i) ** r for i, p in enumerate(self.probs) if p)

    def mean(self):
        return self.moment(1)

    def variance(self):
        mu = self.mean()
        return self.moment(2) - mu * mu

    def pgf(self, t):
        return sum(p * t ** (self.offset + i) for i, p in enumerate(self.probs) if p)

    def as_floats(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])


@dataclass(frozen=True)
class MomentSummary:
    c: Fraction
    delta_sq: Fraction

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("mean must be positive")
        if self.delta_sq < 0:
            raise ValueError("variance must be non-negative")


@dataclass(frozen=True)
class FunctionalStats:
    """Integrals of test functions against the point law: nu f, nu g, nu(fg), nu f^2."""

    nu_f: float
    nu_g: float
    nu_fg: float
    nu_f2: float


@dataclass(frozen=True)
class MixedStats:
    mean: Fraction | float
    variance: Fraction | float
    covariance: Fraction | float


@dataclass(frozen=True)
class ConvergenceRow:
    l: int
    a: Fraction
    tvd: float
    sup_dist: float


def _thinning(a) -> Fraction | float:
    if isinstance(a, (Rational, str)):
        a = Fraction(a)
    if not 0 < a <= 1:
        raise InvalidThinning(f"thinning parameter must lie in (0, 1], got {a}")
    return a


def _support(s) -> SupportPair:
    if isinstance(s, SupportPair):
        return s
    if hasattr(s, "support"):
        return s.support
    return SupportPair(*s)


def moment_summary(support) -> MomentSummary:
    s = _support(support)
    return MomentSummary(s.mean, s.variance)


def uniform_law(support) -> DiscreteLaw:
    s = _support(support)
    q = Fraction(1, s.sides)
    return DiscreteLaw(s.m, (q,) * s.sides)


def dirac_law(x: int) -> DiscreteLaw:
    return DiscreteLaw(x, (Fraction(1),))


def shift_law(law: DiscreteLaw, by: int) -> DiscreteLaw:
    return DiscreteLaw(law.offset + by, law.probs, law.tail_mass)


def convolve(first: DiscreteLaw, second: DiscreteLaw) -> DiscreteLaw:
    """Law of the sum of independent variables, exact when both inputs are."""
    out = [0] * (len(first) + len(second) - 1)
    for i, p in enumerate(first.probs):
        if p:
            for j, q in enumerate(second.probs):
                out[i + j] += p * q
    return DiscreteLaw(first.offset + second.offset, out)


def signed_uniform_law(halfwidth: int) -> DiscreteLaw:
    """``Uniform{-h, ..., h}`` represented as a law on ``{0..2h}`` plus a shift of ``-h``.

    Laws live on non-negative windows, so callers add the centre before shifting.
    """
    q = Fraction(1, 2 * halfwidth + 1)
    return DiscreteLaw(0, (q,) * (2 * halfwidth + 1))


# pgf evaluation


def _pgf_exact(m: int, n: int, u: Fraction) -> Fraction:
    if u == 1:
        return Fraction(1)
    return (u**m - u ** (n + 1)) / ((n - m + 1) * (1 - u))


def _pgf_gap_float(m: int, n: int, eps: np.ndarray) -> np.ndarray:
    """psi(1 - eps) in floats for eps in [0, 1].

    Far from 1 the closed form is written with log1p/expm1 so the
    ``(1 - u**p) / (1 - u)`` ratio does not cancel; within ``SERIES_SWITCH``
    of 1 it falls back to the direct sum of ``u**i / p``.
    """
    eps = np.asarray(eps, dtype=float)
    p = n - m + 1
    out = np.empty_like(eps)
    zero = eps >= 1.0
    near = (eps < SERIES_SWITCH) & ~zero
    far = ~(zero | near)
    out[zero] = 1.0 / p if m == 0 else 0.0
    if np.any(far):
        e = eps[far]
        lg = np.log1p(-e)
        out[far] = np.exp(m * lg) * (-np.expm1(p * lg)) / (p * e)
    if np.any(near):
        e = eps[near]
        if p <= 10**5:
            powers = np.arange(m, n + 1, dtype=float)
            out[near] = np.exp(np.outer(np.log1p(-e), powers)).sum(axis=1) / p
        else:
            lg = np.log1p(-e)
            safe = np.where(e > 0, e, 1.0)
            val = np.exp(m * lg) * (-np.expm1(p * lg)) / (p * safe)
            out[near] = np.where(e > 0, val, 1.0)
    return out


def pgf_eval(support, t):
    """Probability generating function ``E t**K`` of ``Uniform{m..n}``."""
    s = _support(support)
    if isinstance(t, Rational):
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise ValueError("t must lie in [0, 1]")
        return _pgf_exact(s.m, s.n, t)
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    return float(_pgf_gap_float(s.m, s.n, np.array([1.0 - t]))[0])


def thinned_pgf_eval(support, a, t):
    """pgf of the ``a``-thinned count: ``psi(a t + 1 - a)``."""
    s = _support(support)
    a = _thinning(a)
    if isinstance(a, Fraction) and isinstance(t, Rational):
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise ValueError("t must lie in [0, 1]")
        return _pgf_exact(s.m, s.n, a * t + 1 - a)
    return float(thinned_pgf_array(s, a, np.array([float(t)]))[0])


def thinned_pgf_array(support, a, t: np.ndarray) -> np.ndarray:
    s = _support(support)
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise ValueError("t must lie in [0, 1]")
    return _pgf_gap_float(s.m, s.n, float(a) * (1.0 - t))


def laplace_functional(support, s):
    """Laplace functional ``E exp(-N f)`` given the scalar ``s = nu exp(-f)``."""
    if not 0 < s <= 1:
        raise ValueError("s must lie in (0, 1]")
    return pgf_eval(support, s)


# thinned pmf


def _binomial_cdf_scaled(N: int, A: int, C: int, upto: int) -> list[int]:
    """Partial sums ``sum_{i<=j} C(N,i) A**i C**(N-i)`` for ``j = 0..upto``.

    With ``a = A/B`` and ``C = B - A`` this is ``B**N`` times the Binomial(N, a)
    cdf, kept in integers.
    """
    out = []
    term = C**N
    acc = 0
    for i in range(upto + 1):
        if i <= N:
            acc += term
            if i < N:
                term = term * (N - i) * A // ((i + 1) * C)
        out.append(acc)
    return out


def thinned_pmf(support, a, max_support: int = MAX_EXACT_SUPPORT) -> DiscreteLaw:
    """Exact pmf on ``{0..n}`` of the ``a``-thinned uniform count.

    Uses ``P(N = j) = (F_m(j) - F_{n+1}(j)) / (p a)`` with ``F_N`` the
    Binomial(N, a) cdf, which is the coefficient extraction of
    ``(u**m - u**(n+1)) / (p (1 - u))`` at ``u = a t + 1 - a``.
    """
    s = _support(support)
    if s.n > max_support:
        raise SupportTooLarge(f"n={s.n} exceeds the exact-pmf cap {max_support}")
    a = Fraction(_thinning(a))
    m, n, p = s.m, s.n, s.sides
    if a == 1:
        q = Fraction(1, p)
        return DiscreteLaw(0, [Fraction(0)] * m + [q] * p)
    # GMP integers and rationals: Python's gcd dominates otherwise
    A, B = gmpy2.mpz(a.numerator), gmpy2.mpz(a.denominator)
    C = B - A
    low = _binomial_cdf_scaled(m, A, C, n)
    high = _binomial_cdf_scaled(n + 1, A, C, n)
    lift = B ** (n + 1 - m)
    denom = p * A * B**n
    probs = [gmpy2.mpq(lo * lift - hi, denom) for lo, hi in zip(low, high)]
    return DiscreteLaw(0, probs)


def thinned_pmf_direct(support, a) -> DiscreteLaw:
    """Binomial-mixture sum ``(1/p) sum_i C(i,j) a**j (1-a)**(i-j)``; slow reference path."""
    s = _support(support)
    a = Fraction(_thinning(a))
    probs = []
    for j in range(s.n + 1):
        tot = Fraction(0)
        for i in range(max(j, s.m), s.n + 1):
            tot += math.comb(i, j) * a**j * (1 - a) ** (i - j)
        probs.append(tot / s.sides)
    return DiscreteLaw(0, probs)


# moments


def falling(x: int, r: int) -> int:
    out = 1
    for i in range(r):
        out *= x - i
    return out


@lru_cache(maxsize=None)
def stirling2(r: int, j: int) -> int:
    if r == j:
        return 1
    if j == 0 or j > r:
        return 0
    return j * stirling2(r - 1, j) + stirling2(r - 1, j - 1)


def factorial_moment(support, a, r: int) -> Fraction:
    """``E[(N)_r]`` for the ``a``-thinned count, via the falling-factorial sum identity."""
    s = _support(support)
    a = Fraction(_thinning(a))
    if r < 0:
        raise ValueError("r must be non-negative")
    if r == 0:
        return Fraction(1)
    total = falling(s.n + 1, r + 1) - falling(s.m, r + 1)
    return a**r * Fraction(total, (r + 1) * s.sides)


def raw_moment(support, a, r: int) -> Fraction:
    """``E[N**r]`` from factorial moments through Stirling numbers of the second kind."""
    if r < 0:
        raise ValueError("r must be non-negative")
    return sum(
        (stirling2(r, j) * factorial_moment(support, a, j) for j in range(r + 1)),
        Fraction(0),
    )


def thinned_moments(ms: MomentSummary, a) -> MomentSummary:
    """Mean and variance of the thinned count: ``a c`` and ``a c + a**2 (delta**2 - c)``."""
    a = _thinning(a)
    return MomentSummary(a * ms.c, a * ms.c + a * a * (ms.delta_sq - ms.c))


def mixed_binomial_stats(ms: MomentSummary, fs: FunctionalStats) -> MixedStats:
    excess = ms.delta_sq - ms.c
    return MixedStats(
        mean=ms.c * fs.nu_f,
        variance=ms.c * fs.nu_f2 + excess * fs.nu_f**2,
        covariance=ms.c * fs.nu_fg + excess * fs.nu_f * fs.nu_g,
    )


def restricted_stats(ms: MomentSummary, a, fs: FunctionalStats) -> MixedStats:
    """Moments of ``N_A f`` with ``fs`` measured under the conditioned law ``nu_A``.

    The restriction is again a mixed binomial process whose count law has the
    thinned moments, so for orthogonal dice this reduces to ``a c nu_A f`` etc.
    """
    return mixed_binomial_stats(thinned_moments(ms, a), fs)


# Poisson comparison


def poisson_pmf(b, tail_tol: float = DEFAULT_TAIL_TOL) -> DiscreteLaw:
    """Poisson(b) pmf on ``{0..N}``, N the smallest cut with tail mass < ``tail_tol``.

    Not renormalised; the dropped mass is ``tail_mass``.
    """
    b = float(b)
    if b <= 0 or tail_tol <= 0:
        raise ValueError("b and tail_tol must be positive")
    cut = int(stats.poisson.isf(tail_tol, b))
    while cut > 0 and stats.poisson.sf(cut - 1, b) < tail_tol:
        cut -= 1
    while stats.poisson.sf(cut, b) >= tail_tol:
        cut += 1
    ks = np.arange(cut + 1)
    return DiscreteLaw(0, stats.poisson.pmf(ks, b).tolist(), float(stats.poisson.sf(cut, b)))


def tv_distance(first: DiscreteLaw, second: DiscreteLaw):
    """Total variation distance; truncated tails count as unshared mass."""
    lo = min(first.offset, second.offset)
    hi = max(first.support_max, second.support_max)
    if first.is_exact and second.is_exact:
        return sum((abs(first.pmf(x) - second.pmf(x)) for x in range(lo, hi + 1)), Fraction(0)) / 2
    p = np.zeros(hi - lo + 1)
    q = np.zeros(hi - lo + 1)
    p[first.offset - lo : first.support_max - lo + 1] = first.as_floats()
    q[second.offset - lo : second.support_max - lo + 1] = second.as_floats()
    return 0.5 * (math.fsum(np.abs(p - q)) + first.tail_mass + second.tail_mass)


def poisson_pgf_array(b, t: np.ndarray) -> np.ndarray:
    return np.exp(float(b) * (np.asarray(t, dtype=float) - 1.0))


def pgf_sup_distance(support, a, b, grid_size: int = DEFAULT_GRID) -> float:
    """``max |psi^a(t) - exp(b (t - 1))|`` over a uniform grid on [0, 1]."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    t = np.linspace(0.0, 1.0, grid_size)
    return float(np.max(np.abs(thinned_pgf_array(support, a, t) - poisson_pgf_array(b, t))))


def pgf_sup_distance_between(pgf_a, pgf_b, grid_size: int = DEFAULT_GRID) -> float:
    """Same grid sup-distance between two vectorised pgfs."""
    t = np.linspace(0.0, 1.0, grid_size)
    return float(np.max(np.abs(pgf_a(t) - pgf_b(t))))


def matched_thinning(k0: int, l: int) -> Fraction:
    """Thinning that brings the index-``l`` die down to the mean of index ``k0``."""
    return Fraction(mean_of_index(k0), mean_of_index(l))


def convergence_sequence(
    k0: int,
    indices: Sequence[int],
    grid_size: int = DEFAULT_GRID,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> list[ConvergenceRow]:
    """Distances to Poisson(c(k0)) along mean-matched thinned dice."""
    for k in (k0, *indices):
        if not in_index_set(k):
            raise IndexNotInI(f"index {k} is not in the index set")
    if any(l < k0 for l in indices):
        raise ValueError("indices must be >= k0")
    b = mean_of_index(k0)
    target = poisson_pmf(b, tail_tol)
    rows = []
    for l in indices:
        die = die_from_index(l)
        a = matched_thinning(k0, l)
        law = thinned_pmf(die.support, a)
        rows.append(
            ConvergenceRow(
                l=l,
                a=a,
                tvd=float(tv_distance(law, target)),
                sup_dist=pgf_sup_distance(die.support, a, b, grid_size),
            )
        )
    return rows
