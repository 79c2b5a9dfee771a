"""Spectral gap of the 2x2 Gaussian orthogonal ensemble.

Points are ``(x11, x12, x22)`` with ``x11, x22 ~ N(0, 2)`` and ``x12 ~ N(0, 1)``;
the gap functional is ``f = sqrt((x11 - x22)**2 + 4 x12**2)``, whose law is the
Wigner surmise with density ``(y/4) exp(-y**2/8)``.  The restriction set is
``A_r = {x11 > r, x22 < -r}`` for any real ``r``; negative ``r`` enlarges it
towards the whole space, and the default grid spans ``[-3, 3]``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special, stats

from .. import stc

SD_DIAG = math.sqrt(2.0)
DEFAULT_R_GRID = tuple(round(0.1 * i, 1) for i in range(-30, 31))
DEFAULT_SAMPLES = 10**7
_CHUNK = 1 << 20


@dataclass(frozen=True)
class GOEGapModel:
    r: float = 0.0

    @property
    def mass(self) -> float:
        return restriction_mass(self.r)

    def indicator(self, points):
        return (points[:, 0] > self.r) & (points[:, 2] < -self.r)


def restriction_mass(r: float) -> float:
    """``nu(A_r) = (1 - erf(r/2))**2 / 4``."""
    return float(0.25 * special.erfc(r / 2) ** 2)


def gap(points: np.ndarray) -> np.ndarray:
    d = points[:, 0] - points[:, 2]
    return np.sqrt(d * d + 4 * points[:, 1] ** 2)


def gap_functional(r: float | None = None) -> stc.Functional:
    ind = None if r is None else GOEGapModel(r).indicator
    return stc.Functional("gap" if r is None else f"gap[A_{r}]", lambda pts, marks: gap(pts), ind)


goe_sampler = stc.product_gaussian([2.0, 1.0, 2.0])


def goe_model(support, r: float | None = None) -> stc.MeasureModel:
    model = stc.MeasureModel(count_law=support, point_sampler=goe_sampler, name="goe")
    if r is None:
        return model
    g = GOEGapModel(r)
    return stc.restrict(model, g.indicator, g.mass)


# Wigner surmise


def wigner_from_uniform(u):
    """Inverse CDF of the surmise: ``2 sqrt(2 log(1/(1-u)))``."""
    return 2.0 * np.sqrt(-2.0 * np.log1p(-np.asarray(u, dtype=float)))


def wigner_cdf(y):
    y = np.asarray(y, dtype=float)
    return np.where(y > 0, -np.expm1(-(y * y) / 8), 0.0)


def wigner_sample(seed: int, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return wigner_from_uniform(stc.replicate_rng(seed, 0).random(n))


def wigner_ks(samples: np.ndarray):
    return stats.kstest(samples, wigner_cdf)


# conditional moments on A_r


@dataclass(frozen=True)
class ConditionalMoments:
    r: float
    a_r: float
    nu_f: float
    nu_f2: float
    se_f: float = 0.0
    se_f2: float = 0.0
    method: str = "quadrature"


def _trunc_moments(r: float):
    """First two moments of ``x11`` given ``x11 > r``."""
    z = r / SD_DIAG
    lam = math.exp(-z * z / 2) / math.sqrt(2 * math.pi) / special.ndtr(-z)
    m1 = SD_DIAG * lam
    m2 = SD_DIAG**2 + r * SD_DIAG * lam
    return m1, m2


def conditional_f2_exact(r: float) -> float:
    """``nu_{A_r} f**2 = 2 E[x11**2 | x11 > r] + 2 E[x11 | x11 > r]**2 + 4``."""
    m1, m2 = _trunc_moments(r)
    return 2 * m2 + 2 * m1 * m1 + 4


def _diff_density(w: float, r: float, tail: float) -> float:
    # density of x11 - x22 - 2r on A_r, w > 0
    s = SD_DIAG
    return (
        math.exp(-((w + 2 * r) ** 2) / (4 * s * s))
        * s
        * math.sqrt(math.pi)
        * math.erf(w / (2 * s))
        / (2 * math.pi * s * s * tail * tail)
    )


def _mean_norm(d: float) -> float:
    # E sqrt(d**2 + 4 Z**2) for standard normal Z
    val, _ = integrate.quad(
        lambda z: math.sqrt(d * d + 4 * z * z) * math.exp(-z * z / 2), 0, math.inf, epsabs=1e-13, epsrel=1e-12
    )
    return 2 * val / math.sqrt(2 * math.pi)


def conditional_moments_quad(r: float) -> ConditionalMoments:
    """Conditional moments by quadrature over the law of ``x11 - x22`` and ``x12``."""
    tail = special.ndtr(-r / SD_DIAG)
    nu_f, _ = integrate.quad(
        lambda w: _diff_density(w, r, tail) * _mean_norm(w + 2 * r), 0, math.inf, limit=200, epsrel=1e-11
    )
    return ConditionalMoments(r, restriction_mass(r), float(nu_f), float(conditional_f2_exact(r)))


def sample_conditioned(rng: np.random.Generator, n: int, r: float) -> np.ndarray:
    """Exact draws from ``nu`` conditioned on ``A_r`` (inverse CDF on each tail)."""
    tail = special.ndtr(-r / SD_DIAG)
    x11 = -SD_DIAG * special.ndtri(tail * rng.random(n))
    x22 = SD_DIAG * special.ndtri(tail * rng.random(n))
    x12 = rng.standard_normal(n)
    return np.column_stack([x11, x12, x22])


def _chunked(seed: int, n: int, draw, threads: int = 1):
    """Apply ``draw(rng, size)`` over fixed chunks keyed by index; order-stable for any thread count."""
    sizes = [min(_CHUNK, n - i) for i in range(0, n, _CHUNK)]

    def job(i):
        return draw(stc.replicate_rng(seed, i), sizes[i])

    if threads <= 1 or len(sizes) == 1:
        return [job(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(job, range(len(sizes))))


def _gap_moments(seed: int, n: int, sampler, threads: int):
    def draw(rng, size):
        f2 = gap(sampler(rng, size)) ** 2
        return np.sqrt(f2).sum(), f2.sum(), (f2 * f2).sum()

    s1, s2, s22 = np.sum(_chunked(seed, n, draw, threads), axis=0)
    m1, m2 = s1 / n, s2 / n
    v1 = (s2 / n - m1 * m1) * n / (n - 1)
    v2 = (s22 / n - m2 * m2) * n / (n - 1)
    return float(m1), float(m2), math.sqrt(v1 / n), math.sqrt(v2 / n)


def conditional_moments_mc(r: float, seed: int, n: int = DEFAULT_SAMPLES, threads: int = 1) -> ConditionalMoments:
    m1, m2, se1, se2 = _gap_moments(seed, n, lambda rng, size: sample_conditioned(rng, size, r), threads)
    return ConditionalMoments(r, restriction_mass(r), m1, m2, se1, se2, "montecarlo")


def conditional_moments(
    r: float, method: str = "montecarlo", seed: int = 0, n: int = DEFAULT_SAMPLES, threads: int = 1
):
    if method == "quadrature":
        return conditional_moments_quad(r)
    if method == "montecarlo":
        return conditional_moments_mc(r, seed, n, threads)
    raise ValueError(f"unknown method {method!r}")


def unconditioned_moments(seed: int, n: int = DEFAULT_SAMPLES, threads: int = 1) -> ConditionalMoments:
    """Monte Carlo ``nu f`` and ``nu f**2`` over the full space (``sqrt(2 pi)`` and 8)."""
    m1, m2, se1, se2 = _gap_moments(seed, n, goe_sampler, threads)
    return ConditionalMoments(-math.inf, 1.0, m1, m2, se1, se2, "montecarlo")


def hit_rate(r: float, seed: int, n: int, threads: int = 1):
    """Monte Carlo ``nu(A_r)`` and its standard error."""
    ind = GOEGapModel(r).indicator
    hits = sum(_chunked(seed, n, lambda rng, size: int(np.count_nonzero(ind(goe_sampler(rng, size)))), threads))
    p = hits / n
    return p, math.sqrt(p * (1 - p) / n)


@dataclass(frozen=True)
class GOERow:
    r: float
    a_r: float
    nu_f: float
    nu_f2: float
    var_ratio_orthogonal: float
    var_ratio_dirac: float


def goe_summary(
    r_grid=DEFAULT_R_GRID, method: str = "montecarlo", seed: int = 0, n: int = DEFAULT_SAMPLES, threads: int = 1
) -> list[GOERow]:
    """Per-``r`` variance ratios ``Var N_{A_r} f / c`` for an orthogonal die and a Dirac count."""
    rows = []
    for i, r in enumerate(r_grid):
        cm = conditional_moments(float(r), method, seed + i, n, threads)
        a = cm.a_r
        rows.append(GOERow(float(r), a, cm.nu_f, cm.nu_f2, a * cm.nu_f2, a * cm.nu_f2 - a * a * cm.nu_f**2))
    return rows


def dirac_cross_covariance(r: float = 0.0, method: str = "quadrature", seed: int = 0, n: int = DEFAULT_SAMPLES):
    """``Cov(N f_A, N f_B) / c`` for a Dirac count with ``B`` the mirror image of ``A_r``.

    ``A`` and ``B`` are disjoint with equal mass and equal conditional mean, so
    the covariance per unit count is ``-(a_r nu_{A_r} f)**2``.
    """
    cm = conditional_moments(r, method, seed, n)
    return -((cm.a_r * cm.nu_f) ** 2)


def interior_maximum(values) -> bool:
    """True when the largest value sits strictly inside the sequence."""
    i = int(np.argmax(values))
    return 0 < i < len(values) - 1


def strictly_decreasing(values) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))
