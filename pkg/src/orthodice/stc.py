"""Seeded Monte Carlo engine for the stone throwing construction.

A realization draws ``K`` from the count law, throws ``K`` iid points from the
point law, optionally marks each point, and keeps only the points inside any
restriction.  Functionals are evaluated as sums over the kept points.

Replicates are grouped into fixed-size blocks.  Block ``b`` draws from a
Philox generator keyed by ``(seed, b)``, and the block size depends only on
the model, so results are bit-identical for any number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .dice import SupportPair
from .law import DiscreteLaw, MomentSummary, moment_summary

Sampler = Callable[[np.random.Generator, int], np.ndarray]
MarkKernel = Callable[[np.random.Generator, np.ndarray], np.ndarray]
Indicator = Callable[[np.ndarray], np.ndarray]

MAX_BLOCK = 4096
POINTS_PER_BLOCK = 1 << 22
Z_95 = 1.959963984540054


def replicate_rng(seed: int, key: int) -> np.random.Generator:
    """Counter-based generator for one block (or one stand-alone realization)."""
    ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 64) - 1), spawn_key=(int(key),))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class MeasureModel:
    """A (count law, point law) pair with optional marks and restriction."""

    count_law: SupportPair | DiscreteLaw
    point_sampler: Sampler
    mark_kernel: MarkKernel | None = None
    restriction: Indicator | None = None
    restriction_mass: Fraction | float = 1
    name: str = ""

    @property
    def count_moments(self) -> MomentSummary:
        if isinstance(self.count_law, SupportPair):
            return moment_summary(self.count_law)
        return MomentSummary(Fraction(self.count_law.mean()), Fraction(self.count_law.variance()))

    def mean_count(self) -> float:
        if isinstance(self.count_law, SupportPair):
            return float(self.count_law.mean)
        return float(self.count_law.mean())

    def block_size(self) -> int:
        upper = self.count_law.n if isinstance(self.count_law, SupportPair) else self.count_law.support_max
        return max(1, min(MAX_BLOCK, POINTS_PER_BLOCK // max(1, int(upper))))


@dataclass(frozen=True)
class Functional:
    """Non-negative per-point function ``fn(points, marks)``, optionally times ``1_A``."""

    name: str
    fn: Callable[[np.ndarray, np.ndarray | None], np.ndarray]
    indicator: Indicator | None = None

    def __call__(self, points, marks):
        vals = np.asarray(self.fn(points, marks), dtype=float)
        if self.indicator is not None:
            vals = vals * self.indicator(points)
        return vals


@dataclass(frozen=True)
class Realization:
    thrown: int
    points: np.ndarray
    marks: np.ndarray | None

    @property
    def count(self) -> int:
        return len(self.points)

    def restrict(self, indicator: Indicator) -> "Realization":
        keep = np.asarray(indicator(self.points), dtype=bool)
        marks = None if self.marks is None else self.marks[keep]
        return Realization(self.thrown, self.points[keep], marks)


@dataclass(frozen=True)
class EstimateReport:
    statistic: str
    point_estimate: float
    std_error: float
    n_replicates: int
    seed: int

    def ci(self, z: float = Z_95) -> tuple[float, float]:
        return self.point_estimate - z * self.std_error, self.point_estimate + z * self.std_error

    def z_score(self, target: float) -> float:
        if self.std_error == 0:
            return 0.0 if self.point_estimate == target else math.inf
        return (self.point_estimate - target) / self.std_error

    def as_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "estimate": self.point_estimate,
            "std_error": self.std_error,
            "n_replicates": self.n_replicates,
            "seed": self.seed,
        }


# samplers


def sample_counts(count_law, rng: np.random.Generator, size: int) -> np.ndarray:
    if isinstance(count_law, SupportPair):
        return rng.integers(count_law.m, count_law.n + 1, size=size, dtype=np.int64)
    probs = count_law.as_floats()
    cdf = np.cumsum(probs / probs.sum())
    cdf[-1] = 1.0
    return count_law.offset + np.searchsorted(cdf, rng.random(size), side="right").astype(np.int64)


def uniform_interval(lo: float = 0.0, hi: float = 1.0) -> Sampler:
    def sample(rng, size):
        return rng.uniform(lo, hi, size)

    return sample


def product_gaussian(variances: Sequence[float]) -> Sampler:
    sd = np.sqrt(np.asarray(variances, dtype=float))

    def sample(rng, size):
        return rng.standard_normal((size, len(sd))) * sd

    return sample


def atomic(n_atoms: int, weights: Sequence[float] | None = None) -> Sampler:
    """Uniform (or weighted) law on atoms ``0..n_atoms-1``."""
    if weights is None:
        return lambda rng, size: rng.integers(0, n_atoms, size)
    w = np.asarray(weights, dtype=float)
    cdf = np.cumsum(w / w.sum())
    cdf[-1] = 1.0
    return lambda rng, size: np.searchsorted(cdf, rng.random(size), side="right")


def lognormal_marks(mean: float, variance: float) -> MarkKernel:
    """iid lognormal marks with the given mean and variance, ignoring the point."""
    s2 = math.log1p(variance / mean**2)
    mu = math.log(mean) - s2 / 2
    sigma = math.sqrt(s2)
    return lambda rng, points: rng.lognormal(mu, sigma, len(points))


def deterministic_marks(h: Callable[[np.ndarray], np.ndarray]) -> MarkKernel:
    """Mark kernel ``Q(x, .) = delta_{h(x)}``."""
    return lambda rng, points: np.asarray(h(points), dtype=float)


SAMPLERS = {
    "uniform": uniform_interval,
    "gaussian": product_gaussian,
    "atomic": atomic,
}
MARK_KERNELS = {
    "lognormal": lognormal_marks,
    "deterministic": deterministic_marks,
}


# construction


def _throw(model: MeasureModel, rng: np.random.Generator, counts: np.ndarray):
    total = int(counts.sum())
    points = model.point_sampler(rng, total)
    marks = model.mark_kernel(rng, points) if model.mark_kernel is not None else None
    owner = np.repeat(np.arange(len(counts)), counts)
    if model.restriction is not None:
        keep = np.asarray(model.restriction(points), dtype=bool)
        points, owner = points[keep], owner[keep]
        marks = None if marks is None else marks[keep]
    return points, marks, owner


def sample_realization(model: MeasureModel, seed: int, index: int = 0) -> Realization:
    """One realization, fully determined by ``(seed, index)``."""
    rng = replicate_rng(seed, (1 << 62) + index)
    counts = sample_counts(model.count_law, rng, 1)
    points, marks, _ = _throw(model, rng, counts)
    return Realization(int(counts[0]), points, marks)


def _run_block(model, functionals, seed, block, size):
    rng = replicate_rng(seed, block)
    counts = sample_counts(model.count_law, rng, size)
    points, marks, owner = _throw(model, rng, counts)
    out = np.empty((size, len(functionals)))
    for j, f in enumerate(functionals):
        out[:, j] = np.bincount(owner, weights=f(points, marks), minlength=size)
    return out


def simulate(
    model: MeasureModel,
    functionals: Sequence[Functional],
    n_replicates: int,
    seed: int,
    threads: int = 1,
) -> np.ndarray:
    """Array ``(n_replicates, len(functionals))`` of ``N f`` values per replicate."""
    if n_replicates < 1:
        raise ValueError("n_replicates must be >= 1")
    bs = model.block_size()
    n_blocks = -(-n_replicates // bs)
    sizes = [min(bs, n_replicates - b * bs) for b in range(n_blocks)]

    def job(b):
        return _run_block(model, functionals, seed, b, sizes[b])

    if threads <= 1 or n_blocks == 1:
        parts = [job(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, range(n_blocks)))
    return np.concatenate(parts, axis=0)


def simulate_counts(model: MeasureModel, n_replicates: int, seed: int, threads: int = 1) -> np.ndarray:
    """Number of kept points per replicate."""
    ones = Functional("count", lambda pts, marks: np.ones(len(pts)))
    return simulate(model, [ones], n_replicates, seed, threads)[:, 0].astype(np.int64)


def restrict(model: MeasureModel, indicator: Indicator, mass=1) -> MeasureModel:
    """Keep only points in ``A``; ``mass`` is ``nu(A)``, recorded for reference."""
    if not 0 < mass <= 1:
        raise ValueError("mass must lie in (0, 1]")
    if mass == 1:
        return model
    prev = model.restriction
    combined = indicator if prev is None else (lambda pts: prev(pts) & indicator(pts))
    return replace(model, restriction=combined, restriction_mass=model.restriction_mass * mass)


# estimators


def mean_report(values: np.ndarray, seed: int) -> EstimateReport:
    n = len(values)
    return EstimateReport("mean", float(values.mean()), float(values.std(ddof=1) / math.sqrt(n)), n, seed)


def variance_report(values: np.ndarray, seed: int) -> EstimateReport:
    n = len(values)
    dev2 = (values - values.mean()) ** 2
    return EstimateReport("variance", float(values.var(ddof=1)), float(dev2.std(ddof=1) / math.sqrt(n)), n, seed)


def covariance_report(x: np.ndarray, y: np.ndarray, seed: int) -> EstimateReport:
    n = len(x)
    prod = (x - x.mean()) * (y - y.mean())
    cov = float(prod.sum() / (n - 1))
    return EstimateReport("covariance", cov, float(prod.std(ddof=1) / math.sqrt(n)), n, seed)


def bootstrap_std_error(values: np.ndarray, statistic: Callable, n_boot: int, seed: int) -> float:
    """Bootstrap standard error of ``statistic`` over rows of ``values``."""
    rng = replicate_rng(seed, (1 << 61) + 7)
    n = len(values)
    stats = [statistic(values[rng.integers(0, n, n)]) for _ in range(n_boot)]
    return float(np.std(stats, ddof=1))


def estimate_functional(
    model: MeasureModel,
    functional: Functional,
    n_replicates: int,
    seed: int,
    statistic: str = "mean",
    other: Functional | None = None,
    threads: int = 1,
    bootstrap: int = 0,
) -> EstimateReport:
    """Monte Carlo estimate of ``E Nf``, ``Var Nf`` or ``Cov(Nf, Ng)``.

    Standard errors use the normal approximation unless ``bootstrap`` gives a
    number of resamples.
    """
    if n_replicates < 2:
        raise ValueError("n_replicates must be >= 2")
    fs = [functional] if other is None else [functional, other]
    vals = simulate(model, fs, n_replicates, seed, threads)
    if statistic == "mean":
        rep = mean_report(vals[:, 0], seed)
        stat_fn = lambda v: v[:, 0].mean()
    elif statistic == "variance":
        rep = variance_report(vals[:, 0], seed)
        stat_fn = lambda v: v[:, 0].var(ddof=1)
    elif statistic == "covariance":
        if other is None:
            raise ValueError("covariance needs a second functional")
        rep = covariance_report(vals[:, 0], vals[:, 1], seed)
        stat_fn = lambda v: np.cov(v[:, 0], v[:, 1])[0, 1]
    else:
        raise ValueError(f"unknown statistic {statistic!r}")
    if bootstrap:
        rep = replace(rep, std_error=bootstrap_std_error(vals, stat_fn, bootstrap, seed))
    return rep


@dataclass(frozen=True)
class SummaryReport:
    names: list
    means: list
    variances: list
    covariances: dict  # (i, j) -> EstimateReport, i < j


def estimate_all(
    model: MeasureModel,
    functionals: Sequence[Functional],
    n_replicates: int,
    seed: int,
    threads: int = 1,
) -> SummaryReport:
    vals = simulate(model, functionals, n_replicates, seed, threads)
    k = len(functionals)
    covs = {
        (i, j): covariance_report(vals[:, i], vals[:, j], seed) for i in range(k) for j in range(i + 1, k)
    }
    return SummaryReport(
        [f.name for f in functionals],
        [mean_report(vals[:, i], seed) for i in range(k)],
        [variance_report(vals[:, i], seed) for i in range(k)],
        covs,
    )
