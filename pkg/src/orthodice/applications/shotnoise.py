"""Shot noise driven by a die-counted set of arrivals on ``[0, T]``.

``Z_t = sum_i g(t - X_i) 1{X_i <= t}`` with pulse ``g(u) = a_p exp(-b_p u)`` and
arrivals ``X_i`` uniform on ``[0, T]``.  Moments hold for any count law; for
orthogonal dice the ``(delta**2 - c)`` terms vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import stc
from ..dice import SupportPair, die_from_index
from ..errors import TimeOutOfRange
from ..law import DiscreteLaw, moment_summary


@dataclass(frozen=True)
class ShotNoiseModel:
    T: float
    die: SupportPair | DiscreteLaw
    a_p: float = 1.0
    b_p: float = 1.0

    def __post_init__(self):
        if not (self.T > 0 and self.a_p > 0 and self.b_p > 0):
            raise ValueError("T, a_p and b_p must be positive")

    @classmethod
    def from_index(cls, k: int, T: float, a_p: float = 1.0, b_p: float = 1.0):
        return cls(T, die_from_index(k).support, a_p, b_p)

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.T):
            raise TimeOutOfRange(f"times must lie in [0, {self.T}]")
        return t

    def count_moments(self):
        if isinstance(self.die, SupportPair):
            ms = moment_summary(self.die)
            return float(ms.c), float(ms.delta_sq)
        return float(self.die.mean()), float(self.die.variance())

    # per-point integrals against nu = Uniform[0, T]
    def nu_f(self, t):
        return self.a_p * -np.expm1(-self.b_p * t) / (self.b_p * self.T)

    def nu_fst(self, s, t):
        s, t = np.minimum(s, t), np.maximum(s, t)
        b = self.b_p
        return self.a_p**2 / (2 * b * self.T) * (np.exp(-b * (t - s)) - np.exp(-b * (t + s)))

    def pulse(self, u):
        u = np.asarray(u, dtype=float)
        return np.where(u >= 0, self.a_p * np.exp(-self.b_p * np.maximum(u, 0.0)), 0.0)


@dataclass(frozen=True)
class ShotNoiseMoments:
    mean: float
    var_t: float
    var_s: float
    cov_st: float


def shotnoise_moments(model: ShotNoiseModel, s: float, t: float) -> ShotNoiseMoments:
    """Closed-form ``E Z_t``, ``Var Z_t``, ``Var Z_s`` and ``Cov(Z_s, Z_t)``."""
    s, t = float(model._check(s)), float(model._check(t))
    c, d2 = model.count_moments()
    extra = d2 - c
    ft, fs = model.nu_f(t), model.nu_f(s)
    return ShotNoiseMoments(
        mean=float(c * ft),
        var_t=float(c * model.nu_fst(t, t) + extra * ft * ft),
        var_s=float(c * model.nu_fst(s, s) + extra * fs * fs),
        cov_st=float(c * model.nu_fst(s, t) + extra * fs * ft),
    )


def moment_grid(model: ShotNoiseModel, grid):
    """Closed-form mean vector and covariance matrix on ``grid``."""
    grid = model._check(grid)
    c, d2 = model.count_moments()
    f = model.nu_f(grid)
    cov = c * model.nu_fst(grid[:, None], grid[None, :]) + (d2 - c) * np.outer(f, f)
    return c * f, cov


def snapshot_functional(model: ShotNoiseModel, t: float) -> stc.Functional:
    return stc.Functional(f"Z[{t:g}]", lambda x, marks: model.pulse(t - x))


def stc_model(model: ShotNoiseModel) -> stc.MeasureModel:
    return stc.MeasureModel(model.die, stc.uniform_interval(0.0, model.T), name="shotnoise")


def path(model: ShotNoiseModel, arrivals, grid) -> np.ndarray:
    """``Z`` on ``grid`` for the given arrival times (empty arrivals give zeros)."""
    arrivals = np.asarray(arrivals, dtype=float).reshape(-1)
    grid = np.asarray(grid, dtype=float)
    if arrivals.size == 0:
        return np.zeros_like(grid)
    return model.pulse(grid[:, None] - arrivals[None, :]).sum(axis=1)


def ou_residual(model: ShotNoiseModel, arrivals, grid):
    """``Z_t + b_p int_0^t Z_s ds - a_p N([0, t])`` on ``grid`` (trapezoid rule) and its error bound.

    The bound charges ``a_p b_p h`` per arrival for the jump inside a cell of
    width ``h`` plus the trapezoid curvature term on the smooth parts.
    """
    grid = np.asarray(grid, dtype=float)
    z = path(model, arrivals, grid)
    h = np.diff(grid)
    integral = np.concatenate([[0.0], np.cumsum(0.5 * h * (z[1:] + z[:-1]))])
    arrivals = np.sort(np.asarray(arrivals, dtype=float).reshape(-1))
    n_t = np.searchsorted(arrivals, grid, side="right")
    resid = z + model.b_p * integral - model.a_p * n_t
    hmax = float(h.max()) if h.size else 0.0
    a, b = model.a_p, model.b_p
    bound = a * b * hmax * (n_t + 1) + b**3 * hmax**2 * grid * a * np.maximum(n_t, 1) / 12
    return resid, bound


@dataclass(frozen=True)
class ShotNoiseSimulation:
    grid: np.ndarray
    mean: np.ndarray
    mean_se: np.ndarray
    var: np.ndarray
    var_se: np.ndarray
    cov: np.ndarray  # full empirical covariance matrix
    cov_se: np.ndarray
    paths: np.ndarray  # sample paths on ``path_grid``
    path_grid: np.ndarray
    max_ou_excess: float  # max over paths of |residual| / bound; <= 1 means the identity holds
    n_replicates: int
    seed: int


def shotnoise_simulate(
    model: ShotNoiseModel,
    time_grid,
    n_replicates: int,
    seed: int,
    threads: int = 1,
    n_paths: int = 5,
    path_points: int = 2001,
) -> ShotNoiseSimulation:
    grid = model._check(time_grid)
    if n_replicates < 2:
        raise ValueError("n_replicates must be >= 2")
    fs = [snapshot_functional(model, float(t)) for t in grid]
    vals = stc.simulate(stc_model(model), fs, n_replicates, seed, threads)
    n = n_replicates
    mean = vals.mean(axis=0)
    dev = vals - mean
    cov = dev.T @ dev / (n - 1)
    # standard error of each covariance entry from the spread of centred products
    prod2 = (dev**2).T @ (dev**2) / n
    cov_se = np.sqrt(np.maximum(prod2 - (cov * (n - 1) / n) ** 2, 0.0) * n / (n - 1) / n)
    var = np.diag(cov).copy()

    path_grid = np.linspace(0.0, model.T, path_points)
    sm = stc_model(model)
    paths, excess = [], 0.0
    for i in range(n_paths):
        arrivals = stc.sample_realization(sm, seed, i).points
        paths.append(path(model, arrivals, path_grid))
        resid, bound = ou_residual(model, arrivals, path_grid)
        excess = max(excess, float(np.max(np.abs(resid) / bound)))
    return ShotNoiseSimulation(
        grid=grid,
        mean=mean,
        mean_se=vals.std(axis=0, ddof=1) / math.sqrt(n),
        var=var,
        var_se=np.diag(cov_se).copy(),
        cov=cov,
        cov_se=cov_se,
        paths=np.array(paths).reshape(n_paths, path_points),
        path_grid=path_grid,
        max_ou_excess=excess,
        n_replicates=n,
        seed=seed,
    )
