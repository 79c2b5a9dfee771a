"""Static gravitational potential of a die-counted set of point masses.

``Z_z = sum_i G Y_i / |X_i - z|`` with positions ``X_i ~ rho`` and lognormal
masses ``Y_i`` of mean ``b_m`` and variance ``d_m**2``.  Reference moments come
from tensor-product Gauss rules in spherical coordinates.  A smooth partition
of unity splits each integrand into pieces, one per evaluation point plus one
for the density centre, and each piece is integrated over spheres about its own
centre so the volume element absorbs the ``1/s`` and ``1/s**2`` kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .. import stc
from ..dice import OrthogonalDie, SupportPair, first_die_with_mean_at_least, prime_rank
from ..errors import SingularEvaluationPoint
from ..law import moment_summary

AUTO = "auto"
SOFTENING_FRACTION = 1e-3


def _dist2(x, c=(0.0, 0.0, 0.0)):
    # componentwise; much faster than a reduction over a length-3 axis
    return (x[..., 0] - c[0]) ** 2 + (x[..., 1] - c[1]) ** 2 + (x[..., 2] - c[2]) ** 2


class Density:
    """Spatial law on 3-space with a sampler, a pdf and a nominal support radius."""

    radius: float

    def pdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    @property
    def diameter(self) -> float:
        return 2 * self.radius

    def reach(self) -> float:
        """Distance from the origin beyond which the mass is negligible for quadrature."""
        return self.radius * 4


@dataclass(frozen=True)
class GaussianDensity(Density):
    sigma: float = 1.0

    @property
    def radius(self) -> float:
        return 3 * self.sigma

    def pdf(self, x):
        r2 = _dist2(x)
        return np.exp(-r2 / (2 * self.sigma**2)) / (2 * math.pi * self.sigma**2) ** 1.5

    def sample(self, rng, size):
        return rng.standard_normal((size, 3)) * self.sigma

    def reach(self):
        return 9 * self.sigma


@dataclass(frozen=True)
class ExponentialDisk(Density):
    """``rho ∝ exp(-R/R_d - |h|/h_d)`` in cylindrical coordinates."""

    scale_length: float = 2.6
    scale_height: float = 0.3

    @property
    def radius(self) -> float:
        return 5 * self.scale_length

    def pdf(self, x):
        R = np.hypot(x[..., 0], x[..., 1])
        h = np.abs(x[..., 2])
        norm = 4 * math.pi * self.scale_length**2 * self.scale_height
        return np.exp(-R / self.scale_length - h / self.scale_height) / norm

    def sample(self, rng, size):
        R = rng.gamma(2.0, self.scale_length, size)
        phi = rng.uniform(0, 2 * math.pi, size)
        h = rng.laplace(0.0, self.scale_height, size)
        return np.column_stack([R * np.cos(phi), R * np.sin(phi), h])

    def reach(self):
        return 25 * self.scale_length


@dataclass(frozen=True)
class GravityModel:
    density: Density
    b_m: float = 4.0
    d_m2: float = 4.0
    G: float = 1.0
    softening: float | str | None = AUTO

    def __post_init__(self):
        if self.b_m <= 0 or self.d_m2 < 0:
            raise ValueError("mass law needs b_m > 0 and d_m2 >= 0")

    @property
    def mark_second_moment(self) -> float:
        return self.d_m2 + self.b_m**2

    def epsilon(self, z) -> float:
        """Softening used at ``z``: zero outside the support radius."""
        z = np.asarray(z, dtype=float)
        if np.linalg.norm(z) >= self.density.radius:
            return 0.0
        if self.softening is None or self.softening == 0:
            raise SingularEvaluationPoint(f"z={z.tolist()} lies inside the mass support and softening is off")
        if self.softening == AUTO:
            return SOFTENING_FRACTION * self.density.diameter
        return float(self.softening)

    def kernel(self, x, z):
        eps = self.epsilon(z)
        d2 = _dist2(x, np.asarray(z, dtype=float))
        return 1.0 / np.sqrt(d2 + eps * eps)

    def functional(self, z) -> stc.Functional:
        z = np.asarray(z, dtype=float)
        self.epsilon(z)  # fail early on singular points
        return stc.Functional(f"Z{z.tolist()}", lambda pts, marks: self.G * marks * self.kernel(pts, z))

    def stc_model(self, support) -> stc.MeasureModel:
        return stc.MeasureModel(
            count_law=support,
            point_sampler=self.density.sample,
            mark_kernel=stc.lognormal_marks(self.b_m, self.d_m2),
            name="gravity",
        )


# quadrature


@dataclass(frozen=True)
class QuadRule:
    radial_per_panel: int = 12
    polar_per_panel: int = 8
    n_azimuth: int = 64


# polar panels cluster nodes near the plane h = const, where thin disks live
_MU_BREAKS = (0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5)
_MU_EDGES = tuple(sorted({-1.0, 1.0, 0.0, *_MU_BREAKS, *(-m for m in _MU_BREAKS)}))


def _panel_nodes(edges, n):
    x, w = leggauss(n)
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (hi - lo) * x + 0.5 * (hi + lo))
        weights.append(0.5 * (hi - lo) * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _spherical_integral(model: GravityModel, centre, fn, rule: QuadRule, cuts=()) -> float:
    """``int rho(x) fn(x) dx`` over spheres about ``centre``.

    Centring on a singular point of ``fn`` lets the ``s**2`` volume factor
    absorb ``1/s`` and ``1/s**2`` kernels.  ``cuts`` adds radial panel edges,
    e.g. at the distance to a second singular point.
    """
    centre = np.asarray(centre, dtype=float)
    scale = model.density.radius
    s_max = float(np.linalg.norm(centre)) + model.density.reach()
    edges = {0.0, s_max, float(np.linalg.norm(centre))}
    edges.update(float(c) for c in np.geomspace(scale * 1e-3, s_max, 24))
    edges.update(float(c) for c in cuts)
    edges = sorted(e for e in edges if 0 <= e <= s_max)
    s, ws = _panel_nodes(edges, rule.radial_per_panel)
    mu, wm = _panel_nodes(_MU_EDGES, rule.polar_per_panel)
    phi = (np.arange(rule.n_azimuth) + 0.5) * 2 * math.pi / rule.n_azimuth
    sin_t = np.sqrt(1 - mu * mu)
    dirs = np.stack(
        [np.outer(sin_t, np.cos(phi)), np.outer(sin_t, np.sin(phi)), np.outer(mu, np.ones_like(phi))], axis=-1
    )
    ang_w = np.outer(wm, np.full(rule.n_azimuth, 2 * math.pi / rule.n_azimuth))
    total = 0.0
    for chunk in np.array_split(np.arange(len(s)), max(1, len(s) // 32)):
        pts = centre + s[chunk, None, None, None] * dirs[None]
        vals = model.density.pdf(pts) * fn(pts) * (s[chunk, None, None] ** 2)
        total += float(np.einsum("i,ijk,jk->", ws[chunk], vals, ang_w))
    return total


def _inside(model: GravityModel, z) -> bool:
    return float(np.linalg.norm(z)) < model.density.radius


@dataclass(frozen=True)
class KernelMoments:
    """``nu f_z``, ``nu f_w``, ``nu f_z**2`` and ``nu(f_z f_w)`` including masses and ``G``."""

    nu_fz: float
    nu_fw: float
    nu_fz2: float
    nu_fzfw: float


def _partitioned_integral(model: GravityModel, centres, fn, rule: QuadRule) -> float:
    """``int rho fn`` split by weights ``prod_{k != j} d_k**4 / sum_i prod_{k != i} d_k**4``.

    Piece ``j`` equals 1 at centre ``j`` and vanishes to fourth order at the
    others, so each piece is singular at its own centre only.
    """
    uniq = []
    for c in centres:
        c = np.asarray(c, dtype=float)
        if not any(np.allclose(c, u, rtol=0, atol=1e-12) for u in uniq):
            uniq.append(c)
    if len(uniq) == 1:
        return _spherical_integral(model, uniq[0], fn, rule)

    def share(x, j):
        d4 = [_dist2(x, c) ** 2 for c in uniq]
        others = [math.prod(d4[k] for k in range(len(uniq)) if k != i) for i in range(len(uniq))]
        return others[j] / sum(others)

    total = 0.0
    for j, c in enumerate(uniq):
        cuts = tuple(float(np.linalg.norm(u - c)) for u in uniq)
        total += _spherical_integral(model, c, lambda x, j=j: fn(x) * share(x, j), rule, cuts)
    return total


def kernel_moments(model: GravityModel, z, w, rule: QuadRule = QuadRule()) -> KernelMoments:
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    origin = np.zeros(3)

    def centres(*pts):
        # the density centre joins whenever some point sits outside the support;
        # points beyond the reach see no mass and need no sphere of their own
        near = [p for p in pts if float(np.linalg.norm(p)) < model.density.reach()]
        return near + ([origin] if not all(_inside(model, p) for p in pts) else [])

    i_z = _partitioned_integral(model, centres(z), lambda x: model.kernel(x, z), rule)
    i_w = _partitioned_integral(model, centres(w), lambda x: model.kernel(x, w), rule)
    i_zz = _partitioned_integral(model, centres(z), lambda x: model.kernel(x, z) ** 2, rule)
    i_zw = _partitioned_integral(model, centres(z, w), lambda x: model.kernel(x, z) * model.kernel(x, w), rule)
    g, b, y2 = model.G, model.b_m, model.mark_second_moment
    return KernelMoments(g * b * i_z, g * b * i_w, g * g * y2 * i_zz, g * g * y2 * i_zw)


@dataclass(frozen=True)
class GravityMoments:
    mean_z: float
    var_z: float
    cov_wz: float


def gravity_moments(model: GravityModel, support, z, w, rule: QuadRule = QuadRule()) -> GravityMoments:
    """Closed-form moments from the count law and quadrature kernel integrals."""
    ms = moment_summary(support) if isinstance(support, SupportPair) else None
    c = float(ms.c) if ms else float(support.mean())
    d2 = float(ms.delta_sq) if ms else float(support.variance())
    km = kernel_moments(model, z, w, rule)
    return GravityMoments(
        mean_z=c * km.nu_fz,
        var_z=c * km.nu_fz2 + (d2 - c) * km.nu_fz**2,
        cov_wz=c * km.nu_fzfw + (d2 - c) * km.nu_fz * km.nu_fw,
    )


def gaussian_mean_potential(sigma: float, distance: float) -> float:
    """``int rho(x)/|x - z| dx`` for an isotropic Gaussian: ``erf(r/(sigma sqrt 2))/r``."""
    if distance == 0:
        return math.sqrt(2 / math.pi) / sigma
    return math.erf(distance / (sigma * math.sqrt(2))) / distance


@dataclass(frozen=True)
class GravityEstimate:
    mean_z: stc.EstimateReport
    var_z: stc.EstimateReport
    cov_wz: stc.EstimateReport
    reference: GravityMoments

    def z_scores(self) -> tuple[float, float, float]:
        ref = self.reference
        return (
            self.mean_z.z_score(ref.mean_z),
            self.var_z.z_score(ref.var_z),
            self.cov_wz.z_score(ref.cov_wz),
        )


def gravity_estimate(
    model: GravityModel, support, z, w, n_replicates: int, seed: int, threads: int = 1
) -> GravityEstimate:
    """Stone-throwing estimates of ``E Z_z``, ``Var Z_z`` and ``Cov(Z_w, Z_z)`` with references."""
    fz, fw = model.functional(z), model.functional(w)
    vals = stc.simulate(model.stc_model(support), [fz, fw], n_replicates, seed, threads)
    return GravityEstimate(
        mean_z=stc.mean_report(vals[:, 0], seed),
        var_z=stc.variance_report(vals[:, 0], seed),
        cov_wz=stc.covariance_report(vals[:, 1], vals[:, 0], seed),
        reference=gravity_moments(model, support, z, w),
    )


# Milky Way preset

MILKY_WAY_STARS = 250 * 10**9
SIEVE_LIMIT = 1_800_000


@dataclass(frozen=True)
class MilkyWayReport:
    die: OrthogonalDie
    prime_rank: int | None
    b_m: float
    mass_total: int  # b_m * c, exact when b_m is integral
    z: tuple
    w: tuple
    reference: GravityMoments
    kernel_mc: dict = field(default_factory=dict)


def milky_way_model(b_m: float = 4.0, d_m2: float = 4.0) -> GravityModel:
    """Illustrative exponential-disk stand-in for the galaxy (kpc, ``G = 1``)."""
    return GravityModel(ExponentialDisk(2.6, 0.3), b_m=b_m, d_m2=d_m2)


def milky_way_preset(
    seed: int,
    b_m: int = 4,
    d_m2: float = 4.0,
    z=(8.2, 0.0, 0.02),
    w=(0.0, 0.0, 0.0),
    n_points: int = 10**6,
    rule: QuadRule = QuadRule(),
) -> MilkyWayReport:
    """Counting-law facts plus potential moments at ``z`` and ``w``.

    A full realization has about 2.5e11 points, so the Monte Carlo part samples
    single points to estimate ``nu f_z`` and ``nu f_z**2``; the moments then
    follow from the exact count mean and variance.
    """
    die = first_die_with_mean_at_least(MILKY_WAY_STARS)
    rank = prime_rank(int(die.sides_p), SIEVE_LIMIT)
    model = milky_way_model(b_m, d_m2)
    ref = gravity_moments(model, die.support, z, w, rule)
    rng = stc.replicate_rng(seed, 0)
    pts = model.density.sample(rng, n_points)
    marks = stc.lognormal_marks(model.b_m, model.d_m2)(rng, pts)
    fz = model.G * marks * model.kernel(pts, np.asarray(z, dtype=float))
    kernel_mc = {
        "nu_fz": float(fz.mean()),
        "nu_fz_se": float(fz.std(ddof=1) / math.sqrt(n_points)),
        "nu_fz2": float((fz * fz).mean()),
        "nu_fz2_se": float((fz * fz).std(ddof=1) / math.sqrt(n_points)),
        "mean_z": float(die.mean_c) * float(fz.mean()),
    }
    return MilkyWayReport(die, rank, b_m, b_m * die.mean_c, tuple(z), tuple(w), ref, kernel_mc)
