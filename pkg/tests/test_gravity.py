import math
import time

import numpy as np
import pytest

from orthodice.applications import gravity as gr
from orthodice.dice import SupportPair
from orthodice.errors import SingularEvaluationPoint

DIE = SupportPair(96, 132)


def test_narrow_mass_gives_count_mean():
    model = gr.GravityModel(gr.GaussianDensity(0.01), b_m=1.0, d_m2=0.5, G=1.0)
    ref = gr.gravity_moments(model, DIE, (1.0, 0.0, 0.0), (0.0, 2.0, 0.0))
    assert ref.mean_z == pytest.approx(114, rel=1e-4)


@pytest.mark.parametrize("distance", [3.5, 5.0, 12.0])
def test_gaussian_quadrature_matches_closed_form_outside(distance):
    model = gr.GravityModel(gr.GaussianDensity(1.0), b_m=1.0, G=1.0)
    km = gr.kernel_moments(model, (0.0, distance, 0.0), (distance, 0.0, 0.0))
    assert km.nu_fz == pytest.approx(gr.gaussian_mean_potential(1.0, distance), rel=1e-8)
    assert km.nu_fw == pytest.approx(km.nu_fz, rel=1e-10)


@pytest.mark.parametrize("distance", [0.0, 0.4, 1.7])
def test_gaussian_quadrature_matches_closed_form_inside(distance):
    z, w = (distance, 0.0, 0.0), (0.0, 0.0, 5.0)
    exact = gr.gaussian_mean_potential(1.0, distance)
    hard = gr.GravityModel(gr.GaussianDensity(1.0), b_m=1.0, G=1.0, softening=1e-12)
    assert gr.kernel_moments(hard, z, w).nu_fz == pytest.approx(exact, rel=1e-10)
    # default softening (0.006 here) lowers the potential slightly
    soft = gr.GravityModel(gr.GaussianDensity(1.0), b_m=1.0, G=1.0)
    val = gr.kernel_moments(soft, z, w).nu_fz
    assert exact * (1 - 2e-4) < val < exact


def plain_mc_kernels(model, z, w, n, seed):
    rng = np.random.default_rng(seed)
    x = model.density.sample(rng, n)
    kz = 1 / np.sqrt(np.sum((x - z) ** 2, axis=1) + model.epsilon(z) ** 2)
    kw = 1 / np.sqrt(np.sum((x - w) ** 2, axis=1) + model.epsilon(w) ** 2)
    return kz, kw


@pytest.mark.parametrize(
    "density, z, w",
    [
        (gr.GaussianDensity(1.0), (0.5, 0.0, 0.0), (-1.0, 0.5, 0.0)),
        (gr.GaussianDensity(1.0), (4.0, 0.0, 0.0), (0.0, 0.3, 0.0)),
        (gr.ExponentialDisk(2.6, 0.3), (8.2, 0.0, 0.02), (0.0, 0.0, 0.0)),
        (gr.ExponentialDisk(2.6, 0.3), (20.0, 0.0, 5.0), (3.0, 1.0, 0.0)),
    ],
)
def test_kernel_integrals_against_plain_sampling(density, z, w):
    model = gr.GravityModel(density, b_m=1.0, d_m2=0.0, G=1.0)
    km = gr.kernel_moments(model, z, w)
    kz, kw = plain_mc_kernels(model, np.array(z), np.array(w), 1_000_000, seed=3)
    for ref, sample in ((km.nu_fz, kz), (km.nu_fz2, kz * kz), (km.nu_fzfw, kz * kw)):
        se = sample.std(ddof=1) / math.sqrt(len(sample))
        assert abs(ref - sample.mean()) < 4 * se


def test_marks_and_constant_scale_moments():
    base = gr.kernel_moments(gr.GravityModel(gr.GaussianDensity(1.0), 1.0, 0.0, 1.0), (4, 0, 0), (0, 4, 0))
    scaled = gr.kernel_moments(gr.GravityModel(gr.GaussianDensity(1.0), 3.0, 2.0, 0.5), (4, 0, 0), (0, 4, 0))
    assert scaled.nu_fz == pytest.approx(1.5 * base.nu_fz)
    assert scaled.nu_fz2 == pytest.approx(0.25 * 11 * base.nu_fz2)


@pytest.mark.parametrize(
    "density, support, z, w",
    [
        (gr.GaussianDensity(1.0), DIE, (4.0, 0.0, 0.0), (0.0, 0.0, 4.0)),
        (gr.GaussianDensity(1.0), SupportPair(1, 6), (0.3, 0.0, 0.0), (-0.5, 0.2, 0.0)),
        (gr.ExponentialDisk(2.6, 0.3), DIE, (8.2, 0.0, 0.02), (0.0, 0.0, 0.0)),
    ],
)
def test_stone_throwing_matches_reference(density, support, z, w):
    model = gr.GravityModel(density, b_m=4.0, d_m2=4.0)
    est = gr.gravity_estimate(model, support, z, w, 20_000, seed=5)
    assert all(abs(s) < 4 for s in est.z_scores())


def test_orthogonal_die_covariance_is_c_times_cross_term():
    model = gr.GravityModel(gr.GaussianDensity(1.0))
    z, w = (4.0, 0.0, 0.0), (0.0, 4.0, 0.0)
    km = gr.kernel_moments(model, z, w)
    ref = gr.gravity_moments(model, DIE, z, w)
    assert ref.cov_wz == pytest.approx(114 * km.nu_fzfw)
    assert ref.var_z == pytest.approx(114 * km.nu_fz2)


def test_softening_rules():
    model = gr.GravityModel(gr.GaussianDensity(1.0))
    assert model.epsilon((5.0, 0, 0)) == 0.0
    assert model.epsilon((0.1, 0, 0)) == pytest.approx(6e-3)
    fixed = gr.GravityModel(gr.GaussianDensity(1.0), softening=0.05)
    assert fixed.epsilon((0.1, 0, 0)) == 0.05
    hard = gr.GravityModel(gr.GaussianDensity(1.0), softening=None)
    assert hard.epsilon((5.0, 0, 0)) == 0.0
    with pytest.raises(SingularEvaluationPoint):
        hard.functional((0.0, 0.0, 0.0))
    with pytest.raises(SingularEvaluationPoint):
        gr.gravity_moments(hard, DIE, (0.0, 0.0, 0.0), (5.0, 0.0, 0.0))


def test_invalid_mass_law():
    with pytest.raises(ValueError):
        gr.GravityModel(gr.GaussianDensity(1.0), b_m=0.0)


def test_densities_integrate_to_one():
    rng = np.random.default_rng(1)
    for density in (gr.GaussianDensity(1.3), gr.ExponentialDisk(2.6, 0.3)):
        model = gr.GravityModel(density)
        # integrate pdf * |x - far|, which makes the integrand the constant mass after the 1/|x - far| kernel
        far = np.array([1e6, 0.0, 0.0])
        nf = gr.kernel_moments(model, far, far).nu_fz / model.b_m
        assert nf * 1e6 == pytest.approx(1.0, rel=1e-6)
        x = density.sample(rng, 10)
        assert np.all(density.pdf(x) > 0)


def test_milky_way_preset():
    t0 = time.perf_counter()
    rep = gr.milky_way_preset(seed=0)
    elapsed = time.perf_counter() - t0
    d = rep.die
    assert (d.m, d.n, d.mean_c, d.sides_p) == (249999189525, 250000921575, 250000055550, 1732051)
    assert rep.prime_rank == 130347
    assert rep.mass_total == 1_000_000_222_200
    mc = rep.kernel_mc
    km = gr.kernel_moments(gr.milky_way_model(), rep.z, rep.w)
    assert abs(mc["nu_fz"] - km.nu_fz) < 4 * mc["nu_fz_se"]
    assert abs(mc["nu_fz2"] - km.nu_fz2) < 4 * mc["nu_fz2_se"]
    assert rep.reference.mean_z == pytest.approx(float(d.mean_c) * km.nu_fz)
    assert elapsed < 5.0
