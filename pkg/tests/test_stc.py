from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from orthodice import law, stc
from orthodice.dice import SupportPair, enumerate_orthogonal

UNIT = stc.uniform_interval(0.0, 1.0)
count = stc.Functional("count", lambda x, m: np.ones(len(x)))
ident = stc.Functional("x", lambda x, m: x)
left = stc.Functional("left", lambda x, m: (x < 0.5).astype(float))
right = stc.Functional("right", lambda x, m: 2.0 * (x >= 0.5))


def test_degenerate_die_always_gives_five():
    model = stc.MeasureModel(SupportPair(5, 5), UNIT)
    assert set(stc.simulate_counts(model, 2000, seed=1)) == {5}
    assert stc.sample_realization(model, 3).count == 5


def test_small_die_mean_count():
    model = stc.MeasureModel(SupportPair(0, 4), UNIT)
    rep = stc.estimate_functional(model, count, 10**5, seed=7)
    assert abs(rep.z_score(2.0)) < 3


def test_restriction_to_full_space_is_identity():
    model = stc.MeasureModel(SupportPair(8, 20), UNIT)
    r = stc.sample_realization(model, 5, 2)
    assert np.array_equal(r.restrict(lambda x: np.ones(len(x), dtype=bool)).points, r.points)
    sub = r.restrict(lambda x: x < 0.3)
    assert sub.count == int((r.points < 0.3).sum())
    assert stc.restrict(model, lambda x: x < 0.3, 1) is model


def test_restriction_counts_match_realization():
    # N_A(B) = N(A n B): the restricted model sees exactly the points the full one keeps in A
    model = stc.MeasureModel(SupportPair(16, 32), UNIT)
    sub = stc.restrict(model, lambda x: x < 0.4, Fraction(2, 5))
    for i in range(20):
        full = stc.sample_realization(model, 9, i)
        part = stc.sample_realization(sub, 9, i)
        assert np.array_equal(part.points, full.points[full.points < 0.4])


@pytest.mark.parametrize("threads", [2, 4])
def test_thread_count_does_not_change_results(threads):
    model = stc.MeasureModel(SupportPair(96, 132), UNIT)
    a = stc.simulate(model, [ident, left], 50_000, seed=11, threads=1)
    b = stc.simulate(model, [ident, left], 50_000, seed=11, threads=threads)
    assert np.array_equal(a, b)
    ra = stc.estimate_functional(model, ident, 20_000, 3, "variance", threads=1)
    rb = stc.estimate_functional(model, ident, 20_000, 3, "variance", threads=threads)
    assert ra == rb


def test_different_seeds_differ():
    model = stc.MeasureModel(SupportPair(0, 4), UNIT)
    assert not np.array_equal(stc.simulate_counts(model, 1000, 1), stc.simulate_counts(model, 1000, 2))


CAMPBELL_CASES = [
    # count law, sampler, mark kernel, functional, nu f, nu f^2
    (SupportPair(96, 132), UNIT, None, ident, 0.5, 1 / 3),
    (SupportPair(1, 6), UNIT, None, ident, 0.5, 1 / 3),
    (SupportPair(0, 36), UNIT, None, left, 0.5, 0.5),
    (law.thinned_pmf((8, 20), Fraction(1, 3)), UNIT, None, ident, 0.5, 1 / 3),
    (
        SupportPair(5, 15),
        stc.product_gaussian([1.0, 4.0]),
        None,
        stc.Functional("r2", lambda x, m: (x**2).sum(axis=1)),
        5.0,
        59.0,  # E x1^4 + 2 E x1^2 E x2^2 + E x2^4 = 3 + 8 + 48
    ),
    (
        SupportPair(21, 39),
        UNIT,
        stc.lognormal_marks(2.0, 1.0),
        stc.Functional("mark", lambda x, m: m),
        2.0,
        5.0,
    ),
    (SupportPair(40, 64), stc.atomic(4), None, stc.Functional("atom", lambda x, m: x.astype(float)), 1.5, 3.5),
]


@pytest.mark.parametrize("case", CAMPBELL_CASES, ids=lambda c: getattr(c, "name", None))
def test_campbell_consistency(case):
    count_law, sampler, marks, f, nf, nf2 = case
    model = stc.MeasureModel(count_law, sampler, marks)
    ms = model.count_moments
    c, d2 = float(ms.c), float(ms.delta_sq)
    mean = stc.estimate_functional(model, f, 200_000, seed=21)
    var = stc.estimate_functional(model, f, 200_000, seed=21, statistic="variance")
    assert abs(mean.z_score(c * nf)) < 4
    assert abs(var.z_score(c * nf2 + (d2 - c) * nf * nf)) < 4


def test_thinned_counts_match_exact_law():
    model = stc.restrict(stc.MeasureModel(SupportPair(0, 4), UNIT), lambda x: x < 0.5, Fraction(1, 2))
    k = stc.simulate_counts(model, 10**6, seed=5)
    observed = np.bincount(k, minlength=5)
    assert observed.size == 5
    expected = np.array([float(p) for p in law.thinned_pmf((0, 4), Fraction(1, 2)).probs]) * k.size
    assert stats.chisquare(observed, expected).pvalue > 0.01
    # the thinned law is not uniform on any range: reject uniform on its support
    assert stats.chisquare(observed, np.full(5, k.size / 5)).pvalue < 1e-6


def test_thinned_orthogonal_law_is_not_uniform_exactly():
    pmf = law.thinned_pmf((96, 132), Fraction(1, 3))
    assert len(set(pmf.probs)) > 1


@pytest.mark.parametrize("die", enumerate_orthogonal(5), ids=lambda d: f"k{d.k}")
def test_disjoint_functionals_uncorrelated(die):
    model = stc.MeasureModel(die.support, UNIT)
    rep = stc.estimate_functional(model, left, 200_000, seed=die.k, statistic="covariance", other=right)
    assert abs(rep.z_score(0.0)) < 4


def test_negative_die_has_negative_covariance():
    model = stc.MeasureModel(SupportPair(1, 6), UNIT)
    rep = stc.estimate_functional(model, left, 200_000, seed=4, statistic="covariance", other=right)
    # (delta^2 - c) nu f nu g = (35/12 - 7/2) * 1/2 * 1
    assert abs(rep.z_score((35 / 12 - 3.5) * 0.5)) < 4
    assert rep.point_estimate < 0


def test_dirac_variance():
    model = stc.MeasureModel(SupportPair(10, 10), UNIT)
    rep = stc.estimate_functional(model, ident, 200_000, seed=8, statistic="variance")
    assert abs(rep.z_score(10 / 12)) < 4


def test_bootstrap_option():
    model = stc.MeasureModel(SupportPair(0, 4), UNIT)
    plain = stc.estimate_functional(model, ident, 5000, seed=2)
    boot = stc.estimate_functional(model, ident, 5000, seed=2, bootstrap=200)
    assert boot.point_estimate == plain.point_estimate
    assert boot.std_error == pytest.approx(plain.std_error, rel=0.2)


def test_estimate_all_and_report_fields():
    model = stc.MeasureModel(SupportPair(0, 4), UNIT)
    s = stc.estimate_all(model, [ident, left, right], 10_000, seed=1)
    assert s.names == ["x", "left", "right"]
    assert set(s.covariances) == {(0, 1), (0, 2), (1, 2)}
    lo, hi = s.means[0].ci()
    assert lo < s.means[0].point_estimate < hi
    assert s.means[0].as_dict()["n_replicates"] == 10_000


def test_input_validation():
    model = stc.MeasureModel(SupportPair(0, 4), UNIT)
    with pytest.raises(ValueError):
        stc.estimate_functional(model, ident, 1, seed=0)
    with pytest.raises(ValueError):
        stc.estimate_functional(model, ident, 10, seed=0, statistic="covariance")
    with pytest.raises(ValueError):
        stc.restrict(model, lambda x: x < 0.5, 0)
