import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthodice import law, orthopoly
from orthodice.dice import die_from_index, enumerate_orthogonal
from orthodice.errors import DegenerateMomentMatrix, IndexNotInI
from orthodice.orthopoly import Polynomial

X = Polynomial.monomial(1)
ONE = Polynomial.monomial(0)

# degree-3 distances along k0=17, l in (17, 19, 22, 25, 31); p=1 then p=2.
# First entry cross-checked against a scipy-weighted float sum over x < 800.
PINNED = {
    1: [1175.76, 783.74, 457.72, 285.00, 127.45],
    2: [1554.97, 1050.50, 621.40, 391.13, 177.65],
}
FIG_INDICES = [17, 19, 22, 25, 31]


def poly(*coefs):
    return Polynomial(tuple(Fraction(c) for c in coefs))


def test_first_two_gram_schmidt_steps():
    moments = [Fraction(1), Fraction(3, 2), Fraction(4), Fraction(11), Fraction(35)]
    sys = orthopoly.gram_schmidt_system(moments, 2)
    assert sys[0] == ONE
    assert sys[1] == X - ONE * Fraction(3, 2)


def test_small_die_systems():
    sys = orthopoly.thinned_die_system((0, 4), 1, 2)
    assert sys[1] == poly(-2, 1)
    assert sys[2] == poly(2, -4, 1)
    # second-order polynomials differ from Charlier(2) since third moments differ
    assert orthopoly.charlier_system(2, 2)[2] == poly(4, -5, 1)
    assert sys[2] != orthopoly.charlier_system(2, 2)[2]
    assert law.raw_moment((0, 4), 1, 3) == 20


def test_dirac_measure_only_supports_degree_zero():
    assert orthopoly.thinned_die_system((5, 5), 1, 0)[0] == ONE
    with pytest.raises(DegenerateMomentMatrix):
        orthopoly.thinned_die_system((5, 5), 1, 1)


def test_degree_capped_by_support_size():
    orthopoly.thinned_die_system((0, 4), 1, 4)
    with pytest.raises(DegenerateMomentMatrix):
        orthopoly.thinned_die_system((0, 4), 1, 5)


def test_large_die_first_polynomial():
    assert orthopoly.thinned_die_system((96, 132), 1, 1)[1] == poly(-114, 1)
    assert orthopoly.thinned_die_system((96, 132), Fraction(1, 2), 1)[1] == poly(-57, 1)


def test_charlier_examples():
    assert orthopoly.charlier_system(114, 2)[2] == poly(12996, -229, 1)
    assert orthopoly.charlier_system(Fraction(7, 3), 1)[1] == poly(Fraction(-7, 3), 1)
    c2 = orthopoly.charlier_system(1, 2)[2]
    assert orthopoly.poisson_inner(c2, c2, 1) == pytest.approx(2, rel=1e-12)


def direct_poisson_inner(p, q, theta, cut=1200):
    # plain log-space weights, independent of the library's truncation logic
    total = 0.0
    for x in range(cut):
        w = math.exp(-theta + x * math.log(theta) - math.lgamma(x + 1)) if theta else float(x == 0)
        total += w * float(p(x)) * float(q(x))
    return total


def test_charlier_norm_by_direct_sum():
    c2 = orthopoly.charlier_system(1, 2)[2]
    assert direct_poisson_inner(c2, c2, 1.0) == pytest.approx(2, rel=1e-12)


@pytest.mark.parametrize("theta", [1, 2, 114])
def test_charlier_matches_gram_schmidt_on_truncated_moments(theta):
    moments = orthopoly.truncated_poisson_moments(theta, 11)
    gs = orthopoly.gram_schmidt_system(moments, 5)
    rec = orthopoly.charlier_system(theta, 5)
    for n in range(6):
        a, b = gs[n].coefficients, rec[n].coefficients
        assert len(a) == len(b)
        scale = max(1.0, max(abs(float(c)) for c in b))
        assert all(abs(float(u) - float(v)) <= 1e-10 * scale for u, v in zip(a, b))


@pytest.mark.parametrize("theta", [1, 114])
def test_charlier_norms_and_orthogonality(theta):
    sys = orthopoly.charlier_system(theta, 5)
    for i in range(6):
        norm = orthopoly.poisson_inner(sys[i], sys[i], theta)
        assert norm == pytest.approx(math.factorial(i) * theta**i, rel=1e-10)
        for j in range(i):
            off = orthopoly.poisson_inner(sys[i], sys[j], theta)
            scale = math.sqrt(math.factorial(i) * theta**i * math.factorial(j) * theta**j)
            assert abs(off) / scale < 1e-10


@pytest.mark.parametrize("a", [Fraction(1), Fraction(1, 2)])
def test_exact_orthogonality_first_ten_dice(a):
    for die in enumerate_orthogonal(10):
        sp = die.support
        d_max = min(5, sp.sides - 1)
        sys = orthopoly.thinned_die_system(sp, a, d_max)
        pmf = law.thinned_pmf(sp, a)
        for i in range(d_max + 1):
            assert sys[i].is_monic() and sys[i].degree == i
            for j in range(i):
                assert orthopoly.pmf_inner(sys[i], sys[j], pmf) == 0


@given(st.integers(1, 40).filter(lambda k: k % 3), st.fractions(min_value=Fraction(1, 20), max_value=1))
@settings(max_examples=30, deadline=None)
def test_first_two_polys_match_poisson(k, a):
    sp = die_from_index(k).support
    die = orthopoly.thinned_die_system(sp, a, 1)
    pois = orthopoly.charlier_system(a * sp.mean, 1)
    assert die[0] == pois[0] and die[1] == pois[1]
    # first two raw moments coincide exactly
    c = a * sp.mean
    assert law.raw_moment(sp, a, 1) == c and law.raw_moment(sp, a, 2) == c + c * c


def test_lp_distance_identity_and_finiteness():
    c3 = orthopoly.charlier_system(114, 3)[3]
    assert orthopoly.lp_distance(c3, c3, 114, 2) == 0
    sys = orthopoly.thinned_die_system((96, 132), 1, 5)
    ch = orthopoly.charlier_system(114, 5)
    for deg in range(6):
        for p in (1, 2, 3, 4):
            d, cut = orthopoly.lp_distance_with_cut(sys[deg], ch[deg], 114, p)
            assert math.isfinite(d) and d >= 0
            assert d == 0 if deg < 2 else cut > 114


def test_pinned_degree_three_distance_by_direct_sum():
    p3 = orthopoly.thinned_die_system((96, 132), 1, 3)[3]
    c3 = orthopoly.charlier_system(114, 3)[3]
    direct = math.sqrt(direct_poisson_inner(p3 - c3, p3 - c3, 114.0))
    assert orthopoly.lp_distance(p3, c3, 114, 2) == pytest.approx(direct, rel=1e-9)


def test_convergence_report_regression():
    rep = orthopoly.convergence_report(17, FIG_INDICES, 3, (1, 2))
    assert [r.l for r in rep.rows] == FIG_INDICES
    assert [r.a for r in rep.rows] == [law.matched_thinning(17, l) for l in FIG_INDICES]
    for p, expected in PINNED.items():
        assert [r.distances[p] for r in rep.rows] == pytest.approx(expected, abs=0.01)
    assert rep.plot_header[:3] == ["x", "poisson_weight", "charlier"]
    assert all(len(row) == len(rep.plot_header) for row in rep.plot_rows)


@pytest.mark.parametrize("degree", [2, 3, 4])
def test_distances_strictly_decrease(degree):
    rep = orthopoly.convergence_report(17, FIG_INDICES, degree, (1, 2))
    for p in (1, 2):
        col = [r.distances[p] for r in rep.rows]
        assert all(u > v for u, v in zip(col, col[1:]))


@pytest.mark.parametrize("degree", [0, 1])
def test_low_degrees_coincide(degree):
    rep = orthopoly.convergence_report(17, FIG_INDICES, degree, (1, 2))
    assert all(r.distances[p] == 0 for r in rep.rows for p in (1, 2))


def test_report_rejects_bad_index():
    with pytest.raises(IndexNotInI):
        orthopoly.convergence_report(17, [18], 3)
