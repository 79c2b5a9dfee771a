import math
from fractions import Fraction

import numpy as np
import pytest

from orthodice.applications import cards
from orthodice.dice import SupportPair
from orthodice.errors import InvalidPartition


def brute_suit_moments():
    # enumerate the 52 cards directly: point value and suit per card
    pts = {s: [Fraction(0)] * 52 for s in range(4)}
    for x in range(52):
        pts[x // 13][x] = Fraction(x % 13 + 1)
    w = Fraction(1, 52)
    nu_f = sum(w * v for v in pts[0])
    nu_f2 = sum(w * v * v for v in pts[0])
    nu_fg = sum(w * a * b for a, b in zip(pts[0], pts[2]))
    return nu_f, nu_f2, nu_fg


def brute_table(m, n):
    nu_f, nu_f2, nu_fg = brute_suit_moments()
    ks = range(m, n + 1)
    c = Fraction(sum(ks), len(ks))
    d2 = Fraction(sum(k * k for k in ks), len(ks)) - c * c
    return c * nu_f, c * nu_f2 + (d2 - c) * nu_f**2, c * nu_fg + (d2 - c) * nu_f**2


def test_deck_moments():
    assert cards.DECK.nu_h() == 7 and cards.DECK.nu_h2() == 63
    assert cards.DECK.suit_mass(0) == Fraction(1, 4)
    assert brute_suit_moments()[:2] == (Fraction(7, 4), Fraction(63, 4))


@pytest.mark.parametrize(
    "support, cov",
    [((1, 6), Fraction(-343, 192)), ((1, 7), Fraction(0)), ((1, 8), Fraction(147, 64)), ((0, 36), Fraction(294))],
)
def test_covariance_table(support, cov):
    t = cards.cards_covariance_table(SupportPair(*support))
    assert t.covariance == cov
    assert (t.mean, t.variance, t.covariance) == brute_table(*support)


def test_positive_die_correlation():
    t = cards.cards_covariance_table(SupportPair(0, 36))
    assert t.variance == Fraction(1155, 2)
    assert t.mean == Fraction(63, 2)
    assert t.correlation == pytest.approx(0.509, abs=1e-3)


@pytest.mark.parametrize("support, z_seed", [((1, 6), 2024), ((1, 7), 2024), ((0, 36), 2024)])
def test_covariance_monte_carlo(support, z_seed):
    sp = SupportPair(*support)
    rep = cards.suit_pair_covariance_mc(sp, 200_000, z_seed)
    assert abs(rep.z_score(float(cards.cards_covariance_table(sp).covariance))) < 4


def test_partition_examples():
    p = cards.cards_partition_pmf(7, (2, 2, 2, 1))
    assert float(p.without_replacement) == pytest.approx(0.0461128, abs=5e-7)
    assert float(p.with_replacement) == pytest.approx(0.0384521, abs=5e-7)
    one = cards.cards_partition_pmf(1, (1, 0, 0, 0))
    assert one.without_replacement == one.with_replacement == Fraction(1, 4)
    zero = cards.cards_partition_pmf(0, (0, 0, 0, 0))
    assert zero.without_replacement == zero.with_replacement == 1


@pytest.mark.parametrize("hand", range(8))
def test_partitions_sum_to_one(hand):
    parts = list(cards.partitions_of(hand))
    assert len(parts) == math.comb(hand + 3, 3)
    probs = [cards.cards_partition_pmf(hand, p) for p in parts]
    assert sum(p.without_replacement for p in probs) == 1
    assert sum(p.with_replacement for p in probs) == 1


def test_invalid_partitions():
    for hand, counts in ((3, (1, 1, 0, 0)), (2, (3, -1, 0, 0)), (0, ())):
        with pytest.raises(InvalidPartition):
            cards.cards_partition_pmf(hand, counts)


GAME_ROUNDS = 100_000


@pytest.fixture(scope="module")
def games():
    return {
        s: cards.cards_game_simulation(SupportPair(*s), GAME_ROUNDS, seed=7)
        for s in ((96, 132), (0, 36), (1, 6), (1, 7))
    }


def test_game_shapes_and_determinism(games):
    g = games[(1, 7)]
    assert g.variant == "Orthogonal"
    assert g.scatter.shape == (GAME_ROUNDS, 4)
    assert set(g.accuracy) == {"copy", "anticopy", "coin", "class"}
    again = cards.cards_game_simulation(SupportPair(1, 7), GAME_ROUNDS, seed=7, threads=3)
    assert again.accuracy == g.accuracy
    assert np.array_equal(again.scatter, g.scatter)
    # K counts and point totals are consistent: points lie between K and 13 K
    k, mf = g.scatter[:, 0], g.scatter[:, 2]
    assert np.all((k <= mf) & (mf <= 13 * k))


def test_coin_strategy_is_fair(games):
    for g in games.values():
        assert abs(g.accuracy["coin"] - 0.5) < 4 * g.std_error["coin"]


def test_class_strategy_matches_variant(games):
    assert games[(0, 36)].accuracy["class"] == games[(0, 36)].accuracy["copy"]
    assert games[(1, 6)].accuracy["class"] == games[(1, 6)].accuracy["anticopy"]
    assert games[(96, 132)].accuracy["class"] == games[(96, 132)].accuracy["coin"]


def test_positive_die_copy_beats_chance(games):
    g = games[(0, 36)]
    assert g.accuracy["copy"] - 0.5 > 10 * g.std_error["copy"]


def test_orthogonal_die_copy_near_half(games):
    g = games[(96, 132)]
    assert abs(g.accuracy["copy"] - 0.5) < 3 * g.std_error["copy"]


def test_negative_die_anticopy_beats_chance(games):
    g = games[(1, 6)]
    assert g.accuracy["anticopy"] > 0.5


@pytest.mark.parametrize("support, strategy", [((96, 96), "anticopy"), ((96, 168), "copy")])
def test_correlated_dice_favour_class_strategy(support, strategy):
    g = cards.cards_game_simulation(SupportPair(*support), 20_000, seed=3)
    assert g.accuracy["class"] == g.accuracy[strategy]
    assert g.accuracy[strategy] - 0.5 > 10 * g.std_error[strategy]
