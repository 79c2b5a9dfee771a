"""Card games on a 52-card deck with a die-driven number of draws.

Atoms are indexed ``0..51``; suit is ``index // 13`` (spades, hearts,
diamonds, clubs) and rank is ``index % 13`` with rank 0 the two.  The point
value ``h`` runs from 1 for a two up to 13 for an ace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .. import stc
from ..dice import DiceVariant, SupportPair, classify
from ..errors import InvalidPartition
from ..law import FunctionalStats, mixed_binomial_stats, moment_summary

SUITS = ("spades", "hearts", "diamonds", "clubs")
DECK_SIZE = 52
SUIT_SIZE = 13


@dataclass(frozen=True)
class DeckModel:
    n_suits: int = 4
    n_ranks: int = 13

    @property
    def size(self) -> int:
        return self.n_suits * self.n_ranks

    def weight(self, x: int) -> Fraction:
        return Fraction(1, self.size)

    def points(self, x):
        return np.asarray(x) % self.n_ranks + 1

    def suit(self, x):
        return np.asarray(x) // self.n_ranks

    def nu_h(self) -> Fraction:
        return sum(Fraction(int(self.points(x)), self.size) for x in range(self.size))

    def nu_h2(self) -> Fraction:
        return sum(Fraction(int(self.points(x)) ** 2, self.size) for x in range(self.size))

    def suit_mass(self, s: int) -> Fraction:
        return Fraction(sum(1 for x in range(self.size) if self.suit(x) == s), self.size)


DECK = DeckModel()


def suit_index(name) -> int:
    if isinstance(name, (int, np.integer)):
        return int(name)
    return SUITS.index(name)


def suit_point_functional(suit, deck: DeckModel = DECK) -> stc.Functional:
    """``f_A(x, y) = 1_A(x) y`` with the mark ``y = h(x)``."""
    s = suit_index(suit)
    return stc.Functional(f"points[{SUITS[s]}]", lambda pts, marks: marks * (deck.suit(pts) == s))


def suit_count_functional(suit, deck: DeckModel = DECK) -> stc.Functional:
    s = suit_index(suit)
    return stc.Functional(f"count[{SUITS[s]}]", lambda pts, marks: (deck.suit(pts) == s).astype(float))


def deck_model(support: SupportPair, deck: DeckModel = DECK) -> stc.MeasureModel:
    return stc.MeasureModel(
        count_law=support,
        point_sampler=stc.atomic(deck.size),
        mark_kernel=stc.deterministic_marks(deck.points),
        name=f"deck:{support.m},{support.n}",
    )


@dataclass(frozen=True)
class CardsTable:
    support: SupportPair
    c: Fraction
    delta_sq: Fraction
    mean: Fraction
    variance: Fraction
    covariance: Fraction

    @property
    def correlation(self) -> float:
        return float(self.covariance / self.variance)


def suit_functional_stats(deck: DeckModel = DECK) -> FunctionalStats:
    """``nu f_A``, ``nu f_B``, ``nu(f_A f_B)``, ``nu f_A**2`` for two distinct suits."""
    q = deck.suit_mass(0)
    return FunctionalStats(nu_f=q * deck.nu_h(), nu_g=q * deck.nu_h(), nu_fg=Fraction(0), nu_f2=q * deck.nu_h2())


def cards_covariance_table(support: SupportPair, deck: DeckModel = DECK) -> CardsTable:
    """Per-suit mean and variance of the hand's points, and the cross-suit covariance."""
    if not isinstance(support, SupportPair):
        support = SupportPair(*support)
    ms = moment_summary(support)
    st = mixed_binomial_stats(ms, suit_functional_stats(deck))
    return CardsTable(support, ms.c, ms.delta_sq, st.mean, st.variance, st.covariance)


@dataclass(frozen=True)
class PartitionProbs:
    without_replacement: Fraction
    with_replacement: Fraction


def cards_partition_pmf(hand: int, counts: Sequence[int], suit_size: int = SUIT_SIZE) -> PartitionProbs:
    """Probability that a ``hand``-card draw splits across suits as ``counts``.

    Without replacement this is multivariate hypergeometric; with replacement,
    multinomial with equal suit weights.
    """
    counts = [int(c) for c in counts]
    if any(c < 0 for c in counts) or sum(counts) != hand or not counts:
        raise InvalidPartition(f"counts {counts} do not partition a hand of {hand}")
    n_suits = len(counts)
    deck = suit_size * n_suits
    if hand > deck:
        raise InvalidPartition("hand larger than the deck")
    hyper = Fraction(math.prod(math.comb(suit_size, c) for c in counts), math.comb(deck, hand))
    multi = Fraction(math.factorial(hand), math.prod(math.factorial(c) for c in counts)) / n_suits**hand
    return PartitionProbs(hyper, multi)


def partitions_of(hand: int, parts: int = 4):
    """All ordered splits of ``hand`` into ``parts`` non-negative counts."""
    if parts == 1:
        yield (hand,)
        return
    for first in range(hand + 1):
        for rest in partitions_of(hand - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class GameResult:
    support: SupportPair
    variant: str
    n_rounds: int
    seed: int
    accuracy: dict  # strategy -> fraction of correct guesses
    std_error: dict
    hit_rate: tuple  # per suit, fraction of rounds with points >= (7/4) c
    baseline: float  # copy accuracy if the four indicators were independent
    scatter: np.ndarray  # rows (K_A, K_B, Mf_A, Mf_B) for A = spades, B = diamonds

    SCATTER_COLUMNS = ("K_spades", "K_diamonds", "Mf_spades", "Mf_diamonds")


def cards_game_simulation(
    support: SupportPair,
    n_rounds: int,
    seed: int,
    threads: int = 1,
    deck: DeckModel = DECK,
) -> GameResult:
    """Play the suit-guessing game for ``n_rounds``.

    Each player sees only their own suit's points and guesses, for each other
    player, whether that player's points reach the common mean ``(7/4) c``.
    Strategies: ``copy`` (guess the same side as one's own), ``anticopy``,
    ``coin`` (fair coin) and ``class`` (copy / anticopy / coin according to
    whether the die is positive / negative / orthogonal).  Ties count as >=.
    """
    if not isinstance(support, SupportPair):
        support = SupportPair(*support)
    if n_rounds < 1:
        raise ValueError("n_rounds must be >= 1")
    model = deck_model(support, deck)
    fs = [suit_point_functional(s, deck) for s in range(4)] + [suit_count_functional(s, deck) for s in range(4)]
    vals = stc.simulate(model, fs, n_rounds, seed, threads)
    points = vals[:, :4]
    threshold = float(cards_covariance_table(support, deck).mean)
    above = points >= threshold

    coin_rng = stc.replicate_rng(seed, (1 << 60) + 1)
    coin = coin_rng.random((n_rounds, 12)) < 0.5
    pairs = [(i, j) for i in range(4) for j in range(4) if i != j]
    mine = np.stack([above[:, i] for i, _ in pairs], axis=1)
    theirs = np.stack([above[:, j] for _, j in pairs], axis=1)

    variant = classify(support).variant
    guesses = {"copy": mine, "anticopy": ~mine, "coin": coin}
    guesses["class"] = {
        DiceVariant.POSITIVE: mine,
        DiceVariant.NEGATIVE: ~mine,
        DiceVariant.ORTHOGONAL: coin,
    }[variant]

    accuracy, se = {}, {}
    for name, g in guesses.items():
        # per-round score keeps the 12 correlated guesses inside one sample
        per_round = (g == theirs).mean(axis=1)
        accuracy[name] = float(per_round.mean())
        se[name] = float(per_round.std(ddof=1) / math.sqrt(n_rounds)) if n_rounds > 1 else 0.0

    hit = above.mean(axis=0)
    baseline = float(np.mean([hit[i] * hit[j] + (1 - hit[i]) * (1 - hit[j]) for i, j in pairs]))
    scatter = np.column_stack([vals[:, 4], vals[:, 6], points[:, 0], points[:, 2]])
    return GameResult(
        support, variant.value, n_rounds, seed, accuracy, se, tuple(float(h) for h in hit), baseline, scatter
    )


def suit_pair_covariance_mc(support: SupportPair, n_replicates: int, seed: int, threads: int = 1):
    """Monte Carlo covariance of spades and diamonds points, with standard error."""
    model = deck_model(support)
    return stc.estimate_functional(
        model,
        suit_point_functional("spades"),
        n_replicates,
        seed,
        statistic="covariance",
        other=suit_point_functional("diamonds"),
        threads=threads,
    )


def all_suit_pairs():
    return list(combinations(range(4), 2))
