"""Deterministic social-choice rules and tournament sets.

Borda scores, majority and Condorcet winners, the Smith set, and the random
dictatorship baseline.  Everything works on exact rational counts; "beats"
always means a strict pairwise majority, so ties dominate nobody.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .prefs import Lottery, PairwiseCounts, PreferenceProfile


@dataclass(frozen=True)
class BordaScores:
    """Per-alternative sums of pairwise wins, raw or divided by the voter count."""

    scores: tuple[Fraction, ...]
    normalized: bool

    def ranking(self) -> tuple[int, ...]:
        """Alternative indices sorted by descending score, index as tiebreak."""
        order = sorted(range(len(self.scores)), key=lambda a: (-self.scores[a], a))
        return tuple(order)

    def argmax_set(self) -> tuple[int, ...]:
        top = max(self.scores)
        return tuple(a for a, s in enumerate(self.scores) if s == top)


def borda_scores(counts: PairwiseCounts, normalized: bool = False) -> BordaScores:
    """Sum each alternative's pairwise wins.

    Raw scores are plain win counts.  Normalized scores divide each pairwise
    term by that pair's total (the global voter count for profile counts),
    counting indifference as half a win, so they are mean win rates.
    """
    m = len(counts.alternatives)
    n, e = counts.n_matrix, counts.e_matrix
    scores = []
    for a in range(m):
        if normalized:
            total = Fraction(0)
            for b in range(m):
                if b == a:
                    continue
                pair_total = counts.pair_total(a, b)
                if pair_total > 0:
                    total += (n[a][b] + e[a][b] / 2) / pair_total
            scores.append(total)
        else:
            scores.append(sum((n[a][b] for b in range(m) if b != a), Fraction(0)))
    return BordaScores(tuple(scores), normalized)


def majority_winner(profile: PreferenceProfile) -> Optional[int]:
    """Alternative ranked first by at least half the voters, if any.

    The threshold is a weak half, so an exactly even split qualifies; if two
    alternatives both sit at exactly half, the lower index wins.  Use
    :func:`majority_candidates` to detect that ambiguity.
    """
    candidates = majority_candidates(profile)
    return candidates[0] if candidates else None


def majority_candidates(profile: PreferenceProfile) -> tuple[int, ...]:
    half = profile.total_weight / 2
    tops = profile.first_place_weights()
    return tuple(a for a, w in enumerate(tops) if w >= half)


def condorcet_winner(counts: PairwiseCounts) -> Optional[int]:
    """The alternative that strictly beats every other head to head, if any."""
    m = len(counts.alternatives)
    n = counts.n_matrix
    for a in range(m):
        if all(n[a][b] > n[b][a] for b in range(m) if b != a):
            return a
    return None


def _beats(counts: PairwiseCounts, a: int, b: int) -> bool:
    return counts.n_matrix[a][b] > counts.n_matrix[b][a]


def smith_set(counts: PairwiseCounts) -> frozenset[int]:
    """Smallest nonempty set whose members all beat every outside alternative.

    Sorts alternatives by number of pairwise wins (every Smith member
    outscores every non-member, so the Smith set is a prefix of this order)
    and returns the first prefix that dominates its complement.
    """
    m = len(counts.alternatives)
    wins = [sum(1 for b in range(m) if b != a and _beats(counts, a, b)) for a in range(m)]
    order = sorted(range(m), key=lambda a: (-wins[a], a))
    for size in range(1, m + 1):
        prefix = order[:size]
        rest = order[size:]
        if all(_beats(counts, a, b) for a in prefix for b in rest):
            return frozenset(prefix)
    return frozenset(range(m))


def random_dictatorship(profile: PreferenceProfile) -> Lottery:
    """Pick a voter at random and play their top choice."""
    total = profile.total_weight
    tops = profile.first_place_weights()
    return Lottery(profile.alternatives, [float(w / total) for w in tops])
