"""Shared test utilities: random profile generation and brute-force oracles."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from maxlot import AlternativeSet, PairwiseCounts, PreferenceProfile, pairwise_counts
from maxlot.prefs import _freeze


def random_profile(
    rng: random.Random,
    max_alternatives: int = 6,
    max_groups: int = 6,
    max_weight: int = 5,
    odd_total: bool = False,
) -> PreferenceProfile:
    m = rng.randint(2, max_alternatives)
    labels = [f"a{i}" for i in range(m)]
    groups = []
    for _ in range(rng.randint(1, max_groups)):
        ranking = labels[:]
        rng.shuffle(ranking)
        groups.append((ranking, rng.randint(1, max_weight)))
    if odd_total:
        total = sum(w for _, w in groups)
        if total % 2 == 0:
            ranking = labels[:]
            rng.shuffle(ranking)
            groups.append((ranking, 1))
    return PreferenceProfile.from_rankings(labels, groups)


def interior_profile(rng: random.Random, max_alternatives: int = 6) -> PreferenceProfile:
    """Random profile in which every pair is won in both directions at least once."""
    while True:
        profile = random_profile(rng, max_alternatives=max_alternatives, max_groups=8)
        counts = pairwise_counts(profile)
        m = len(profile.alternatives)
        n = counts.n_matrix
        if all(n[a][b] > 0 for a in range(m) for b in range(m) if a != b):
            if counts.total_weight <= 25:
                return profile


def reversed_profile(profile: PreferenceProfile) -> PreferenceProfile:
    groups = tuple((tuple(reversed(ranking)), w) for ranking, w in profile.groups)
    return PreferenceProfile(profile.alternatives, groups)


def brute_force_smith(counts: PairwiseCounts) -> frozenset[int]:
    """Smallest dominant set by exhaustive subset search (m <= 7)."""
    m = len(counts.alternatives)
    n = counts.n_matrix

    def beats(a: int, b: int) -> bool:
        return n[a][b] > n[b][a]

    best = frozenset(range(m))
    for size in range(1, m + 1):
        for subset in itertools.combinations(range(m), size):
            inside = set(subset)
            if all(beats(a, b) for a in inside for b in range(m) if b not in inside):
                return frozenset(inside)
    return best


def inject_indifference(counts: PairwiseCounts, rng: random.Random) -> PairwiseCounts:
    """Move random strict-preference weight into the indifference matrix."""
    m = len(counts.alternatives)
    n = [list(row) for row in counts.n_matrix]
    e = [list(row) for row in counts.e_matrix]
    for a in range(m):
        for b in range(a + 1, m):
            shift_ab = Fraction(rng.randint(0, int(n[a][b])))
            shift_ba = Fraction(rng.randint(0, int(n[b][a])))
            n[a][b] -= shift_ab
            n[b][a] -= shift_ba
            e[a][b] += shift_ab + shift_ba
            e[b][a] = e[a][b]
    return PairwiseCounts(
        counts.alternatives, _freeze(n), _freeze(e), counts.total_weight
    )
