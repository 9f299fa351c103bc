"""Synthetic pairwise-comparison datasets and their empirical summaries.

A dataset row mimics an annotation triplet: a prompt id plus the preferred
and rejected alternative.  Sampling is reproducible: record ``i`` of a run
seeded with ``s`` is drawn from its own Philox stream keyed by ``(s, i)``,
so records can be generated independently and in parallel.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .prefs import (
    AlternativeSet,
    PairwiseCounts,
    PreferenceProfile,
    _freeze,
    _zeros,
)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class ComparisonRecord:
    prompt_id: str
    preferred: int
    rejected: int


@dataclass(frozen=True)
class ComparisonDataset:
    """Sequence of preferred/rejected comparisons over a fixed alternative set."""

    alternatives: AlternativeSet
    records: tuple[ComparisonRecord, ...]
    seed: int = 0
    population: Optional[PreferenceProfile] = None

    def __post_init__(self):
        m = len(self.alternatives)
        for r in self.records:
            if r.preferred == r.rejected:
                raise ValueError("a record cannot prefer an alternative to itself")
            if not (0 <= r.preferred < m and 0 <= r.rejected < m):
                raise ValueError(f"record indices out of range: {r}")

    def __len__(self) -> int:
        return len(self.records)

    def to_csv(self, path: str | Path) -> None:
        """Write ``prompt_id,preferred,rejected`` rows with labels, LF endings."""
        labels = self.alternatives.labels
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["prompt_id", "preferred", "rejected"])
            for r in self.records:
                writer.writerow([r.prompt_id, labels[r.preferred], labels[r.rejected]])

    @classmethod
    def from_csv(
        cls, path: str | Path, alternatives: AlternativeSet, seed: int = 0
    ) -> ComparisonDataset:
        records = []
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["prompt_id", "preferred", "rejected"]:
                raise ValueError(f"unexpected dataset header: {header}")
            for row in reader:
                if len(row) != 3:
                    raise ValueError(f"malformed dataset row: {row}")
                prompt_id, preferred, rejected = row
                records.append(
                    ComparisonRecord(
                        prompt_id,
                        alternatives.index(preferred),
                        alternatives.index(rejected),
                    )
                )
        return cls(alternatives, tuple(records), seed=seed)


def _record_rng(seed: int, index: int) -> np.random.Generator:
    """Philox stream for one record: key = (seed, record index)."""
    key = np.array([seed & _MASK64, index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_dataset(
    profile: PreferenceProfile,
    size: int,
    seed: int,
    prompt_id: str = "prompt-0",
) -> ComparisonDataset:
    """Draw comparison records from a population of ranked voters.

    Each record: draw an ordered pair of distinct alternatives uniformly
    (the random draw order doubles as presentation-order randomization),
    draw a voter group proportionally to weight, and record that group's
    higher-ranked alternative as preferred.
    """
    if size < 1:
        raise ValueError("dataset size must be at least 1")
    m = len(profile.alternatives)
    total = profile.total_weight
    cumulative = np.cumsum([float(w / total) for _, w in profile.groups])
    rankings = [ranking for ranking, _ in profile.groups]

    records = []
    for i in range(size):
        rng = _record_rng(seed, i)
        first = int(rng.integers(m))
        second = int(rng.integers(m - 1))
        if second >= first:
            second += 1
        group = int(np.searchsorted(cumulative, rng.random(), side="right"))
        group = min(group, len(rankings) - 1)
        position = {alt: pos for pos, alt in enumerate(rankings[group])}
        if position[first] < position[second]:
            preferred, rejected = first, second
        else:
            preferred, rejected = second, first
        records.append(ComparisonRecord(prompt_id, preferred, rejected))
    return ComparisonDataset(
        profile.alternatives, tuple(records), seed=seed, population=profile
    )


def empirical_preference(dataset: ComparisonDataset, a: int, b: int) -> float:
    """Fraction of {a, b} records that prefer a.

    Edge cases are defined returns: comparing an alternative to itself gives
    0.5; if the pair was never shown, an alternative that appears somewhere
    in the data beats one that never does (1.0), and otherwise the score
    is 0.5.
    """
    m = len(dataset.alternatives)
    if not (0 <= a < m and 0 <= b < m):
        raise ValueError("alternative index out of range")
    if a == b:
        return 0.5
    wins = 0
    pair_count = 0
    seen_a = seen_b = False
    for r in dataset.records:
        if r.preferred in (a, b) or r.rejected in (a, b):
            seen_a = seen_a or a in (r.preferred, r.rejected)
            seen_b = seen_b or b in (r.preferred, r.rejected)
        if {r.preferred, r.rejected} == {a, b}:
            pair_count += 1
            if r.preferred == a:
                wins += 1
    if pair_count > 0:
        return wins / pair_count
    if seen_a and not seen_b:
        return 1.0
    if seen_b and not seen_a:
        return 0.0
    return 0.5


def empirical_counts(dataset: ComparisonDataset) -> PairwiseCounts:
    """Per-pair win counts from a dataset.

    The result carries per-pair record totals so that downstream selection
    probabilities normalize within each pair, matching how preference scores
    are computed from comparison data.
    """
    if len(dataset) == 0:
        raise ValueError("cannot count an empty dataset")
    m = len(dataset.alternatives)
    n = _zeros(m)
    totals = _zeros(m)
    for r in dataset.records:
        n[r.preferred][r.rejected] += 1
        totals[r.preferred][r.rejected] += 1
        totals[r.rejected][r.preferred] += 1
    return PairwiseCounts(
        dataset.alternatives,
        _freeze(n),
        _freeze(_zeros(m)),
        Fraction(len(dataset)),
        pair_totals=_freeze(totals),
    )
