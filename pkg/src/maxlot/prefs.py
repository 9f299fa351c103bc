"""Alternative sets, ranked preference profiles, and pairwise comparison matrices.

All counting is done in exact rational arithmetic (``fractions.Fraction``) so
that ties, margins, and the count identities hold exactly.  Floating point
enters only when a matrix is exported for a numeric solver or a lottery is
built.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

WeightLike = Union[int, float, str, Fraction]

# Matrices are stored as immutable tuples of tuples of Fractions, indexed by
# the alternative order fixed in the AlternativeSet.
Matrix = tuple


def coerce_weight(value: WeightLike) -> Fraction:
    """Convert a user-supplied weight to an exact rational.

    Floats are interpreted through their decimal string (``0.33`` means
    33/100, not the nearest binary double), strings may be decimals or
    ``"p/q"`` fractions.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("weight must be a number, not bool")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"weight must be finite, got {value}")
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret weight of type {type(value).__name__}")


def _freeze(rows: Iterable[Iterable[Fraction]]) -> Matrix:
    return tuple(tuple(row) for row in rows)


def _zeros(m: int) -> list[list[Fraction]]:
    return [[Fraction(0)] * m for _ in range(m)]


def _to_float_array(matrix: Matrix) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in matrix], dtype=float)


@dataclass(frozen=True)
class AlternativeSet:
    """Finite ordered set of alternatives; the index order is canonical."""

    labels: tuple[str, ...]

    def __init__(self, labels: Sequence[str]):
        object.__setattr__(self, "labels", tuple(labels))
        if len(self.labels) < 2:
            raise ValueError("need at least two alternatives")
        if any(not isinstance(x, str) or not x for x in self.labels):
            raise ValueError("labels must be non-empty strings")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be unique")

    @cached_property
    def _index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown alternative {label!r}") from None

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self._index


@dataclass(frozen=True)
class PreferenceProfile:
    """Weighted groups of voters, each with a strict total order.

    ``groups`` holds ``(ranking, weight)`` pairs where ``ranking`` is a
    permutation of alternative indices, best first.  Weights are exact
    rationals and the total weight is positive.
    """

    alternatives: AlternativeSet
    groups: tuple[tuple[tuple[int, ...], Fraction], ...]

    def __post_init__(self):
        m = len(self.alternatives)
        expected = set(range(m))
        for ranking, weight in self.groups:
            if set(ranking) != expected or len(ranking) != m:
                raise ValueError(f"ranking {ranking} is not a permutation of 0..{m - 1}")
            if weight < 0:
                raise ValueError("group weights must be nonnegative")
        if self.total_weight <= 0:
            raise ValueError("total weight must be positive")

    @classmethod
    def from_rankings(
        cls,
        alternatives: AlternativeSet | Sequence[str],
        rankings: Sequence[tuple[Sequence[str], WeightLike]],
    ) -> PreferenceProfile:
        """Build a profile from (label ranking, weight) pairs."""
        if not isinstance(alternatives, AlternativeSet):
            alternatives = AlternativeSet(alternatives)
        groups = tuple(
            (tuple(alternatives.index(label) for label in ranking), coerce_weight(weight))
            for ranking, weight in rankings
        )
        return cls(alternatives, groups)

    @property
    def total_weight(self) -> Fraction:
        return sum((w for _, w in self.groups), Fraction(0))

    def first_place_weights(self) -> tuple[Fraction, ...]:
        """Per alternative, total weight of groups ranking it first."""
        tops = [Fraction(0)] * len(self.alternatives)
        for ranking, weight in self.groups:
            tops[ranking[0]] += weight
        return tuple(tops)

    def to_json_dict(self) -> dict:
        return {
            "alternatives": list(self.alternatives.labels),
            "groups": [
                {
                    "ranking": [self.alternatives.labels[i] for i in ranking],
                    "weight": _weight_to_json(weight),
                }
                for ranking, weight in self.groups
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> PreferenceProfile:
        try:
            labels = data["alternatives"]
            groups = data["groups"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"profile JSON missing field: {exc}") from exc
        return cls.from_rankings(
            AlternativeSet(labels),
            [(g["ranking"], g["weight"]) for g in groups],
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> PreferenceProfile:
        return cls.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _weight_to_json(weight: Fraction) -> int | str:
    if weight.denominator == 1:
        return int(weight)
    return f"{weight.numerator}/{weight.denominator}"


@dataclass(frozen=True)
class PairwiseCounts:
    """Strict-preference counts N and indifference counts E.

    ``n_matrix[a][b]`` is the weight of voters preferring a to b.  For counts
    built from a full profile every off-diagonal pair satisfies
    ``N(a,b) + N(b,a) + E(a,b) = total_weight`` exactly.  Counts built from a
    sampled comparison dataset instead carry ``pair_totals``: the number of
    records observed per pair, because preference scores normalize per pair.
    """

    alternatives: AlternativeSet
    n_matrix: Matrix
    e_matrix: Matrix
    total_weight: Fraction
    pair_totals: Matrix | None = None

    def __post_init__(self):
        m = len(self.alternatives)
        n, e = self.n_matrix, self.e_matrix
        if len(n) != m or len(e) != m or any(len(r) != m for r in n + e):
            raise ValueError("count matrices must be m x m")
        for a in range(m):
            if n[a][a] != 0 or e[a][a] != 0:
                raise ValueError("count matrix diagonals must be zero")
            for b in range(m):
                if n[a][b] < 0 or e[a][b] < 0:
                    raise ValueError("counts must be nonnegative")
                if e[a][b] != e[b][a]:
                    raise ValueError("indifference counts must be symmetric")
        if self.total_weight <= 0:
            raise ValueError("total weight must be positive")
        if self.pair_totals is None:
            for a in range(m):
                for b in range(m):
                    if a != b and n[a][b] + n[b][a] + e[a][b] != self.total_weight:
                        raise ValueError(
                            f"pair ({a},{b}) counts do not sum to the total weight"
                        )
        else:
            t = self.pair_totals
            for a in range(m):
                for b in range(m):
                    if a == b:
                        if t[a][b] != 0:
                            raise ValueError("pair totals diagonal must be zero")
                    elif n[a][b] + n[b][a] + e[a][b] != t[a][b]:
                        raise ValueError(f"pair ({a},{b}) counts do not match pair total")

    def pair_total(self, a: int, b: int) -> Fraction:
        if self.pair_totals is None:
            return self.total_weight
        return self.pair_totals[a][b]

    def as_float_n(self) -> np.ndarray:
        return _to_float_array(self.n_matrix)

    def as_float_e(self) -> np.ndarray:
        return _to_float_array(self.e_matrix)


@dataclass(frozen=True)
class MarginMatrix:
    """Antisymmetric net-margin matrix M = N - N^T; payoff of the margin game."""

    alternatives: AlternativeSet
    m_matrix: Matrix
    total_weight: Fraction

    def __post_init__(self):
        m = len(self.alternatives)
        mat = self.m_matrix
        if len(mat) != m or any(len(r) != m for r in mat):
            raise ValueError("margin matrix must be m x m")
        for a in range(m):
            if mat[a][a] != 0:
                raise ValueError("margin diagonal must be zero")
            for b in range(m):
                if mat[a][b] != -mat[b][a]:
                    raise ValueError("margin matrix must be antisymmetric")
                if abs(mat[a][b]) > self.total_weight:
                    raise ValueError("margins cannot exceed the total weight")

    def normalized(self) -> MarginMatrix:
        """Proportional margins M / n, with unit total weight."""
        n = self.total_weight
        return MarginMatrix(
            self.alternatives,
            _freeze([x / n for x in row] for row in self.m_matrix),
            Fraction(1),
        )

    def as_array(self) -> np.ndarray:
        return _to_float_array(self.m_matrix)


@dataclass(frozen=True)
class SelectionMatrix:
    """Probability that a random individual selects a over b when shown {a, b}.

    Off-diagonal pairs sum to one; the diagonal is fixed at 1/2 (selecting
    between identical options is a coin flip).  Entries are exact rationals
    when built from counts and floats when supplied directly.
    """

    alternatives: AlternativeSet
    p_matrix: tuple

    _PAIR_TOL = 1e-12

    def __post_init__(self):
        m = len(self.alternatives)
        p = self.p_matrix
        if len(p) != m or any(len(r) != m for r in p):
            raise ValueError("selection matrix must be m x m")
        for a in range(m):
            if p[a][a] != Fraction(1, 2) and float(p[a][a]) != 0.5:
                raise ValueError("selection diagonal must be 1/2")
            for b in range(m):
                x, y = p[a][b], p[b][a]
                if isinstance(x, Fraction) and isinstance(y, Fraction):
                    if x + y != 1:
                        raise ValueError(f"selection pair ({a},{b}) must sum to 1 exactly")
                elif abs(float(x) + float(y) - 1.0) > self._PAIR_TOL:
                    raise ValueError(f"selection pair ({a},{b}) must sum to 1")
                if not 0 <= float(x) <= 1:
                    raise ValueError("selection probabilities must lie in [0, 1]")

    @classmethod
    def from_probabilities(
        cls, alternatives: AlternativeSet, matrix: Sequence[Sequence[float]]
    ) -> SelectionMatrix:
        """Build from raw win probabilities; the diagonal is forced to 1/2."""
        m = len(alternatives)
        rows = [list(map(float, row)) for row in matrix]
        for a in range(m):
            rows[a][a] = 0.5
        return cls(alternatives, _freeze(rows))

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.p_matrix], dtype=float)

    def margin_equivalent(self) -> MarginMatrix:
        """The antisymmetric game P - P^T, the proportional margin matrix."""
        m = len(self.alternatives)
        p = self.p_matrix
        rows = _zeros(m)
        for a in range(m):
            for b in range(m):
                x = p[a][b] if isinstance(p[a][b], Fraction) else Fraction(float(p[a][b]))
                y = p[b][a] if isinstance(p[b][a], Fraction) else Fraction(float(p[b][a]))
                rows[a][b] = x - y
        return MarginMatrix(self.alternatives, _freeze(rows), Fraction(1))


@dataclass(frozen=True)
class Lottery:
    """Probability distribution over an alternative set.

    Tiny negative entries (down to -1e-12) are clamped to zero and the vector
    is renormalized provided its sum is within 1e-9 of one.
    """

    alternatives: AlternativeSet
    probabilities: tuple[float, ...]

    _NEG_TOL = 1e-12
    _SUM_TOL = 1e-9

    def __init__(self, alternatives: AlternativeSet, probabilities: Sequence[float]):
        probs = [float(p) for p in probabilities]
        if len(probs) != len(alternatives):
            raise ValueError("lottery length must match the alternative set")
        if any(not math.isfinite(p) for p in probs):
            raise ValueError("lottery probabilities must be finite")
        if min(probs) < -self._NEG_TOL:
            raise ValueError(f"negative probability {min(probs)}")
        probs = [max(p, 0.0) for p in probs]
        total = sum(probs)
        if abs(total - 1.0) > self._SUM_TOL:
            raise ValueError(f"lottery sums to {total}, not 1")
        object.__setattr__(self, "alternatives", alternatives)
        object.__setattr__(self, "probabilities", tuple(p / total for p in probs))

    @classmethod
    def uniform(cls, alternatives: AlternativeSet) -> Lottery:
        m = len(alternatives)
        return cls(alternatives, [1.0 / m] * m)

    @classmethod
    def point_mass(cls, alternatives: AlternativeSet, index: int) -> Lottery:
        probs = [0.0] * len(alternatives)
        probs[index] = 1.0
        return cls(alternatives, probs)

    def prob(self, label: str) -> float:
        return self.probabilities[self.alternatives.index(label)]

    def argmax(self) -> int:
        return max(range(len(self.probabilities)), key=self.probabilities.__getitem__)

    def support(self, threshold: float = 1e-7) -> tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.probabilities) if p > threshold)

    def as_array(self) -> np.ndarray:
        return np.array(self.probabilities, dtype=float)

    def as_dict(self) -> dict[str, float]:
        """Label-to-probability mapping, rounded to 12 significant digits."""
        return {
            label: float(f"{p:.12g}")
            for label, p in zip(self.alternatives.labels, self.probabilities)
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)

    def tv_distance(self, other: Lottery) -> float:
        """Total variation distance, half the L1 gap."""
        if other.alternatives.labels != self.alternatives.labels:
            raise ValueError("lotteries are over different alternative sets")
        return 0.5 * sum(abs(p - q) for p, q in zip(self.probabilities, other.probabilities))


def pairwise_counts(profile: PreferenceProfile) -> PairwiseCounts:
    """Tally N(a, b): the weight of voters ranking a above b.

    Strict rankings produce no indifference mass, so E is identically zero.
    """
    m = len(profile.alternatives)
    n = _zeros(m)
    for ranking, weight in profile.groups:
        position = {alt: pos for pos, alt in enumerate(ranking)}
        for a in range(m):
            for b in range(m):
                if a != b and position[a] < position[b]:
                    n[a][b] += weight
    e = _zeros(m)
    return PairwiseCounts(
        profile.alternatives, _freeze(n), _freeze(e), profile.total_weight
    )


def margin_matrix(counts: PairwiseCounts) -> MarginMatrix:
    """Net margins M = N - N^T; exact and antisymmetric by construction."""
    m = len(counts.alternatives)
    n = counts.n_matrix
    rows = _zeros(m)
    for a in range(m):
        for b in range(m):
            rows[a][b] = n[a][b] - n[b][a]
    total = counts.total_weight
    if counts.pair_totals is not None:
        # Per-pair counts have no single scale; bound margins by the largest pair.
        total = max(
            (counts.pair_totals[a][b] for a in range(m) for b in range(m)),
            default=Fraction(1),
        )
        total = max(total, Fraction(1))
    return MarginMatrix(counts.alternatives, _freeze(rows), total)


def selection_matrix(counts: PairwiseCounts) -> SelectionMatrix:
    """Selection probabilities: strict wins plus half the indifference mass.

    Counts with per-pair totals normalize each pair by its own record count.
    Pairs with no records fall back to the dataset edge rules: an alternative
    that appears nowhere in the data loses to one that does; otherwise 1/2.
    """
    m = len(counts.alternatives)
    n, e = counts.n_matrix, counts.e_matrix
    rows: list[list] = [[Fraction(0)] * m for _ in range(m)]
    if counts.pair_totals is not None:
        totals = counts.pair_totals
        appears = [
            any(totals[a][b] > 0 for b in range(m)) for a in range(m)
        ]
    for a in range(m):
        for b in range(m):
            if a == b:
                rows[a][b] = Fraction(1, 2)
                continue
            total = counts.pair_total(a, b)
            if total > 0:
                rows[a][b] = (n[a][b] + e[a][b] / 2) / total
            elif appears[a] and not appears[b]:
                rows[a][b] = Fraction(1)
            elif appears[b] and not appears[a]:
                rows[a][b] = Fraction(0)
            else:
                rows[a][b] = Fraction(1, 2)
    return SelectionMatrix(counts.alternatives, _freeze(rows))
