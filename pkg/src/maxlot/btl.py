"""Tabular Bradley-Terry reward fitting and the softmax policy built on it.

One scalar reward per alternative, fitted by maximum likelihood on pairwise
win counts.  The fitted ordering coincides with the Borda ordering, which is
what makes this the reward-model surrogate to compare against maximal
lotteries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .prefs import AlternativeSet, Lottery, PairwiseCounts
from .voting import borda_scores

REWARD_CAP = 30.0
_GAUGE_TOL = 1e-9


@dataclass(frozen=True)
class RewardVector:
    """Per-alternative scalar rewards, gauge-fixed to mean zero."""

    alternatives: AlternativeSet
    rewards: tuple[float, ...]

    def __post_init__(self):
        if len(self.rewards) != len(self.alternatives):
            raise ValueError("reward length must match the alternative set")
        if any(not math.isfinite(r) for r in self.rewards):
            raise ValueError("rewards must be finite")
        if abs(sum(self.rewards)) > _GAUGE_TOL * max(1.0, max(map(abs, self.rewards))):
            raise ValueError("rewards must be centered to mean zero")

    @classmethod
    def centered(cls, alternatives: AlternativeSet, values: Sequence[float]) -> RewardVector:
        arr = np.asarray(values, dtype=float)
        if not np.isfinite(arr).all():
            raise ValueError("rewards must be finite")
        return cls(alternatives, tuple(arr - arr.mean()))

    def as_array(self) -> np.ndarray:
        return np.array(self.rewards, dtype=float)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.alternatives.labels, self.rewards))


@dataclass(frozen=True)
class FitDiagnostics:
    final_gradient_norm: float
    iterations_used: int
    converged: bool
    loss: float
    reward_path: Optional[tuple[tuple[float, ...], ...]] = None


def _loss_arrays(counts: PairwiseCounts) -> tuple[np.ndarray, np.ndarray]:
    """(win counts, per-pair totals) as float arrays with zero diagonals."""
    n = counts.as_float_n()
    totals = n + n.T
    return n, totals


def _loss(rewards: np.ndarray, wins: np.ndarray) -> float:
    diff = rewards[:, None] - rewards[None, :]
    # -log(sigmoid(d)) = log(1 + exp(-d)), evaluated stably.
    return float((wins * np.logaddexp(0.0, -diff)).sum())


def _gradient(rewards: np.ndarray, wins: np.ndarray, totals: np.ndarray) -> np.ndarray:
    diff = rewards[:, None] - rewards[None, :]
    sig = 1.0 / (1.0 + np.exp(-diff))
    return ((totals * sig) - wins).sum(axis=1)


def _finite_mle_exists(wins: np.ndarray) -> bool:
    """Ford's condition: the positive-win digraph must be strongly connected.

    Otherwise some group of alternatives is never beaten from outside and
    its rewards run away to infinity.
    """
    m = wins.shape[0]

    def reaches_all(adjacency: np.ndarray) -> bool:
        seen = {0}
        frontier = [0]
        while frontier:
            node = frontier.pop()
            for other in range(m):
                if other not in seen and adjacency[node, other] > 0:
                    seen.add(other)
                    frontier.append(other)
        return len(seen) == m

    return reaches_all(wins) and reaches_all(wins.T)


def btl_loss(rewards: RewardVector, counts: PairwiseCounts) -> float:
    """Negative log-likelihood of the win counts under logistic rewards."""
    wins, _ = _loss_arrays(counts)
    return _loss(rewards.as_array(), wins)


def btl_gradient(rewards: RewardVector, counts: PairwiseCounts) -> np.ndarray:
    """Gradient of :func:`btl_loss` with respect to each reward.

    Entry a is ``sum_b n_ab * (sigmoid(r_a - r_b) - p_hat(a, b))`` where
    ``n_ab`` counts comparisons of the pair and ``p_hat`` is a's observed
    win rate; unobserved pairs contribute nothing.
    """
    wins, totals = _loss_arrays(counts)
    return _gradient(rewards.as_array(), wins, totals)


def fit_btl(
    counts: PairwiseCounts,
    learning_rate: float = 1.0,
    max_iterations: int = 20_000,
    tolerance: float = 1e-8,
    reward_cap: float = REWARD_CAP,
    record_path: bool = False,
) -> tuple[RewardVector, FitDiagnostics]:
    """Fit rewards by projected gradient descent with backtracking.

    The loss is convex, so plain descent suffices; the step grows after
    clean descent steps and backtracks otherwise.  Pairs won unanimously
    make the unconstrained MLE diverge, so iterates are clamped to
    ``[-reward_cap, reward_cap]`` and such fits report ``converged=False``
    instead of failing.  The result is shifted to mean zero.
    """
    wins, totals = _loss_arrays(counts)
    if wins.sum() == 0:
        raise ValueError("counts contain no strict comparisons to fit")
    m = len(counts.alternatives)
    rewards = np.zeros(m)
    loss = _loss(rewards, wins)
    step = learning_rate
    # Steps at or below 1/L are safe without a descent check: the gradient's
    # Lipschitz constant is bounded by half the largest per-alternative
    # comparison count, and near the optimum genuine descent sinks below
    # float resolution of the loss.
    safe_step = 1.0 / max(float(totals.sum(axis=1).max()) / 2.0, 1e-12)
    path: list[tuple[float, ...]] = []
    gradient = _gradient(rewards, wins, totals)
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        if record_path:
            path.append(tuple(rewards - rewards.mean()))
        projected = _projected_gradient(rewards, gradient, reward_cap)
        if float(np.abs(projected).max()) <= tolerance:
            iterations -= 1
            break
        while True:
            candidate = np.clip(rewards - step * gradient, -reward_cap, reward_cap)
            candidate_loss = _loss(candidate, wins)
            # Armijo condition on the actually-taken (projected) step.
            decrease = gradient @ (rewards - candidate)
            if candidate_loss <= loss - 1e-4 * decrease or step <= safe_step:
                break
            step *= 0.5
        if np.array_equal(candidate, rewards):
            break
        rewards, loss = candidate, candidate_loss
        gradient = _gradient(rewards, wins, totals)
        step = min(step * 2.0, 1e6)
    final_norm = float(np.abs(gradient).max())
    capped = bool(np.any(np.abs(rewards) >= reward_cap))
    # A stationary point only counts as the MLE when one exists: unanimous
    # directions underflow the gradient long before the cap is reached, so
    # they are detected structurally rather than numerically.
    converged = final_norm <= tolerance and not capped and _finite_mle_exists(wins)
    fitted = RewardVector.centered(counts.alternatives, rewards)
    diagnostics = FitDiagnostics(
        final_gradient_norm=final_norm,
        iterations_used=iterations,
        converged=converged,
        loss=loss,
        reward_path=tuple(path) if record_path else None,
    )
    return fitted, diagnostics


def _projected_gradient(
    rewards: np.ndarray, gradient: np.ndarray, reward_cap: float
) -> np.ndarray:
    """Zero out gradient components blocked by an active reward cap."""
    projected = gradient.copy()
    projected[(rewards >= reward_cap) & (gradient < 0)] = 0.0
    projected[(rewards <= -reward_cap) & (gradient > 0)] = 0.0
    return projected


def check_borda_equivalence(
    rewards: RewardVector, counts: PairwiseCounts, tie_tolerance: float = 1e-6
) -> bool:
    """Do fitted rewards order alternatives exactly like their Borda scores?

    Pairs with tied Borda scores must have rewards within ``tie_tolerance``;
    strictly ordered pairs must have rewards ordered the same way.
    """
    scores = borda_scores(counts, normalized=True).scores
    r = rewards.rewards
    m = len(r)
    for a in range(m):
        for b in range(a + 1, m):
            if scores[a] == scores[b]:
                if abs(r[a] - r[b]) > tie_tolerance:
                    return False
            elif (scores[a] > scores[b]) != (r[a] > r[b]):
                return False
    return True


def softmax_policy(rewards: RewardVector, beta: float) -> Lottery:
    """Policy proportional to exp(beta * reward).

    ``beta = 0`` is uniform; ``beta = inf`` is the analytic limit, a point
    mass on the best reward (uniform across exact ties).
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    values = rewards.as_array()
    m = len(values)
    if math.isinf(beta):
        top = values.max()
        tie_band = 1e-12 * max(1.0, abs(top))
        winners = values >= top - tie_band
        probs = winners / winners.sum()
        return Lottery(rewards.alternatives, probs)
    scaled = beta * values
    scaled -= scaled.max()
    weights = np.exp(scaled)
    return Lottery(rewards.alternatives, weights / weights.sum())
