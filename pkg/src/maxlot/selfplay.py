"""Self-play preference optimization over a fixed selection matrix.

Each iteration samples a small group of alternatives from the current
policy, scores every sample by its mean selection probability against its
co-samples, and nudges the policy logits toward above-average samples.
The algorithm's answer is the uniform mixture of the per-iteration
policies, which approximates the maximal lottery of the underlying game.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .prefs import Lottery, SelectionMatrix

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class TabularPolicy:
    """Softmax policy over the alternative set, parameterized by logits."""

    logits: tuple[float, ...]

    def lottery_probs(self) -> np.ndarray:
        arr = np.array(self.logits, dtype=float)
        arr -= arr.max()
        weights = np.exp(arr)
        return weights / weights.sum()


@dataclass(frozen=True)
class TracePoint:
    iteration: int
    policy: tuple[float, ...]
    mixture: tuple[float, ...]
    expected_rewards: tuple[float, ...]


@dataclass(frozen=True)
class SelfPlayTrace:
    """Per-iteration log of a self-play run; the mixture at step t averages
    the policies of steps 1..t."""

    seed: int
    points: tuple[TracePoint, ...]


def spo_reward(samples: Sequence[int], preference: SelectionMatrix) -> np.ndarray:
    """Score each sample by its mean win probability against its co-samples.

    Duplicate samples use the diagonal coin-flip convention, so a group of
    identical alternatives scores 1/2 everywhere.
    """
    k = len(samples)
    if k < 2:
        raise ValueError("need at least two samples per group")
    matrix = preference.as_array()
    idx = np.asarray(samples, dtype=int)
    pairwise = matrix[idx[:, None], idx[None, :]]
    return (pairwise.sum(axis=1) - 0.5) / (k - 1)


def spo_run(
    preference: SelectionMatrix,
    k: int = 2,
    iterations: int = 2000,
    step_size: float = 2.0,
    seed: int = 0,
    batch: int = 128,
    exploration: float = 0.1,
    log_stride: int = 1,
) -> tuple[Lottery, SelfPlayTrace]:
    """Run sampled self-play and return the policy mixture plus its trace.

    Per iteration ``batch`` groups of ``k`` alternatives are drawn from the
    exploration-mixed policy, every alternative's reward estimate is the
    mean reward of its samples, and logits move by
    ``step_size * (estimate - batch mean)``.  Runs are deterministic in
    (inputs, seed).
    """
    if k < 2:
        raise ValueError("need at least two samples per group")
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    if batch < 1:
        raise ValueError("batch must be at least 1")
    if not 0 <= exploration <= 1:
        raise ValueError("exploration must lie in [0, 1]")
    matrix = preference.as_array()
    m = matrix.shape[0]
    rng = np.random.Generator(
        np.random.Philox(key=np.array([seed & _MASK64, 0], dtype=np.uint64))
    )

    logits = np.zeros(m)
    mixture_sum = np.zeros(m)
    points: list[TracePoint] = []
    policy = np.full(m, 1.0 / m)
    for t in range(1, iterations + 1):
        shifted = logits - logits.max()
        weights = np.exp(shifted)
        policy = weights / weights.sum()
        mixture_sum += policy
        sampling = (1.0 - exploration) * policy + exploration / m

        samples = rng.choice(m, size=(batch, k), p=sampling)
        pairwise = matrix[samples[:, :, None], samples[:, None, :]]
        rewards = (pairwise.sum(axis=2) - 0.5) / (k - 1)

        flat_samples = samples.reshape(-1)
        flat_rewards = rewards.reshape(-1)
        counts = np.bincount(flat_samples, minlength=m)
        sums = np.bincount(flat_samples, weights=flat_rewards, minlength=m)
        baseline = flat_rewards.mean()
        estimates = np.where(counts > 0, sums / np.maximum(counts, 1), baseline)
        logits = logits + step_size * (estimates - baseline)

        if t % log_stride == 0 or t == iterations:
            points.append(
                TracePoint(
                    iteration=t,
                    policy=tuple(policy),
                    mixture=tuple(mixture_sum / t),
                    expected_rewards=tuple(estimates),
                )
            )
    mixture = Lottery(preference.alternatives, mixture_sum / iterations)
    return mixture, SelfPlayTrace(seed=seed, points=tuple(points))


def exact_best_response_dynamics(preference: SelectionMatrix, iterations: int) -> Lottery:
    """Noise-free self-play: multiplicative weights on exact expected payoffs.

    Each round reweights by the expected selection payoff of every
    alternative against the current strategy itself; the returned mixture
    is the time average, whose exploitability decays like sqrt(log m / T).
    This sits between the stochastic loop and the linear program as a
    diagnostic oracle.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    matrix = preference.as_array()
    m = matrix.shape[0]
    logits = np.zeros(m)
    mixture_sum = np.zeros(m)
    log_m = math.log(max(m, 2))
    for t in range(1, iterations + 1):
        shifted = logits - logits.max()
        weights = np.exp(shifted)
        policy = weights / weights.sum()
        mixture_sum += policy
        expected = matrix @ policy
        logits += 4.0 * math.sqrt(log_m / t) * (expected - expected.mean())
    return Lottery(preference.alternatives, mixture_sum / iterations)
