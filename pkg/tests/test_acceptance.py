"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Tolerances are pinned here and nowhere else.
"""

import math
import random
import time

import numpy as np
import pytest

from maxlot import (
    ExperimentConfig,
    PreferenceProfile,
    RewardVector,
    borda_scores,
    btl_gradient,
    check_borda_equivalence,
    condorcet_winner,
    fit_btl,
    majority_winner,
    margin_matrix,
    maximal_lottery_from_selection,
    maximal_lottery_iterative,
    maximal_lottery_lp,
    pairwise_counts,
    run_experiment,
    selection_matrix,
    softmax_policy,
    spo_run,
    verify_maximality,
)
from maxlot.btl import _loss, _loss_arrays

from helpers import brute_force_smith, inject_indifference, random_profile


def _check(number: int, ok: bool, detail: str) -> None:
    print(f"criterion {number:02d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {number:02d} failed: {detail}"


def majority_population():
    return PreferenceProfile.from_rankings(
        ["R", "G", "B"], [(["R", "G", "B"], 2), (["B", "R", "G"], 3)]
    )


def duo_population():
    return PreferenceProfile.from_rankings(
        ["R", "B"], [(["R", "B"], 2), (["B", "R"], 3)]
    )


def cyclic_population():
    return PreferenceProfile.from_rankings(
        ["R", "G", "B"],
        [(["R", "B", "G"], 1), (["G", "R", "B"], 1), (["B", "G", "R"], 1)],
    )


def bounded_profile(rng, max_alternatives=6, max_total=25):
    while True:
        profile = random_profile(rng, max_alternatives=max_alternatives, max_weight=4)
        if profile.total_weight <= max_total:
            return profile


def interior_bounded_profile(rng, max_alternatives=6, max_total=25):
    while True:
        profile = bounded_profile(rng, max_alternatives, max_total)
        counts = pairwise_counts(profile)
        m = len(profile.alternatives)
        n = counts.n_matrix
        if all(n[a][b] > 0 for a in range(m) for b in range(m) if a != b):
            return profile


def test_criterion_01_borda_win_counts():
    counts = pairwise_counts(majority_population())
    borda_scores(counts)  # warm path before timing
    start = time.perf_counter()
    scores = borda_scores(counts).scores
    elapsed = time.perf_counter() - start
    ok = scores == (7, 2, 6) and elapsed < 1e-3
    _check(1, ok, f"raw win counts R,G,B = {scores}, runtime {elapsed * 1e3:.3f} ms")


def test_criterion_02_condorcet_majority_and_point_mass():
    population = majority_population()
    counts = pairwise_counts(population)
    margins = margin_matrix(counts)
    maximal_lottery_lp(margins)  # warm path before timing
    start = time.perf_counter()
    condorcet = condorcet_winner(counts)
    majority = majority_winner(population)
    lottery = maximal_lottery_lp(margins)
    elapsed = time.perf_counter() - start
    labels = population.alternatives.labels
    ok = (
        labels[condorcet] == "B"
        and labels[majority] == "B"
        and lottery.prob("B") >= 1 - 1e-9
        and elapsed < 1e-2
    )
    _check(
        2,
        ok,
        f"condorcet={labels[condorcet]}, majority={labels[majority]}, "
        f"pi(B)={lottery.prob('B')}, runtime {elapsed * 1e3:.2f} ms",
    )


def test_criterion_03_cyclic_margin_game_is_uniform():
    margins = margin_matrix(pairwise_counts(cyclic_population()))
    lottery = maximal_lottery_lp(margins)
    gap = max(abs(p - 1 / 3) for p in lottery.probabilities)
    ok = gap <= 1e-9
    _check(3, ok, f"L-infinity gap from uniform = {gap:.2e}")


def test_criterion_04_reward_surrogate_violates_majority():
    counts = pairwise_counts(majority_population())
    rewards, _ = fit_btl(counts)
    policy = softmax_policy(rewards, math.inf)
    ok = policy.prob("R") == 1.0
    _check(4, ok, f"beta=inf softmax policy = {policy.as_dict()}")


def test_criterion_05_iia_behavioral_pair():
    small_counts = pairwise_counts(duo_population())
    large_counts = pairwise_counts(majority_population())
    ml_small = maximal_lottery_lp(margin_matrix(small_counts))
    ml_large = maximal_lottery_lp(margin_matrix(large_counts))
    btl_small = softmax_policy(fit_btl(small_counts)[0], math.inf)
    btl_large = softmax_policy(fit_btl(large_counts)[0], math.inf)
    ml_ok = (
        ml_small.alternatives.labels[ml_small.argmax()] == "B"
        and ml_large.alternatives.labels[ml_large.argmax()] == "B"
    )
    btl_flip = (
        btl_small.alternatives.labels[btl_small.argmax()] == "B"
        and btl_large.alternatives.labels[btl_large.argmax()] == "R"
    )
    ok = ml_ok and btl_flip
    _check(
        5,
        ok,
        "maximal lottery picks B on both menus; "
        f"reward surrogate flips B->{btl_large.alternatives.labels[btl_large.argmax()]}",
    )


def test_criterion_06_selection_game_equivalence():
    rng = random.Random(606)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        profile = bounded_profile(rng)
        counts = pairwise_counts(profile)
        counts = inject_indifference(counts, rng)
        margins = margin_matrix(counts)
        lottery = maximal_lottery_from_selection(selection_matrix(counts))
        report = verify_maximality(margins, lottery, epsilon=1e-8)
        worst = min(worst, report.worst_column_payoff)
        assert report.is_maximal
    elapsed = time.perf_counter() - start
    ok = elapsed < 5.0
    _check(
        6,
        ok,
        f"200 selection-game lotteries certified on margins "
        f"(worst column payoff {worst:.2e}), runtime {elapsed:.2f} s",
    )


def test_criterion_07_reward_fit_orders_by_borda():
    rng = random.Random(707)
    start = time.perf_counter()
    worst_residual = 0.0
    for _ in range(200):
        profile = interior_bounded_profile(rng)
        counts = pairwise_counts(profile)
        rewards, diagnostics = fit_btl(counts)
        assert diagnostics.converged
        residual = float(np.abs(btl_gradient(rewards, counts)).max())
        worst_residual = max(worst_residual, residual)
        assert residual <= 1e-8
        assert check_borda_equivalence(rewards, counts)
    elapsed = time.perf_counter() - start
    ok = elapsed < 30.0
    _check(
        7,
        ok,
        f"200 interior fits agree with win-count ordering, "
        f"max stationarity residual {worst_residual:.2e}, runtime {elapsed:.2f} s",
    )


def test_criterion_08_certificate_suite():
    rng = random.Random(808)
    worst_exact = 0.0
    for _ in range(100):
        profile = bounded_profile(rng)
        margins = margin_matrix(pairwise_counts(profile))
        lottery = maximal_lottery_lp(margins)
        report = verify_maximality(margins, lottery, epsilon=1e-9)
        worst_exact = min(worst_exact, report.worst_column_payoff)
        assert report.is_maximal
    worst_iterative = 0.0
    for population in (majority_population(), duo_population(), cyclic_population()):
        margins = margin_matrix(pairwise_counts(population)).normalized()
        lottery = maximal_lottery_iterative(margins, 10_000)
        report = verify_maximality(margins, lottery, epsilon=1e-3)
        worst_iterative = min(worst_iterative, report.worst_column_payoff)
        assert report.is_maximal
    ok = worst_exact >= -1e-9 and worst_iterative >= -1e-3
    _check(
        8,
        ok,
        f"exact path worst {worst_exact:.2e} (eps 1e-9), "
        f"iterative path worst {worst_iterative:.2e} (eps 1e-3)",
    )


def test_criterion_09_smith_containment():
    rng = random.Random(909)
    for _ in range(500):
        profile = random_profile(rng, max_alternatives=7)
        counts = pairwise_counts(profile)
        lottery = maximal_lottery_lp(margin_matrix(counts))
        support = set(lottery.support(threshold=1e-7))
        assert support <= set(brute_force_smith(counts))
    _check(9, True, "500 lottery supports inside brute-force Smith sets")


def test_criterion_10_self_play_convergence():
    populations = {
        "majority": majority_population(),
        "two-option": duo_population(),
        "cyclic": cyclic_population(),
    }
    start = time.perf_counter()
    worst_tv = 0.0
    for name, population in populations.items():
        counts = pairwise_counts(population)
        target = maximal_lottery_lp(margin_matrix(counts))
        selection = selection_matrix(counts)
        for seed in (0, 1, 2):
            mixture, _ = spo_run(
                selection,
                k=2,
                iterations=2000,
                seed=seed,
                batch=128,
                exploration=0.1,
            )
            tv = mixture.tv_distance(target)
            worst_tv = max(worst_tv, tv)
            assert tv <= 0.05, f"{name} seed {seed}: TV {tv}"
    elapsed = time.perf_counter() - start
    ok = elapsed < 60.0
    _check(
        10,
        ok,
        f"9 self-play runs within TV 0.05 of the exact lottery "
        f"(worst {worst_tv:.4f}), runtime {elapsed:.1f} s",
    )


def test_criterion_11_sampled_end_to_end():
    config = ExperimentConfig(
        population=majority_population(),
        dataset_size=2048,
        seeds=(0,),
        methods=("maximal_lottery_lp", "btl_softmax"),
    )
    report = run_experiment(config)
    run = report.runs[0]
    ml = run["lotteries"]["maximal_lottery_lp"]
    btl = run["lotteries"]["btl_softmax"]
    ok = ml["B"] >= 0.99 and max(btl, key=btl.get) == "R"
    _check(11, ok, f"sampled pipeline: pi(B)={ml['B']}, surrogate argmax {max(btl, key=btl.get)}")


def test_criterion_12_gradient_matches_finite_differences():
    rng = random.Random(1212)
    np_rng = np.random.default_rng(1212)
    step = 1e-5
    worst = 0.0
    for _ in range(100):
        profile = random_profile(rng, max_alternatives=6)
        counts = pairwise_counts(profile)
        wins, _ = _loss_arrays(counts)
        m = len(profile.alternatives)
        values = np_rng.normal(size=m)
        values -= values.mean()
        grad = btl_gradient(RewardVector.centered(profile.alternatives, values), counts)
        for a in range(m):
            bump = np.zeros(m)
            bump[a] = step
            fd = (_loss(values + bump, wins) - _loss(values - bump, wins)) / (2 * step)
            rel = abs(fd - grad[a]) / max(1.0, abs(grad[a]))
            worst = max(worst, rel)
            assert rel <= 1e-6
    _check(12, True, f"100 gradient checks, worst relative error {worst:.2e}")
