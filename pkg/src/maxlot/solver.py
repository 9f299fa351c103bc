"""Maximal-lottery solvers for the pairwise margin game.

The primary solver is an exact dense simplex (Bland's rule, rational
arithmetic) on the maximin linear program of the zero-sum game, so returned
lotteries carry an exact optimality certificate.  A multiplicative-weights
self-play loop is provided as an independent, approximate cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .prefs import AlternativeSet, Lottery, MarginMatrix, SelectionMatrix

_SIMPLEX_ITERATION_CAP = 10_000


class SolverError(RuntimeError):
    """Raised when the simplex fails to terminate or a certificate fails."""


@dataclass(frozen=True)
class MaximalityReport:
    """Certificate that a lottery is (approximately) maximal for a margin game.

    ``worst_column_payoff`` is the minimum over pure opponent responses of
    the lottery's expected margin; maximality means it is not meaningfully
    negative.  For antisymmetric payoffs the game value is zero, so
    ``game_value`` doubles as a sanity check.
    """

    worst_column_payoff: float
    is_maximal: bool
    epsilon: float
    game_value: float


def _pivot(tableau: list[list[Fraction]], zrow: list[Fraction], row: int, col: int) -> None:
    pivot = tableau[row][col]
    tableau[row] = [x / pivot for x in tableau[row]]
    pivot_row = tableau[row]
    for i, current in enumerate(tableau):
        if i == row:
            continue
        factor = current[col]
        if factor != 0:
            tableau[i] = [x - factor * y for x, y in zip(current, pivot_row)]
    factor = zrow[col]
    if factor != 0:
        zrow[:] = [x - factor * y for x, y in zip(zrow, pivot_row)]


def _simplex_max(a_matrix: list[list[Fraction]]) -> tuple[list[Fraction], list[Fraction]]:
    """Maximize sum(y) subject to A y <= 1, y >= 0, for strictly positive A.

    Returns the optimal ``y`` and the dual prices of the row constraints.
    The slack basis is feasible from the start and Bland's rule guarantees
    termination; the iteration cap only guards against implementation bugs.
    """
    m = len(a_matrix)
    n = len(a_matrix[0])
    width = n + m + 1
    tableau = []
    for i, row in enumerate(a_matrix):
        t_row = list(row) + [Fraction(0)] * m + [Fraction(1)]
        t_row[n + i] = Fraction(1)
        tableau.append(t_row)
    zrow = [Fraction(-1)] * n + [Fraction(0)] * (m + 1)
    basis = list(range(n, n + m))

    for _ in range(_SIMPLEX_ITERATION_CAP):
        entering = next((j for j in range(width - 1) if zrow[j] < 0), None)
        if entering is None:
            solution = [Fraction(0)] * n
            for i, var in enumerate(basis):
                if var < n:
                    solution[var] = tableau[i][-1]
            duals = zrow[n : n + m]
            return solution, list(duals)
        leaving = None
        best_ratio = None
        for i in range(m):
            coeff = tableau[i][entering]
            if coeff > 0:
                ratio = tableau[i][-1] / coeff
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving is None:
            raise SolverError("linear program is unbounded; payoff matrix was not positive")
        _pivot(tableau, zrow, leaving, entering)
        basis[leaving] = entering
    raise SolverError("simplex exceeded its iteration cap")


def solve_matrix_game(
    payoff: Sequence[Sequence[Fraction]],
) -> tuple[list[Fraction], list[Fraction], Fraction]:
    """Exact maximin solution of a finite zero-sum matrix game.

    Returns ``(row_strategy, column_strategy, game_value)`` where the row
    player maximizes ``row^T payoff column``.  The payoff is shifted to be
    strictly positive (which changes the value by the shift but not the
    strategies), the column player's bounded LP is solved by simplex, and
    the row strategy is read off the dual prices.
    """
    rows = [[Fraction(x) for x in row] for row in payoff]
    m = len(rows)
    if any(len(r) != m for r in rows):
        raise ValueError("payoff matrix must be square")
    shift = max((abs(x) for row in rows for x in row), default=Fraction(0)) + 1
    shifted = [[x + shift for x in row] for row in rows]
    column_raw, duals = _simplex_max(shifted)
    column_total = sum(column_raw, Fraction(0))
    dual_total = sum(duals, Fraction(0))
    if column_total <= 0 or dual_total <= 0:
        raise SolverError("degenerate game solution")
    column = [y / column_total for y in column_raw]
    row_strategy = [x / dual_total for x in duals]
    value = 1 / column_total - shift
    return row_strategy, column, value


def _exact_min_column_payoff(
    payoff: Sequence[Sequence[Fraction]], strategy: Sequence[Fraction]
) -> Fraction:
    m = len(strategy)
    return min(
        sum((strategy[i] * payoff[i][j] for i in range(m)), Fraction(0)) for j in range(m)
    )


def maximal_lottery_exact(margin: MarginMatrix) -> tuple[Fraction, ...]:
    """Maximal lottery of the margin game as exact rationals.

    The returned strategy satisfies ``pi^T M >= 0`` columnwise, exactly.
    """
    strategy, _, _ = solve_matrix_game(margin.m_matrix)
    if _exact_min_column_payoff(margin.m_matrix, strategy) < 0:
        raise SolverError("solver produced a non-maximal lottery")
    return tuple(strategy)


def maximal_lottery_lp(margin: MarginMatrix) -> Lottery:
    """Solve the margin game by linear programming and certify the result."""
    return Lottery(margin.alternatives, [float(p) for p in maximal_lottery_exact(margin)])


def maximal_lottery_from_selection(selection: SelectionMatrix) -> Lottery:
    """Maximal lottery from selection probabilities.

    Solves the maximin game whose payoff is the selection matrix (strict
    preference plus half the indifference mass).  That game is an affine
    shift of the margin game, so its solution is the same lottery and its
    value is one half; the result is certified against the equivalent
    margin matrix.
    """
    payoff = [
        [x if isinstance(x, Fraction) else Fraction(float(x)) for x in row]
        for row in selection.p_matrix
    ]
    strategy, _, _ = solve_matrix_game(payoff)
    lottery = Lottery(selection.alternatives, [float(p) for p in strategy])
    report = verify_maximality(selection.margin_equivalent(), lottery, epsilon=1e-8)
    if not report.is_maximal:
        raise SolverError(
            f"selection-game solution failed the margin certificate "
            f"(worst column payoff {report.worst_column_payoff})"
        )
    return lottery


def verify_maximality(
    margin: MarginMatrix, lottery: Lottery, epsilon: float = 1e-9
) -> MaximalityReport:
    """Check ``pi^T M e_j >= -epsilon`` for every pure response j.

    Best responses to a fixed lottery are pure, so checking columns covers
    all opponent lotteries.
    """
    if len(lottery.probabilities) != len(margin.alternatives):
        raise ValueError("lottery and margin matrix have different dimensions")
    probs = lottery.as_array()
    payoff = margin.as_array()
    column_payoffs = probs @ payoff
    worst = float(column_payoffs.min())
    value = float(column_payoffs @ probs)
    return MaximalityReport(
        worst_column_payoff=worst,
        is_maximal=worst >= -epsilon,
        epsilon=epsilon,
        game_value=value,
    )


@dataclass(frozen=True)
class StepSchedule:
    """Learning-rate schedule for multiplicative weights.

    ``anytime`` uses scale * sqrt(log m / (t + 1)); ``fixed`` uses
    scale * sqrt(log m / T) for the whole run.
    """

    kind: str = "anytime"
    scale: float = 1.0

    def rate(self, t: int, total: int, m: int) -> float:
        log_m = math.log(max(m, 2))
        if self.kind == "anytime":
            return self.scale * math.sqrt(log_m / (t + 1))
        if self.kind == "fixed":
            return self.scale * math.sqrt(log_m / total)
        raise ValueError(f"unknown step schedule {self.kind!r}")


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    weights = np.exp(shifted)
    return weights / weights.sum()


def maximal_lottery_iterative(
    payoff: Union[MarginMatrix, SelectionMatrix],
    iterations: int,
    step_schedule: StepSchedule = StepSchedule(),
) -> Lottery:
    """Approximate the maximal lottery by multiplicative-weights self-play.

    Both sides of the symmetric game share one strategy; each round plays
    the current mixed strategy against itself and reweights by the expected
    payoff vector.  The time-averaged strategy is returned.  This exists as
    an independent cross-check of the exact solver, not as the primary path.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    matrix = payoff.as_array()
    if not np.isfinite(matrix).all():
        raise ValueError("payoff entries must be finite")
    spread = float(np.abs(matrix).max())
    if spread == 0:
        return Lottery.uniform(payoff.alternatives)
    matrix = matrix / spread
    m = matrix.shape[0]
    logits = np.zeros(m)
    average = np.zeros(m)
    for t in range(iterations):
        strategy = _softmax(logits)
        average += strategy
        expected = matrix @ strategy
        logits += step_schedule.rate(t, iterations, m) * expected
    return Lottery(payoff.alternatives, average / iterations)
