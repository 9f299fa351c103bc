"""End-to-end experiment pipeline: sample a dataset from a population, run
the requested aggregation methods, and assemble a machine-readable report.

Reports are deterministic given the config (no timestamps), so reruns are
byte-identical and every verdict can be recomputed from the stored lotteries
and count matrices alone.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .btl import fit_btl, softmax_policy
from .datasets import empirical_counts, sample_dataset
from .prefs import (
    AlternativeSet,
    Lottery,
    PreferenceProfile,
    margin_matrix,
    pairwise_counts,
    selection_matrix,
)
from .selfplay import spo_run
from .solver import maximal_lottery_lp, verify_maximality
from .voting import (
    borda_scores,
    condorcet_winner,
    majority_candidates,
    random_dictatorship,
    smith_set,
)

REPORT_SCHEMA = "maxlot-report-v1"
KNOWN_METHODS = (
    "borda",
    "btl_softmax",
    "maximal_lottery_lp",
    "spo",
    "random_dictatorship",
)
# Sampling noise moves each cyclic-equilibrium coordinate by ~0.03 at 2048
# records, so "near uniform" leaves room for a 3-sigma draw.
_UNIFORM_GAP_TOL = 0.1
_TRACE_MAX_POINTS = 2000
_BETA_SWEEP = (0.0, 1.0, 10.0, math.inf)


@dataclass(frozen=True)
class SpoParams:
    k: int = 2
    iterations: int = 2000
    batch: int = 128
    step_size: float = 2.0
    exploration: float = 0.1
    log_stride: int = 1

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "iterations": self.iterations,
            "batch": self.batch,
            "step_size": self.step_size,
            "exploration": self.exploration,
            "log_stride": self.log_stride,
        }


@dataclass(frozen=True)
class BtlParams:
    learning_rate: float = 1.0
    max_iterations: int = 20_000
    tolerance: float = 1e-8
    beta: float = math.inf

    def to_json_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "max_iterations": self.max_iterations,
            "tolerance": self.tolerance,
            "beta": "inf" if math.isinf(self.beta) else self.beta,
        }


def _parse_beta(value) -> float:
    if value in ("inf", "Infinity"):
        return math.inf
    return float(value)


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved experiment configuration; the population is held inline."""

    population: PreferenceProfile
    dataset_size: int = 2048
    seeds: tuple[int, ...] = (0,)
    methods: tuple[str, ...] = KNOWN_METHODS
    prompt_id: str = "prompt-0"
    prompt_text: Optional[str] = None
    spo: SpoParams = field(default_factory=SpoParams)
    btl: BtlParams = field(default_factory=BtlParams)

    def __post_init__(self):
        if self.dataset_size < 1:
            raise ValueError("dataset size must be at least 1")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if not self.methods:
            raise ValueError("need at least one method")
        unknown = [m for m in self.methods if m not in KNOWN_METHODS]
        if unknown:
            raise ValueError(f"unknown methods: {unknown}; known: {list(KNOWN_METHODS)}")

    def to_json_dict(self) -> dict:
        data = {
            "population": self.population.to_json_dict(),
            "dataset_size": self.dataset_size,
            "seeds": list(self.seeds),
            "methods": list(self.methods),
            "prompt_id": self.prompt_id,
            "spo": self.spo.to_json_dict(),
            "btl": self.btl.to_json_dict(),
        }
        if self.prompt_text is not None:
            data["prompt_text"] = self.prompt_text
        return data

    @classmethod
    def from_json_dict(cls, data: dict, base_dir: Optional[Path] = None) -> ExperimentConfig:
        population = data.get("population")
        if population is None:
            raise ValueError("config is missing 'population'")
        if isinstance(population, str):
            path = Path(population)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            profile = PreferenceProfile.load(path)
        else:
            profile = PreferenceProfile.from_json_dict(population)
        spo_data = data.get("spo", {})
        btl_data = dict(data.get("btl", {}))
        if "beta" in btl_data:
            btl_data["beta"] = _parse_beta(btl_data["beta"])
        return cls(
            population=profile,
            dataset_size=int(data.get("dataset_size", 2048)),
            seeds=tuple(int(s) for s in data.get("seeds", [0])),
            methods=tuple(data.get("methods", KNOWN_METHODS)),
            prompt_id=data.get("prompt_id", "prompt-0"),
            prompt_text=data.get("prompt_text"),
            spo=SpoParams(**spo_data),
            btl=BtlParams(**btl_data),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> ExperimentConfig:
        path = Path(path)
        data = json.loads(path.read_text(encoding="utf-8"))
        return cls.from_json_dict(data, base_dir=path.parent)


def _fraction_json(value: Fraction) -> int | str:
    if value.denominator == 1:
        return int(value)
    return f"{value.numerator}/{value.denominator}"


def _matrix_json(matrix) -> list[list]:
    return [[_fraction_json(x) for x in row] for row in matrix]


def _scores_json(alternatives: AlternativeSet, scores) -> dict:
    return {
        label: float(f"{float(s):.12g}") for label, s in zip(alternatives.labels, scores)
    }


def config_hash(config: ExperimentConfig) -> str:
    canonical = json.dumps(config.to_json_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass
class ExperimentReport:
    """Structured result of one experiment run (possibly several seeds)."""

    alternatives: AlternativeSet
    config: dict
    config_hash: str
    exact: dict
    runs: list[dict]
    traces: dict[str, list[tuple]]

    def to_dict(self, include_traces: bool = True) -> dict:
        data = {
            "schema": REPORT_SCHEMA,
            "tool_version": __version__,
            "config": self.config,
            "config_hash": self.config_hash,
            "alternatives": list(self.alternatives.labels),
            "exact": self.exact,
            "runs": self.runs,
        }
        if include_traces:
            data["traces"] = {
                key: [list(row) for row in rows] for key, rows in self.traces.items()
            }
        return data

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentReport:
        if data.get("schema") != REPORT_SCHEMA:
            raise ValueError(f"unsupported report schema: {data.get('schema')!r}")
        return cls(
            alternatives=AlternativeSet(data["alternatives"]),
            config=data["config"],
            config_hash=data["config_hash"],
            exact=data["exact"],
            runs=data["runs"],
            traces={
                key: [tuple(row) for row in rows]
                for key, rows in data.get("traces", {}).items()
            },
        )

    def method_lotteries(self, method: str) -> list[Lottery]:
        lotteries = []
        for run in self.runs:
            probs = run["lotteries"].get(method)
            if probs is not None:
                lotteries.append(
                    Lottery(self.alternatives, [probs[label] for label in self.alternatives])
                )
        return lotteries

    def mean_lottery(self, method: str) -> Lottery:
        lotteries = self.method_lotteries(method)
        if not lotteries:
            raise KeyError(f"report has no lotteries for method {method!r}")
        m = len(self.alternatives)
        mean = [
            sum(l.probabilities[i] for l in lotteries) / len(lotteries) for i in range(m)
        ]
        return Lottery(self.alternatives, mean)


def _single_point_trace(lottery: Lottery) -> list[tuple]:
    return [
        (0, label, lottery.probabilities[i], lottery.probabilities[i])
        for i, label in enumerate(lottery.alternatives.labels)
    ]


def _btl_trace(alternatives: AlternativeSet, path, beta: float) -> list[tuple]:
    from .btl import RewardVector

    if not path:
        return []
    stride = max(1, math.ceil(len(path) / _TRACE_MAX_POINTS))
    indices = list(range(0, len(path), stride))
    if indices[-1] != len(path) - 1:
        indices.append(len(path) - 1)
    m = len(alternatives)
    mixture = [0.0] * m
    rows: list[tuple] = []
    emitted = set(indices)
    for i, rewards in enumerate(path):
        probs = softmax_policy(RewardVector(alternatives, rewards), beta).probabilities
        mixture = [acc + p for acc, p in zip(mixture, probs)]
        if i in emitted:
            for j, label in enumerate(alternatives.labels):
                rows.append((i + 1, label, probs[j], mixture[j] / (i + 1)))
    return rows


def _spo_trace(alternatives: AlternativeSet, trace) -> list[tuple]:
    rows: list[tuple] = []
    for point in trace.points:
        for j, label in enumerate(alternatives.labels):
            rows.append((point.iteration, label, point.policy[j], point.mixture[j]))
    return rows


def _lottery_argmax_label(lottery: Lottery) -> str:
    return lottery.alternatives.labels[lottery.argmax()]


def _winner_verdict(winner_label: Optional[str], lotteries: dict[str, Lottery]) -> dict:
    verdict: dict = {"winner": winner_label, "per_method": {}}
    for method, lottery in lotteries.items():
        entry: dict = {"argmax": _lottery_argmax_label(lottery)}
        if winner_label is not None:
            entry["satisfies"] = entry["argmax"] == winner_label
        verdict["per_method"][method] = entry
    return verdict


def _cycle_verdict(applicable: bool, lotteries: dict[str, Lottery]) -> dict:
    verdict: dict = {"applicable": applicable, "per_method": {}}
    if not applicable:
        return verdict
    for method, lottery in lotteries.items():
        m = len(lottery.probabilities)
        gap = max(abs(p - 1.0 / m) for p in lottery.probabilities)
        verdict["per_method"][method] = {
            "max_gap_from_uniform": float(f"{gap:.12g}"),
            "near_uniform": gap <= _UNIFORM_GAP_TOL,
        }
    return verdict


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Sample, aggregate, and judge: the full pipeline for one population.

    Per seed: draw a comparison dataset, build empirical counts, run every
    requested method, and record axiom verdicts.  Verdicts are data, never
    failures.
    """
    population = config.population
    alternatives = population.alternatives
    exact_counts = pairwise_counts(population)
    exact_margin = margin_matrix(exact_counts)
    exact_lottery = maximal_lottery_lp(exact_margin)
    majority = majority_candidates(population)
    condorcet = condorcet_winner(exact_counts)
    labels = alternatives.labels

    exact_section = {
        "counts": _matrix_json(exact_counts.n_matrix),
        "margins": _matrix_json(exact_margin.m_matrix),
        "total_weight": _fraction_json(exact_counts.total_weight),
        "borda_raw": _scores_json(alternatives, borda_scores(exact_counts).scores),
        "borda_normalized": _scores_json(
            alternatives, borda_scores(exact_counts, normalized=True).scores
        ),
        "majority_winner": labels[majority[0]] if majority else None,
        "majority_candidates": [labels[a] for a in majority],
        "majority_ambiguous": len(majority) > 1,
        "condorcet_winner": labels[condorcet] if condorcet is not None else None,
        "smith_set": sorted(labels[a] for a in smith_set(exact_counts)),
        "maximal_lottery": exact_lottery.as_dict(),
        "random_dictatorship": random_dictatorship(population).as_dict(),
    }

    runs: list[dict] = []
    traces: dict[str, list[tuple]] = {}
    for seed in config.seeds:
        dataset = sample_dataset(population, config.dataset_size, seed, config.prompt_id)
        counts = empirical_counts(dataset)
        selection = selection_matrix(counts)
        empirical_margin = selection.margin_equivalent()

        lotteries: dict[str, Lottery] = {}
        run: dict = {
            "seed": seed,
            "dataset_size": len(dataset),
            "empirical_wins": _matrix_json(counts.n_matrix),
            "pair_totals": _matrix_json(counts.pair_totals),
        }

        for method in config.methods:
            if method == "borda":
                scores = borda_scores(counts, normalized=True)
                winners = scores.argmax_set()
                probs = [0.0] * len(alternatives)
                for a in winners:
                    probs[a] = 1.0 / len(winners)
                lottery = Lottery(alternatives, probs)
                traces[f"{method}_s{seed}"] = _single_point_trace(lottery)
            elif method == "btl_softmax":
                rewards, diagnostics = fit_btl(
                    counts,
                    learning_rate=config.btl.learning_rate,
                    max_iterations=config.btl.max_iterations,
                    tolerance=config.btl.tolerance,
                    record_path=True,
                )
                lottery = softmax_policy(rewards, config.btl.beta)
                run["btl"] = {
                    "rewards": {
                        label: float(f"{r:.12g}") for label, r in rewards.as_dict().items()
                    },
                    "converged": diagnostics.converged,
                    "iterations": diagnostics.iterations_used,
                    "gradient_norm": float(f"{diagnostics.final_gradient_norm:.12g}"),
                    "beta_sweep": {
                        ("inf" if math.isinf(b) else f"{b:g}"): softmax_policy(
                            rewards, b
                        ).as_dict()
                        for b in _BETA_SWEEP
                    },
                }
                traces[f"{method}_s{seed}"] = _btl_trace(
                    alternatives, diagnostics.reward_path, config.btl.beta
                )
            elif method == "maximal_lottery_lp":
                lottery = maximal_lottery_lp(empirical_margin)
                report = verify_maximality(empirical_margin, lottery)
                run["maximality"] = {
                    "worst_column_payoff": float(f"{report.worst_column_payoff:.12g}"),
                    "is_maximal": report.is_maximal,
                }
                traces[f"{method}_s{seed}"] = _single_point_trace(lottery)
            elif method == "spo":
                lottery, spo_trace = spo_run(
                    selection,
                    k=config.spo.k,
                    iterations=config.spo.iterations,
                    step_size=config.spo.step_size,
                    seed=seed,
                    batch=config.spo.batch,
                    exploration=config.spo.exploration,
                    log_stride=config.spo.log_stride,
                )
                traces[f"{method}_s{seed}"] = _spo_trace(alternatives, spo_trace)
            elif method == "random_dictatorship":
                # Baseline sampler over the population itself, not the dataset.
                lottery = random_dictatorship(population)
                traces[f"{method}_s{seed}"] = _single_point_trace(lottery)
            else:  # pragma: no cover - blocked by config validation
                raise ValueError(f"unknown method {method!r}")
            lotteries[method] = lottery

        run["lotteries"] = {method: lottery.as_dict() for method, lottery in lotteries.items()}
        run["verdicts"] = {
            "majority": _winner_verdict(
                labels[majority[0]] if majority else None, lotteries
            ),
            "condorcet": _winner_verdict(
                labels[condorcet] if condorcet is not None else None, lotteries
            ),
            "cycle_uniformity": _cycle_verdict(condorcet is None, lotteries),
        }
        runs.append(run)

    resolved = config.to_json_dict()
    return ExperimentReport(
        alternatives=alternatives,
        config=resolved,
        config_hash=config_hash(config),
        exact=exact_section,
        runs=runs,
        traces=traces,
    )


def _restricted_preference(lottery: Lottery, a: str, b: str) -> float:
    pa, pb = lottery.prob(a), lottery.prob(b)
    if pa + pb == 0:
        return 0.5
    return pa / (pa + pb)


def compare_iia(
    report_small: ExperimentReport,
    report_large: ExperimentReport,
    shared: Sequence[str],
) -> dict:
    """Judge stability of each method's choice among shared alternatives.

    For every pair of shared alternatives the conditional preference
    ``pi(a) / (pi(a) + pi(b))`` is compared across the two reports, and the
    argmax restricted to the shared set is checked for a flip.  Lotteries
    are averaged across seeds within each report before comparison.
    """
    shared = list(shared)
    if len(shared) < 2:
        raise ValueError("need at least two shared alternatives")
    for label in shared:
        if label not in report_small.alternatives or label not in report_large.alternatives:
            raise ValueError(f"shared alternative {label!r} missing from a report")
    methods = [
        m
        for m in report_small.runs[0]["lotteries"]
        if m in report_large.runs[0]["lotteries"]
    ]
    result: dict = {"shared": shared, "methods": {}}
    for method in methods:
        small = report_small.mean_lottery(method)
        large = report_large.mean_lottery(method)
        argmax_small = max(shared, key=small.prob)
        argmax_large = max(shared, key=large.prob)
        pairs = {}
        max_gap = 0.0
        for i, a in enumerate(shared):
            for b in shared[i + 1 :]:
                ps = _restricted_preference(small, a, b)
                pl = _restricted_preference(large, a, b)
                gap = abs(ps - pl)
                max_gap = max(max_gap, gap)
                pairs[f"{a}|{b}"] = {
                    "small": float(f"{ps:.12g}"),
                    "large": float(f"{pl:.12g}"),
                    "gap": float(f"{gap:.12g}"),
                }
        result["methods"][method] = {
            "argmax_small": argmax_small,
            "argmax_large": argmax_large,
            "flipped": argmax_small != argmax_large,
            "max_pair_gap": float(f"{max_gap:.12g}"),
            "pairs": pairs,
        }
    return result


def _write_text(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def emit_report(report: ExperimentReport, directory: str | Path) -> list[tuple[str, str]]:
    """Write report.json, counts.csv, per-method trace CSVs, and a manifest.

    Returns the manifest as (filename, sha256) pairs.  Output is a pure
    function of the report, so rerunning with identical inputs rewrites
    identical bytes.
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create report directory {directory}: {exc}") from exc

    written: list[Path] = []
    report_path = directory / "report.json"
    _write_text(
        report_path,
        json.dumps(report.to_dict(include_traces=False), indent=2, sort_keys=True) + "\n",
    )
    written.append(report_path)

    counts_path = directory / "counts.csv"
    lines = ["seed,first,second,wins,pair_total"]
    labels = report.alternatives.labels
    for run in report.runs:
        wins = run["empirical_wins"]
        totals = run["pair_totals"]
        for a, la in enumerate(labels):
            for b, lb in enumerate(labels):
                if a != b:
                    lines.append(f"{run['seed']},{la},{lb},{wins[a][b]},{totals[a][b]}")
    _write_text(counts_path, "\n".join(lines) + "\n")
    written.append(counts_path)

    for key in sorted(report.traces):
        trace_path = directory / f"trace_{key}.csv"
        rows = ["iteration,alternative,policy_prob,mixture_prob"]
        for iteration, label, policy_prob, mixture_prob in report.traces[key]:
            rows.append(f"{iteration},{label},{policy_prob:.12g},{mixture_prob:.12g}")
        _write_text(trace_path, "\n".join(rows) + "\n")
        written.append(trace_path)

    manifest = [(path.name, _sha256(path)) for path in written]
    manifest_path = directory / "manifest.txt"
    _write_text(
        manifest_path, "".join(f"{digest}  {name}\n" for name, digest in manifest)
    )
    return manifest
