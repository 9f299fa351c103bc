"""HTTP service exposing the aggregation pipeline.

Endpoints are stateless: profiles and configs travel inline in the request,
results come back as JSON.  The CLI is a thin client of this app; it can
also be served standalone for multi-client use.
"""

from __future__ import annotations

from typing import Optional, Union

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .experiment import (
    ExperimentConfig,
    ExperimentReport,
    compare_iia,
    run_experiment,
)
from .prefs import PreferenceProfile, margin_matrix, pairwise_counts
from .solver import maximal_lottery_lp, verify_maximality
from .voting import (
    borda_scores,
    condorcet_winner,
    majority_candidates,
    random_dictatorship,
    smith_set,
)


class GroupModel(BaseModel):
    ranking: list[str]
    weight: Union[int, str, float]


class ProfileModel(BaseModel):
    alternatives: list[str]
    groups: list[GroupModel]

    def to_profile(self) -> PreferenceProfile:
        return PreferenceProfile.from_json_dict(self.model_dump())


class SolveRequest(BaseModel):
    profile: ProfileModel


class MaximalityModel(BaseModel):
    worst_column_payoff: float
    is_maximal: bool
    game_value: float


class SolveResponse(BaseModel):
    lottery: dict[str, float]
    maximality: MaximalityModel
    borda_raw: dict[str, float]
    majority_winner: Optional[str]
    condorcet_winner: Optional[str]
    smith_set: list[str]
    random_dictatorship: dict[str, float]


class RunRequest(BaseModel):
    population: ProfileModel
    dataset_size: int = 2048
    seeds: list[int] = Field(default_factory=lambda: [0])
    methods: Optional[list[str]] = None
    prompt_id: str = "prompt-0"
    prompt_text: Optional[str] = None
    spo: Optional[dict] = None
    btl: Optional[dict] = None

    def to_config(self) -> ExperimentConfig:
        data = {
            "population": self.population.model_dump(),
            "dataset_size": self.dataset_size,
            "seeds": self.seeds,
            "prompt_id": self.prompt_id,
        }
        if self.methods is not None:
            data["methods"] = self.methods
        if self.prompt_text is not None:
            data["prompt_text"] = self.prompt_text
        if self.spo is not None:
            data["spo"] = self.spo
        if self.btl is not None:
            data["btl"] = self.btl
        return ExperimentConfig.from_json_dict(data)


class CompareIIARequest(BaseModel):
    small: dict
    large: dict
    shared: list[str]


class HealthResponse(BaseModel):
    status: str
    version: str


def create_app() -> FastAPI:
    app = FastAPI(title="maxlot", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/solve", response_model=SolveResponse)
    def solve(request: SolveRequest) -> SolveResponse:
        try:
            profile = request.profile.to_profile()
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        counts = pairwise_counts(profile)
        margins = margin_matrix(counts)
        lottery = maximal_lottery_lp(margins)
        report = verify_maximality(margins, lottery)
        labels = profile.alternatives.labels
        majority = majority_candidates(profile)
        condorcet = condorcet_winner(counts)
        return SolveResponse(
            lottery=lottery.as_dict(),
            maximality=MaximalityModel(
                worst_column_payoff=report.worst_column_payoff,
                is_maximal=report.is_maximal,
                game_value=report.game_value,
            ),
            borda_raw={
                label: float(s)
                for label, s in zip(labels, borda_scores(counts).scores)
            },
            majority_winner=labels[majority[0]] if majority else None,
            condorcet_winner=labels[condorcet] if condorcet is not None else None,
            smith_set=sorted(labels[a] for a in smith_set(counts)),
            random_dictatorship=random_dictatorship(profile).as_dict(),
        )

    @app.post("/experiments/run")
    def run(request: RunRequest) -> dict:
        try:
            config = request.to_config()
        except (ValueError, KeyError, TypeError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        report = run_experiment(config)
        return report.to_dict(include_traces=True)

    @app.post("/experiments/compare-iia")
    def compare(request: CompareIIARequest) -> dict:
        try:
            small = ExperimentReport.from_dict(request.small)
            large = ExperimentReport.from_dict(request.large)
            return compare_iia(small, large, request.shared)
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    return app


app = create_app()
