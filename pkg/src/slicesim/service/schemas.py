"""Request and response bodies for the HTTP API."""
from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator

Algo = Literal["dansm", "mga", "ffd", "bfd"]


class ScenarioRef(BaseModel):
    """A scenario given inline as YAML text or by bundled name."""

    scenario: str | None = Field(default=None, description="YAML scenario document")
    scenario_name: str | None = Field(default=None, description="bundled scenario, e.g. paper_replica")

    @model_validator(mode="after")
    def _one_source(self):
        if (self.scenario is None) == (self.scenario_name is None):
            raise ValueError("give exactly one of 'scenario' or 'scenario_name'")
        return self


class SimulateRequest(ScenarioRef):
    algo: Algo = "dansm"
    seed: int | None = None


class CompareRequest(ScenarioRef):
    algos: list[Algo] = Field(default=["dansm", "mga", "ffd", "bfd"], min_length=1)
    seeds: list[int] = Field(default=[1], min_length=1)
    include_runs: bool = False


class CompareResponse(BaseModel):
    summary: dict
    table: str
    plot_data: dict[str, str]
    runs: dict[str, dict] = {}


class OracleRequest(BaseModel):
    instance: str
    max_ues: int = Field(default=8, ge=1)
    max_upfs: int = Field(default=6, ge=1)


class OracleResponse(BaseModel):
    choices: list[int]
    matrix: list[list[int]]
    value: float


class PlotDataRequest(BaseModel):
    reports: list[dict] = Field(min_length=0)


class PlotDataResponse(BaseModel):
    files: dict[str, str]


class Health(BaseModel):
    status: str = "ok"
    algorithms: list[str]
