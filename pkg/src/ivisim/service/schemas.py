"""Pydantic request/response models of the simulation service."""
from __future__ import annotations

import math

from pydantic import BaseModel, Field, model_validator

from ..cir import CirParams
from ..experiments import ExperimentConfig, ResultRecord
from ..heston import HestonParams


class ModelParams(BaseModel):
    v0: float = Field(ge=0)
    a: float = Field(ge=0)
    b: float
    c: float
    rho: float = Field(default=0.0, ge=-1.0, le=1.0)
    s0: float = Field(default=1.0, gt=0)

    def to_heston(self) -> HestonParams:
        return HestonParams(cir=CirParams(v0=self.v0, a=self.a, b=self.b, c=self.c), rho=self.rho, s0=self.s0)


class CaseOut(ModelParams):
    case: int


class ExperimentRequest(BaseModel):
    """Shared experiment body: one of `case` / `params`, plus sweep settings."""

    case: int | None = None
    params: ModelParams | None = None
    schemes: list[str] = ["ivi"]
    quantities: list[str] = ["variance_swap"]
    steps: list[int] = [1]
    n_paths: int = 200_000
    seed: int = 1
    horizon: float = 1.0
    strikes: list[float] = [0.8, 1.0, 1.2]
    laplace_q: float = 1.0
    matched_seeds: bool = True
    threads: int | None = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.case is None) == (self.params is None):
            raise ValueError("provide exactly one of `case` or `params`")
        return self

    def to_config(self) -> ExperimentConfig:
        return ExperimentConfig(
            case=self.case,
            params=self.params.to_heston() if self.params else None,
            schemes=tuple(self.schemes),
            quantities=tuple(self.quantities),
            steps=tuple(self.steps),
            n_paths=self.n_paths,
            seed=self.seed,
            horizon=self.horizon,
            strikes=tuple(self.strikes),
            laplace_q=self.laplace_q,
            matched_seeds=self.matched_seeds,
            threads=self.threads,
        )


class PathsRequest(ExperimentRequest):
    path_counts: list[int] = [10_000, 50_000, 100_000, 200_000]


class SamplePathsRequest(ExperimentRequest):
    n_sample_paths: int = Field(default=5, ge=1, le=64)


class RecordOut(BaseModel):
    scheme: str
    case: str
    quantity: str
    n_steps: int
    n_paths: int
    estimate: float | None
    std_error: float | None
    reference: float | None
    abs_error: float | None
    wall_time_ms: float

    @classmethod
    def from_record(cls, r: ResultRecord) -> "RecordOut":
        def opt(x: float) -> float | None:
            return None if math.isnan(x) else x

        return cls(
            scheme=r.scheme,
            case=r.case,
            quantity=r.quantity,
            n_steps=r.n_steps,
            n_paths=r.n_paths,
            estimate=opt(r.estimate),
            std_error=opt(r.std_error),
            reference=opt(r.reference),
            abs_error=opt(r.abs_error),
            wall_time_ms=r.wall_time_ms,
        )

    def to_record(self) -> ResultRecord:
        def num(x: float | None) -> float:
            return math.nan if x is None else x

        return ResultRecord(
            scheme=self.scheme,
            case=self.case,
            quantity=self.quantity,
            n_steps=self.n_steps,
            n_paths=self.n_paths,
            estimate=num(self.estimate),
            std_error=num(self.std_error),
            reference=num(self.reference),
            abs_error=num(self.abs_error),
            wall_time_ms=self.wall_time_ms,
        )


class RunOut(BaseModel):
    seed: int
    numeric_failures: int
    records: list[RecordOut]


class SamplePathRowOut(BaseModel):
    scheme: str
    case: str
    path: int
    t: float
    v: float
    u_cum: float
    z_cum: float


class SamplePathsOut(BaseModel):
    seed: int
    rows: list[SamplePathRowOut]


class HealthOut(BaseModel):
    status: str
    version: str
