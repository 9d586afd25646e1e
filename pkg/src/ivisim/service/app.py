"""FastAPI service exposing the cases, reference analytics and experiment runs."""
from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..cases import CASE_IDS, builtin_case
from ..experiments import (
    ConfigError,
    run_convergence,
    run_paths_sweep,
    run_reference,
    run_smile,
    sample_path_rows,
)
from .schemas import (
    CaseOut,
    ExperimentRequest,
    HealthOut,
    PathsRequest,
    RecordOut,
    RunOut,
    SamplePathRowOut,
    SamplePathsOut,
    SamplePathsRequest,
)

app = FastAPI(
    title="ivisim",
    description="Monte Carlo benchmark service for square-root and Heston dynamics",
    version=__version__,
)


def _run(runner, req: ExperimentRequest, **kwargs) -> RunOut:
    try:
        records, failures = runner(req.to_config(), **kwargs)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return RunOut(
        seed=req.seed,
        numeric_failures=failures,
        records=[RecordOut.from_record(r) for r in records],
    )


@app.get("/health", response_model=HealthOut)
def health() -> HealthOut:
    return HealthOut(status="ok", version=__version__)


@app.get("/cases", response_model=list[CaseOut])
def cases() -> list[CaseOut]:
    out = []
    for cid in CASE_IDS:
        p = builtin_case(cid)
        out.append(
            CaseOut(case=cid, v0=p.cir.v0, a=p.cir.a, b=p.cir.b, c=p.cir.c, rho=p.rho, s0=p.s0)
        )
    return out


@app.post("/reference", response_model=RunOut)
def reference(req: ExperimentRequest) -> RunOut:
    return _run(run_reference, req)


@app.post("/converge", response_model=RunOut)
def converge(req: ExperimentRequest) -> RunOut:
    return _run(run_convergence, req)


@app.post("/smile", response_model=RunOut)
def smile(req: ExperimentRequest) -> RunOut:
    return _run(run_smile, req)


@app.post("/paths", response_model=RunOut)
def paths(req: PathsRequest) -> RunOut:
    return _run(run_paths_sweep, req, path_counts=tuple(req.path_counts))


@app.post("/samplepaths", response_model=SamplePathsOut)
def samplepaths(req: SamplePathsRequest) -> SamplePathsOut:
    try:
        rows = sample_path_rows(req.to_config(), n_paths=req.n_sample_paths)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return SamplePathsOut(
        seed=req.seed,
        rows=[
            SamplePathRowOut(scheme=r[0], case=r[1], path=r[2], t=r[3], v=r[4], u_cum=r[5], z_cum=r[6])
            for r in rows
        ],
    )
