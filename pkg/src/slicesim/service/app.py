from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse, PlainTextResponse

from ..compare import compare
from ..engine import run
from ..errors import ConfigError, SliceSimError, TooLarge
from ..oracle import brute_force_min
from ..report import SimReport, plot_tables
from ..scenario import bundled_text, load_scenario_text, static_instance
from ..schedulers import SCHEDULERS
from .schemas import (
    CompareRequest,
    CompareResponse,
    Health,
    OracleRequest,
    OracleResponse,
    PlotDataRequest,
    PlotDataResponse,
    ScenarioRef,
    SimulateRequest,
)


def _config(ref: ScenarioRef):
    if ref.scenario_name is not None:
        return load_scenario_text(bundled_text(ref.scenario_name), ref.scenario_name)
    return load_scenario_text(ref.scenario, "<request>")


def create_app() -> FastAPI:
    app = FastAPI(title="slicesim", version="0.1.0")

    @app.exception_handler(SliceSimError)
    async def _domain_error(request, exc: SliceSimError):
        status = 413 if isinstance(exc, TooLarge) else 422
        body = {"error": type(exc).__name__, "detail": str(exc)}
        if isinstance(exc, ConfigError):
            body.update(path=exc.path, line=exc.line)
        return JSONResponse(status_code=status, content=body)

    @app.get("/health", response_model=Health)
    def health():
        return Health(algorithms=list(SCHEDULERS))

    @app.get("/scenarios/{name}", response_class=PlainTextResponse)
    def scenario_text(name: str):
        try:
            return bundled_text(name)
        except ConfigError as exc:
            raise HTTPException(404, str(exc)) from None

    # plain-text JSON keeps the byte layout identical to SimReport.to_json
    @app.post("/simulate")
    def simulate(req: SimulateRequest):
        report = run(_config(req), req.algo, req.seed)
        return PlainTextResponse(report.to_json(), media_type="application/json")

    @app.post("/compare", response_model=CompareResponse)
    def compare_runs(req: CompareRequest):
        summary = compare(_config(req), req.algos, req.seeds)
        runs = {}
        if req.include_runs:
            runs = {f"{a}/{s}": rep.to_dict() for (a, s), rep in summary.reports.items()}
        return CompareResponse(summary=summary.to_dict(), table=summary.table(),
                               plot_data=summary.plot_tables(), runs=runs)

    @app.post("/oracle", response_model=OracleResponse)
    def oracle(req: OracleRequest):
        inst = static_instance(load_scenario_text(req.instance, "<instance>"))
        choices, value = brute_force_min(inst, req.max_ues, req.max_upfs)
        matrix = inst.state(choices).x.astype(int).tolist()
        return OracleResponse(choices=list(choices), matrix=matrix, value=value)

    @app.post("/plot-data", response_model=PlotDataResponse)
    def plot_data(req: PlotDataRequest):
        try:
            reports = [SimReport.from_dict(r) for r in req.reports]
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(422, f"malformed report: {exc}") from None
        return PlotDataResponse(files=plot_tables(reports))

    return app


app = create_app()
