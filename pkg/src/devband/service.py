"""HTTP service exposing the construction, verification and optimization
pipelines.  Responses are the same JSON reports the CLI writes; artifact
payloads (OBJ/SVG/CSV text) are returned inline on request.
"""

from __future__ import annotations

import math
import pathlib
import tempfile

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .band import BandParams, max_diameter, max_width
from .errors import DevbandError, LostTopology
from .strip import export_obj, export_svg


class ConstructRequest(BaseModel):
    l: float = Field(3.0, gt=0, description="midline length")
    d: float = Field(0.3, description="rod diameter of the large cylinder")
    b: float = Field(0.1, ge=0, description="strip half-width")
    n: int = Field(600, ge=12, description="midline samples, multiple of 6")
    convention: str = Field("principal", pattern="^(principal|mean)$")
    include_artifacts: bool = False


class VerifyRequest(BaseModel):
    l: float = Field(3.0, gt=0)
    d: float = Field(0.3)
    b: float = Field(0.1, ge=0)
    n: int = Field(600, ge=12)
    convention: str = Field("principal", pattern="^(principal|mean)$")


class OptimizeRequest(BaseModel):
    l: float = Field(3.0, gt=0)
    n: int = Field(240, ge=24)
    iters: int = Field(2000, ge=0)
    eps: float | None = Field(None, ge=0)
    seed: int = 0
    include_artifacts: bool = False


class Artifacts(BaseModel):
    mesh_obj: str | None = None
    flat_svg: str | None = None
    midline_csv: str | None = None
    trace_csv: str | None = None


class ReportResponse(BaseModel):
    report: dict
    artifacts: Artifacts | None = None


class LimitsResponse(BaseModel):
    l: float
    d: float | None
    d_max: float
    b_max: float | None
    narrow_limit_energy: float


app = FastAPI(title="devband",
              description="Developable Moebius band: exact three-cylinder "
                          "construction and narrow-band energy minimization.")


def _export_text(export, payload) -> str:
    with tempfile.TemporaryDirectory() as td:
        path = pathlib.Path(td) / "artifact"
        export(payload, path)
        return path.read_text()


def _obj_text(mesh) -> str:
    return _export_text(export_obj, mesh)


def _svg_text(layout) -> str:
    return _export_text(export_svg, layout)


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.get("/limits", response_model=LimitsResponse)
def limits(l: float = 3.0, d: float | None = None):
    if l <= 0:
        raise HTTPException(422, detail=f"l must be positive, got {l}")
    dmax = max_diameter(l)
    bmax = None
    if d is not None:
        if not (0 < d <= dmax):
            raise HTTPException(
                422, detail=f"d = {d:.7g} outside (0, {dmax:.7g}]")
        bmax = max_width(l, d)
    return LimitsResponse(l=l, d=d, d_max=dmax, b_max=bmax,
                          narrow_limit_energy=15.0 * math.pi ** 2 / l)


@app.post("/construct", response_model=ReportResponse,
          response_model_exclude_none=True)
def construct(req: ConstructRequest):
    from . import pipeline
    params = BandParams(l=req.l, d=req.d, b=req.b, n=req.n)
    try:
        report, art = pipeline.run_construct(params,
                                             convention=req.convention)
    except DevbandError as exc:
        raise HTTPException(422, detail=str(exc))
    artifacts = None
    if req.include_artifacts:
        artifacts = Artifacts(mesh_obj=_obj_text(art.mesh),
                              flat_svg=_svg_text(art.layout),
                              midline_csv=art.curve.to_csv())
    return ReportResponse(report=report, artifacts=artifacts)


@app.post("/verify", response_model=ReportResponse,
          response_model_exclude_none=True)
def verify(req: VerifyRequest):
    from . import pipeline
    params = BandParams(l=req.l, d=req.d, b=req.b, n=req.n)
    try:
        report, _ = pipeline.run_verify(params, convention=req.convention)
    except DevbandError as exc:
        raise HTTPException(422, detail=str(exc))
    return ReportResponse(report=report)


@app.post("/optimize", response_model=ReportResponse,
          response_model_exclude_none=True)
def optimize(req: OptimizeRequest):
    from . import pipeline
    try:
        report, art = pipeline.run_optimize(req.l, req.n, req.iters,
                                            eps=req.eps, seed=req.seed)
    except LostTopology as exc:
        raise HTTPException(409, detail=str(exc))
    except DevbandError as exc:
        raise HTTPException(422, detail=str(exc))
    artifacts = None
    if req.include_artifacts:
        artifacts = Artifacts(
            trace_csv=art.trace_csv,
            mesh_obj=_obj_text(art.mesh) if art.mesh is not None else None,
            midline_csv=art.curve.to_csv() if art.curve is not None else None)
    return ReportResponse(report=report, artifacts=artifacts)
