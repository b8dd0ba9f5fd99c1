"""FastAPI application exposing the library as a compute service."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import DomainError, IndeterminateComparisonError, QmahlerError
from . import handlers
from .schemas import (
    ElementRequest,
    ErrorDetail,
    ErrorResponse,
    FieldInfoRequest,
    FieldInfoResponse,
    HeightResponse,
    IdealFactorRequest,
    IdealFactorResponse,
    IdealRefineRequest,
    IdealRefineResponse,
    MeasureResponse,
    PowerReplaceRequest,
    PowerReplaceResponse,
    ReplaceRequest,
    ReplaceResponse,
    TMetricRequest,
    TMetricResponse,
    VerifyRequest,
    VerifyResponse,
)

app = FastAPI(
    title="qmahler",
    description=(
        "Exact arithmetic in quadratic number fields: heights, balancedness, "
        "ideal refinement, height-reducing replacement and t-metric Mahler measures."
    ),
    version="0.1.0",
)


def _error_response(status: int, exc: Exception) -> JSONResponse:
    body = ErrorResponse(error=ErrorDetail(type=type(exc).__name__, message=str(exc)))
    return JSONResponse(status_code=status, content=body.model_dump())


@app.exception_handler(IndeterminateComparisonError)
async def _indeterminate(request: Request, exc: IndeterminateComparisonError):
    return _error_response(409, exc)


@app.exception_handler(DomainError)
async def _domain(request: Request, exc: DomainError):
    return _error_response(400, exc)


@app.exception_handler(ZeroDivisionError)
async def _zero_division(request: Request, exc: ZeroDivisionError):
    return _error_response(400, exc)


@app.exception_handler(QmahlerError)
async def _generic(request: Request, exc: QmahlerError):
    return _error_response(400, exc)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "service": "qmahler"}


@app.post("/field/info", response_model=FieldInfoResponse)
def field_info(req: FieldInfoRequest) -> FieldInfoResponse:
    return handlers.field_info(req)


@app.post("/element/height", response_model=HeightResponse)
def element_height(req: ElementRequest) -> HeightResponse:
    return handlers.element_height(req)


@app.post("/element/measure", response_model=MeasureResponse)
def element_measure(req: ElementRequest) -> MeasureResponse:
    return handlers.element_measure(req)


@app.post("/ideal/factor", response_model=IdealFactorResponse)
def ideal_factor(req: IdealFactorRequest) -> IdealFactorResponse:
    return handlers.ideal_factor(req)


@app.post("/ideal/refine", response_model=IdealRefineResponse)
def ideal_refine(req: IdealRefineRequest) -> IdealRefineResponse:
    return handlers.ideal_refine(req)


@app.post("/replace", response_model=ReplaceResponse)
def do_replace(req: ReplaceRequest) -> ReplaceResponse:
    return handlers.do_replace(req)


@app.post("/power-replace", response_model=PowerReplaceResponse)
def do_power_replace(req: PowerReplaceRequest) -> PowerReplaceResponse:
    return handlers.do_power_replace(req)


@app.post("/tmetric", response_model=TMetricResponse)
def do_tmetric(req: TMetricRequest) -> TMetricResponse:
    return handlers.do_tmetric(req)


@app.post("/verify", response_model=VerifyResponse)
def do_verify(req: VerifyRequest) -> VerifyResponse:
    return handlers.do_verify(req)
