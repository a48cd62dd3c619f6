from __future__ import annotations

from pathlib import Path
from typing import Any, Literal

from fastapi import APIRouter, File, HTTPException, UploadFile
from pydantic import BaseModel, Field

from ..psi import KERNEL_VERSION
from ..psi.checker import synthesize
from ..psi.corpus import RULE_TYPE_ERROR, Finding, check_source
from ..psi.errors import ParseError, PsiTypeError
from ..psi.iso import prime_factors, types_isomorphic
from ..psi.parser import (
    decode_source,
    load_source,
    parse_bindings,
    parse_source,
    parse_term,
    parse_type,
)
from ..psi.printer import format_type
from ..psi.rewrite import Strategy, normalize
from ..psi.syntax import Type
from ..psi.traces import trace_document
from ..settings import get_settings

router = APIRouter(prefix="/psi", tags=["psi"])

GOLDEN_DIR = Path(__file__).resolve().parents[2] / "samples" / "golden"


class TermRequest(BaseModel):
    term: str
    ctx: str = ""


class IsoRequest(BaseModel):
    left: str
    right: str


class PrimeRequest(BaseModel):
    type: str


class EvalRequest(TermRequest):
    strategy: Literal["deterministic", "exhaustive"] = "deterministic"
    budget: int | None = Field(None, gt=0)


def _parse_failure(exc: ParseError) -> HTTPException:
    return HTTPException(status_code=422, detail=exc.as_dict())


def _primes(a: Type) -> list[str]:
    return [format_type(p.denote()) for p in prime_factors(a)]


@router.post("/check")
async def psi_check(request: TermRequest) -> dict[str, Any]:
    try:
        ctx = parse_bindings(request.ctx)
        term = parse_term(request.term, ctx)
    except ParseError as exc:
        raise _parse_failure(exc) from exc
    try:
        ty = synthesize(ctx, term)
    except PsiTypeError as exc:
        finding = Finding("term", str(exc), "error", RULE_TYPE_ERROR, exc.as_dict())
        return {
            "status": "fail",
            "findings": [finding.as_dict()],
            "kernel_version": KERNEL_VERSION,
        }
    return {
        "status": "pass",
        "type": format_type(ty),
        "findings": [],
        "kernel_version": KERNEL_VERSION,
    }


@router.post("/iso")
async def psi_iso(request: IsoRequest) -> dict[str, Any]:
    try:
        left, right = parse_type(request.left), parse_type(request.right)
    except ParseError as exc:
        raise _parse_failure(exc) from exc
    return {
        "isomorphic": types_isomorphic(left, right),
        "left_primes": _primes(left),
        "right_primes": _primes(right),
    }


@router.post("/pf")
async def psi_pf(request: PrimeRequest) -> dict[str, Any]:
    try:
        return {"primes": _primes(parse_type(request.type))}
    except ParseError as exc:
        raise _parse_failure(exc) from exc


@router.post("/eval")
async def psi_eval(request: EvalRequest) -> dict[str, Any]:
    settings = get_settings()
    budget = request.budget or settings.default_budget
    try:
        ctx = parse_bindings(request.ctx)
        term = parse_term(request.term, ctx)
    except ParseError as exc:
        raise _parse_failure(exc) from exc
    try:
        synthesize(ctx, term)
    except PsiTypeError as exc:
        raise HTTPException(status_code=422, detail=exc.as_dict()) from exc
    strategy = Strategy(request.strategy)
    traces = normalize(term, strategy, budget, max_steps=settings.max_steps)
    return trace_document(term, traces, strategy, class_budget=budget, max_steps=settings.max_steps)


@router.post("/check-file")
async def psi_check_file(file: UploadFile = File(...)) -> dict[str, Any]:  # noqa: B008
    filename = file.filename or ""
    if not filename.lower().endswith(".psi"):
        raise HTTPException(status_code=422, detail="Upload a .psi source file")
    data = await file.read()
    try:
        source = parse_source(decode_source(data))
    except ParseError as exc:
        raise _parse_failure(exc) from exc
    settings = get_settings()
    report = check_source(source, budget=settings.default_budget, max_steps=settings.max_steps)
    return {"file": filename, **report.as_dict()}


@router.get("/demo")
async def psi_demo() -> dict[str, Any]:
    paths = sorted(GOLDEN_DIR.glob("*.psi"))
    if not paths:
        raise HTTPException(status_code=404, detail="Golden corpus not available")
    settings = get_settings()
    reports = {
        path.name: check_source(
            load_source(path), budget=settings.default_budget, max_steps=settings.max_steps
        ).as_dict()
        for path in paths
    }
    status = "pass" if all(r["status"] == "pass" for r in reports.values()) else "fail"
    return {"status": status, "files": reports, "kernel_version": KERNEL_VERSION}
