"""
HTTP endpoints for codes and protocol files
"""
from typing import Optional

from fastapi import APIRouter, File, HTTPException, UploadFile
from fastapi.responses import Response
from pydantic import BaseModel

from dialoglens import __version__
from dialoglens.core.config import build_run_config, settings
from dialoglens.core.exceptions import CodeParseError, ConfigError, DialogLensError, ProtocolLoadError
from dialoglens.corpus import check_referential_integrity, parse_protocol
from dialoglens.models.lag import SequenceLevel
from dialoglens.models.protocol import Protocol
from dialoglens.models.report import Report
from dialoglens.report import build_report
from dialoglens.scheme import builtin_trm_scheme, format_code, parse_code, validate_code
from dialoglens.utils.excel import report_excel_bytes

router = APIRouter(prefix=settings.API_PREFIX, tags=["protocols"])


class CodeRequest(BaseModel):
    code: str
    strict: bool = True


async def _read_protocol(file: UploadFile) -> Protocol:
    content = await file.read()
    if len(content) > settings.MAX_UPLOAD_SIZE:
        raise HTTPException(status_code=413, detail=f"File larger than {settings.MAX_UPLOAD_SIZE} bytes")
    try:
        text = content.decode("utf-8")
    except UnicodeDecodeError:
        raise HTTPException(status_code=400, detail="Protocol must be UTF-8 text")
    try:
        return parse_protocol(text, source=file.filename)
    except ProtocolLoadError as e:
        raise HTTPException(
            status_code=422,
            detail={"message": e.detail, "issues": [str(issue) for issue in e.issues]},
        )


@router.get("/scheme")
async def get_scheme():
    """The built-in technical review meeting scheme"""
    return builtin_trm_scheme().model_dump(mode="json")


@router.post("/codes/parse")
async def parse_code_endpoint(request: CodeRequest):
    """
    Parse one code string
    Returns the canonical form plus any legality violations
    """
    scheme = builtin_trm_scheme()
    try:
        code = parse_code(request.code, scheme, strict=request.strict)
    except CodeParseError as e:
        raise HTTPException(
            status_code=422,
            detail={"kind": e.kind.value, "position": e.position, "message": e.detail},
        )
    return {
        "canonical": format_code(code),
        "code": code.model_dump(mode="json"),
        "violations": [v.model_dump(mode="json") for v in validate_code(code, scheme)],
    }


@router.post("/protocols/validate")
async def validate_protocol(file: UploadFile = File(...)):
    protocol = await _read_protocol(file)
    integrity = check_referential_integrity(protocol)
    return {
        "meeting_id": protocol.meeting_id,
        "episodes": len(protocol),
        "ok": integrity.ok,
        "integrity": integrity.model_dump(mode="json"),
    }


async def _report(file: UploadFile, fmt: str, **flags) -> Report:
    protocol = await _read_protocol(file)
    try:
        config = build_run_config("report", protocol_path=file.filename, format=fmt, **flags)
        return build_report(protocol, config)
    except ConfigError as e:
        raise HTTPException(status_code=400, detail=e.detail)
    except DialogLensError as e:
        raise HTTPException(status_code=422, detail=e.detail)


@router.post("/protocols/report")
async def protocol_report(
    file: UploadFile = File(...),
    lag: Optional[int] = None,
    alpha: Optional[float] = None,
    level: SequenceLevel = SequenceLevel.DISCUSS,
    seed: int = 0,
):
    """Full analysis bundle of an uploaded protocol"""
    report = await _report(file, "json", level=level, lag=lag, alpha=alpha, seed=seed)
    return report.model_dump(mode="json")


@router.post("/protocols/report/export")
async def export_protocol_report(
    file: UploadFile = File(...),
    lag: Optional[int] = None,
    alpha: Optional[float] = None,
    level: SequenceLevel = SequenceLevel.DISCUSS,
):
    """
    Export the analysis bundle to Excel, one sheet per table
    """
    report = await _report(file, "xlsx", level=level, lag=lag, alpha=alpha)
    return Response(
        content=report_excel_bytes(report),
        media_type="application/vnd.openxmlformats-officedocument.spreadsheetml.sheet",
        headers={"Content-Disposition": f'attachment; filename="{report.meeting_id}_report.xlsx"'},
    )


@router.get("/health")
async def health_check():
    return {"status": "healthy", "version": __version__}
