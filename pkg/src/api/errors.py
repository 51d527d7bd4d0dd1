from fastapi import HTTPException

from core.errors import AxiomViolationError, MatsumotoError


def http_error(e: MatsumotoError) -> HTTPException:
    """HTTP error for a domain error: 422 with the report for axiom failures, 400 otherwise."""
    detail = {"code": e.code, "detail": e.message}
    if isinstance(e, AxiomViolationError):
        if e.report is not None:
            detail["report"] = e.report.model_dump()
        return HTTPException(status_code=422, detail=detail)
    return HTTPException(status_code=400, detail=detail)
