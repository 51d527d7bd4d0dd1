from fastapi import APIRouter
from pydantic import BaseModel

from api.errors import http_error
from core.errors import MatsumotoError
from schemas.graph import GraphDocument
from schemas.path import CertificateDocument, PathDocument, VerificationResult
from services.braid import matsumoto_transform, verify_certificate
from services.generators import build_from_file
from services.serialization import certificate_from_document, certificate_to_document, path_from_document

router = APIRouter(prefix="/certificates", tags=["certificates"])
USE_API_PREFIX = True


class CertificateRequest(BaseModel):
    graph: GraphDocument
    a: PathDocument
    b: PathDocument


class CertificateCheckRequest(BaseModel):
    graph: GraphDocument
    certificate: CertificateDocument


@router.post("", response_model=CertificateDocument)
async def create_certificate(request: CertificateRequest):
    """Braid moves turning the shortest path ``a`` into the shortest path ``b``."""
    try:
        g = build_from_file(request.graph)
        a = path_from_document(g, request.a)
        b = path_from_document(g, request.b)
        return certificate_to_document(matsumoto_transform(g, a, b))
    except MatsumotoError as e:
        raise http_error(e)


@router.post("/verify", response_model=VerificationResult)
async def check_certificate(request: CertificateCheckRequest):
    try:
        g = build_from_file(request.graph)
    except MatsumotoError as e:
        raise http_error(e)
    try:
        certificate = certificate_from_document(g, request.certificate)
    except MatsumotoError as e:
        return VerificationResult(ok=False, reason=str(e))
    return verify_certificate(g, certificate)
