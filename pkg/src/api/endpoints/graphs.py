import logging
from typing import Optional

from fastapi import APIRouter, File, Query, UploadFile
from pydantic import BaseModel

from api.errors import http_error
from core.errors import BadCartanMatrixError, MatsumotoError
from schemas.backend import Backend
from schemas.graph import GraphDocument
from schemas.matrix import MatrixDocument
from schemas.report import AxiomReport
from services.axioms import check_axioms
from services.generators import (
    CartanMatrix,
    build_cayley,
    build_from_file,
    build_weyl,
    coxeter_from_cartan,
    matrix_from_document,
)
from services.graph_model import distance, distance_geometric
from services.serialization import graph_to_document, parse_document

router = APIRouter(prefix="/graphs", tags=["graphs"])
USE_API_PREFIX = True

logger = logging.getLogger(__name__)


class DistanceRequest(BaseModel):
    graph: GraphDocument
    v: int
    w: int


class DistanceResponse(BaseModel):
    bfs: int
    geometric: int
    agree: bool


@router.post("/coxeter", response_model=GraphDocument)
async def generate_coxeter(
    matrix: MatrixDocument,
    radius: Optional[int] = Query(None, ge=0),
    backend: Backend = Query(Backend.FLOAT),
):
    """Cayley graph of a Coxeter group; Cartan matrices are converted to their Coxeter matrix."""
    try:
        parsed = matrix_from_document(matrix)
        if isinstance(parsed, CartanMatrix):
            parsed = coxeter_from_cartan(parsed)
        return graph_to_document(build_cayley(parsed, radius=radius, backend=backend))
    except MatsumotoError as e:
        raise http_error(e)


@router.post("/weyl", response_model=GraphDocument)
async def generate_weyl(matrix: MatrixDocument, radius: Optional[int] = Query(None, ge=0)):
    try:
        parsed = matrix_from_document(matrix)
        if not isinstance(parsed, CartanMatrix):
            raise BadCartanMatrixError("a Cartan matrix is required")
        return graph_to_document(build_weyl(parsed, radius=radius))
    except MatsumotoError as e:
        raise http_error(e)


@router.post("/verify", response_model=AxiomReport)
async def verify_graph(graph: GraphDocument):
    try:
        return check_axioms(build_from_file(graph, verify=False))
    except MatsumotoError as e:
        raise http_error(e)


@router.post("/verify/upload", response_model=AxiomReport)
async def verify_graph_upload(file: UploadFile = File(...)):
    content = await file.read()
    logger.info(f"Verifying uploaded graph {file.filename} ({len(content)} bytes)")
    try:
        doc = parse_document(content, GraphDocument)
        return check_axioms(build_from_file(doc, verify=False))
    except MatsumotoError as e:
        raise http_error(e)


@router.post("/distance", response_model=DistanceResponse)
async def graph_distance(request: DistanceRequest):
    try:
        g = build_from_file(request.graph)
        bfs = distance(g, request.v, request.w)
        geometric = distance_geometric(g, request.v, request.w)
    except MatsumotoError as e:
        raise http_error(e)
    return DistanceResponse(bfs=bfs, geometric=geometric, agree=bfs == geometric)
