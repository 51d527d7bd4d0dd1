from typing import List, Optional, Union

from fastapi import APIRouter
from pydantic import BaseModel

from api.errors import http_error
from core.errors import MatsumotoError
from schemas.coloring import ColoringDocument
from schemas.graph import GraphDocument
from services.coloring import global_coloring
from services.generators import build_from_file
from services.serialization import coloring_to_document

router = APIRouter(prefix="/colorings", tags=["colorings"])
USE_API_PREFIX = True


class ColoringRequest(BaseModel):
    graph: GraphDocument
    palette: Optional[List[Union[int, str]]] = None


@router.post("", response_model=ColoringDocument)
async def color_graph(request: ColoringRequest):
    """Global edge coloring; the document carries a witness walk instead when holonomy is nontrivial."""
    try:
        g = build_from_file(request.graph)
        return coloring_to_document(g, global_coloring(g, request.palette))
    except MatsumotoError as e:
        raise http_error(e)
