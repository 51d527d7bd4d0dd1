from typing import List, Optional, Tuple, Union

from pydantic import BaseModel

from schemas.backend import Backend

Coordinate = Union[str, float]


class ChamberDocument(BaseModel):
    id: int
    generators: List[List[Coordinate]]
    points: Optional[List[List[float]]] = None


class FanDocument(BaseModel):
    """Simplicial fan of chambers in the dual space; in dimension 3 ``points`` give the slice z = 1."""

    ambient_dim: int
    backend: Backend
    base: Optional[int] = None
    chambers: List[ChamberDocument]
    open_walls: List[Tuple[int, int]] = []
    adjacency: List[Tuple[int, int]] = []
    notes: List[str] = []
