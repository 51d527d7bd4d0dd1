from typing import List, Optional, Union

from pydantic import BaseModel, model_serializer

from schemas.backend import Backend


class RootDocument(BaseModel):
    id: int
    coords: List[Union[str, float]]
    invertible: bool
    neg: Optional[int] = None


class SlotDocument(BaseModel):
    via: int
    to: Optional[int] = None
    infinite: bool = False

    @model_serializer
    def serialize(self):
        if self.infinite:
            return {"via": self.via, "infinite": True}
        return {"via": self.via, "to": self.to}


class VertexDocument(BaseModel):
    id: int
    interior: bool
    basis: List[int]
    slots: List[SlotDocument]


class GraphDocument(BaseModel):
    dim: int
    backend: Backend
    base: int
    roots: List[RootDocument]
    vertices: List[VertexDocument]
    metric: Optional[List[List[float]]] = None
    notes: List[str] = []
