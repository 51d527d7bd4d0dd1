from typing import Dict, List, Optional, Union

from pydantic import BaseModel

Color = Union[int, str]


class ColoringDocument(BaseModel):
    """Edge coloring keyed by edge id: ``"u-w"`` for compact edges (u < w), ``"u:i"`` for slot i of u otherwise."""

    palette: List[Color]
    edges: Dict[str, Color] = {}
    witness: Optional[List[int]] = None
