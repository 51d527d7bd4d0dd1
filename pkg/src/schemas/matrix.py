from enum import Enum
from typing import List

from pydantic import BaseModel, model_validator


class MatrixKind(str, Enum):
    COXETER = "coxeter"
    CARTAN = "cartan"

    def __str__(self):
        return self.value


class MatrixDocument(BaseModel):
    """Coxeter or Cartan matrix input; in coxeter documents 0 stands for infinity."""

    type: MatrixKind
    n: int
    entries: List[List[int]]

    @model_validator(mode="after")
    def check_shape(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if len(self.entries) != self.n or any(len(row) != self.n for row in self.entries):
            raise ValueError(f"entries must be a {self.n}x{self.n} matrix")
        return self
