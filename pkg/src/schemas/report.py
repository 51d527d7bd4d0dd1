from typing import List

from pydantic import BaseModel, computed_field


class AxiomCheck(BaseModel):
    name: str
    passed: bool
    checked: int = 0
    witnesses: List[str] = []


class AxiomReport(BaseModel):
    window_sound: bool
    vertices: int
    interior_vertices: int
    roots: int
    checks: List[AxiomCheck]
    notes: List[str] = []

    @computed_field
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, name: str) -> AxiomCheck:
        for item in self.checks:
            if item.name == name:
                return item
        raise KeyError(name)
