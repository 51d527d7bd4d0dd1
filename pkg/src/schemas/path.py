from typing import List, Optional

from pydantic import BaseModel


class PathDocument(BaseModel):
    start: int
    roots: List[int] = []


class MoveDocument(BaseModel):
    pos: int
    m: int
    replacement: List[int]


class CertificateDocument(BaseModel):
    source: PathDocument
    target: PathDocument
    moves: List[MoveDocument] = []


class VerificationResult(BaseModel):
    """Outcome of replaying a certificate; truthy iff every move applied and the target was reached."""

    ok: bool
    failed_at: Optional[int] = None
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok
