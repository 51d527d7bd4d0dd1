from typing import Any, Optional


class MatsumotoError(Exception):
    """Base class for every domain error raised by the library.

    ``code`` is a stable identifier printed by the CLI and returned by the API.
    """

    code: str = "MatsumotoError"

    def __init__(self, message: str = "", **context: Any):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.context = context

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


class ZeroRayError(MatsumotoError):
    code = "ZeroRay"


class DimError(MatsumotoError):
    code = "DimError"


class BackendMismatchError(MatsumotoError):
    code = "BackendMismatch"


class DegenerateProjectionError(MatsumotoError):
    code = "DegenerateProjection"


class BoundaryVertexError(MatsumotoError):
    code = "BoundaryVertex"


class OutOfWindowError(MatsumotoError):
    code = "OutOfWindow"


class AxiomViolationError(MatsumotoError):
    code = "AxiomViolation"

    def __init__(self, message: str = "", report: Optional[Any] = None, **context: Any):
        super().__init__(message, **context)
        self.report = report


class BadCoxeterMatrixError(MatsumotoError):
    code = "BadCoxeterMatrix"


class BadCartanMatrixError(MatsumotoError):
    code = "BadCartanMatrix"


class KeyCollisionError(MatsumotoError):
    code = "KeyCollision"


class OddPolygonError(MatsumotoError):
    code = "OddPolygon"


class ParseError(MatsumotoError):
    code = "ParseError"


class InvalidPathError(MatsumotoError):
    code = "InvalidPath"


class InvalidMoveError(MatsumotoError):
    code = "InvalidMove"


class NotShortestPairError(MatsumotoError):
    code = "NotShortestPair"


class CapExceededError(MatsumotoError):
    code = "CapExceeded"


class NotClosedError(MatsumotoError):
    code = "NotClosed"


class BadFanError(MatsumotoError):
    code = "BadFan"
