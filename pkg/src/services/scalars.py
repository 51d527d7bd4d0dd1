"""Scalar backends, rays and simplicial cones.

Two backends are supported: exact rationals (``fractions.Fraction``) and
binary64 floats compared against a global tolerance. A graph fixes one
backend for all of its rays; mixing them is an error.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from core.config import settings
from core.errors import (
    BackendMismatchError,
    DegenerateProjectionError,
    DimError,
    ZeroRayError,
)
from schemas.backend import Backend

logger = logging.getLogger(__name__)

Scalar = Union[Fraction, float]
Vector = Tuple[Scalar, ...]


class ScalarBackend(ABC):
    kind: Backend

    @abstractmethod
    def coerce(self, value) -> Scalar:
        ...

    def vector(self, values: Sequence) -> Vector:
        return tuple(self.coerce(v) for v in values)

    @abstractmethod
    def canonical(self, vec: Sequence[Scalar]) -> Vector:
        """Canonical representative of the ray through ``vec``."""

    @abstractmethod
    def key(self, canonical_vec: Vector) -> tuple:
        ...

    @abstractmethod
    def solve_in_span(
        self, gens: Sequence[Sequence[Scalar]], vec: Sequence[Scalar]
    ) -> Optional[List[Scalar]]:
        """Coefficients expressing ``vec`` in ``gens``, or None outside their span."""

    @abstractmethod
    def rank(self, vectors: Sequence[Sequence[Scalar]]) -> int:
        ...

    @abstractmethod
    def nonneg(self, x: Scalar) -> bool:
        ...

    @abstractmethod
    def negative(self, x: Scalar) -> bool:
        ...

    @abstractmethod
    def is_zero(self, x: Scalar) -> bool:
        ...

    @abstractmethod
    def same(self, u: Vector, v: Vector) -> bool:
        """Whether two canonical vectors describe the same ray."""

    @abstractmethod
    def format(self, x: Scalar) -> Union[str, float]:
        ...

    def dot(self, u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
        return sum((a * b for a, b in zip(u, v)), self.coerce(0))


class RationalBackend(ScalarBackend):
    kind = Backend.RATIONAL

    def coerce(self, value) -> Fraction:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, str):
            return Fraction(value.strip())
        return Fraction(value)

    def canonical(self, vec: Sequence[Scalar]) -> Vector:
        coords = [self.coerce(x) for x in vec]
        if all(x == 0 for x in coords):
            raise ZeroRayError("cannot form a ray from the zero vector")
        scale = math.lcm(*(x.denominator for x in coords))
        ints = [int(x * scale) for x in coords]
        g = math.gcd(*ints)
        return tuple(Fraction(i // g) for i in ints)

    def key(self, canonical_vec: Vector) -> tuple:
        return tuple(int(x) for x in canonical_vec)

    def _eliminate(self, rows: List[List[Fraction]], ncols: int) -> List[int]:
        """In-place Gauss-Jordan elimination; returns the pivot columns."""
        pivots = []
        r = 0
        for c in range(ncols):
            pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
            if pivot is None:
                continue
            rows[r], rows[pivot] = rows[pivot], rows[r]
            lead = rows[r][c]
            rows[r] = [x / lead for x in rows[r]]
            for i in range(len(rows)):
                if i != r and rows[i][c] != 0:
                    factor = rows[i][c]
                    rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == len(rows):
                break
        return pivots

    def solve_in_span(self, gens, vec):
        k = len(gens)
        d = len(vec)
        rows = [[self.coerce(g[i]) for g in gens] + [self.coerce(vec[i])] for i in range(d)]
        pivots = self._eliminate(rows, k)
        for row in rows[len(pivots):]:
            if row[k] != 0:
                return None
        coeffs = [Fraction(0)] * k
        for r, c in enumerate(pivots):
            coeffs[c] = rows[r][k]
        return coeffs

    def rank(self, vectors):
        if not vectors:
            return 0
        rows = [[self.coerce(x) for x in v] for v in vectors]
        return len(self._eliminate(rows, len(rows[0])))

    def nonneg(self, x) -> bool:
        return x >= 0

    def negative(self, x) -> bool:
        return x < 0

    def is_zero(self, x) -> bool:
        return x == 0

    def same(self, u, v) -> bool:
        return self.key(u) == self.key(v)

    def format(self, x) -> str:
        x = self.coerce(x)
        return f"{x.numerator}/{x.denominator}"


class FloatBackend(ScalarBackend):
    kind = Backend.FLOAT

    def __init__(self, tol: Optional[float] = None, digits: Optional[int] = None):
        self.tol = settings.MK_TOL if tol is None else tol
        self.digits = settings.MK_KEY_DIGITS if digits is None else digits

    def coerce(self, value) -> float:
        if isinstance(value, str):
            return float(Fraction(value.strip()))
        return float(value)

    def canonical(self, vec):
        arr = np.asarray([self.coerce(x) for x in vec], dtype=float)
        norm = float(np.linalg.norm(arr))
        if norm <= self.tol:
            raise ZeroRayError("cannot form a ray from the zero vector")
        return tuple(float(x) for x in arr / norm)

    def key(self, canonical_vec):
        # +0.0 folds negative zero into zero
        return tuple(round(x, self.digits) + 0.0 for x in canonical_vec)

    def solve_in_span(self, gens, vec):
        b = np.asarray(vec, dtype=float)
        scale = max(1.0, float(np.linalg.norm(b)))
        if not gens:
            return [] if float(np.linalg.norm(b)) <= self.tol * scale else None
        a = np.asarray(gens, dtype=float).T
        coeffs, *_ = np.linalg.lstsq(a, b, rcond=None)
        residual = float(np.linalg.norm(a @ coeffs - b))
        if residual > self.tol * scale:
            return None
        return [float(c) for c in coeffs]

    def rank(self, vectors):
        if not vectors:
            return 0
        return int(np.linalg.matrix_rank(np.asarray(vectors, dtype=float), tol=self.tol))

    def nonneg(self, x) -> bool:
        return x >= -self.tol

    def negative(self, x) -> bool:
        return x < -self.tol

    def is_zero(self, x) -> bool:
        return abs(x) <= self.tol

    def same(self, u, v) -> bool:
        if self.key(u) == self.key(v):
            return True
        atol = max(self.tol, 10.0 ** (-self.digits)) * 10
        return bool(np.allclose(u, v, rtol=0.0, atol=atol))

    def format(self, x) -> float:
        return float(x)


_RATIONAL = RationalBackend()


def get_backend(kind: Union[Backend, str, ScalarBackend]) -> ScalarBackend:
    """Backend instance for ``kind``; float backends pick up the current tolerance."""
    if isinstance(kind, ScalarBackend):
        return kind
    if Backend(kind) is Backend.RATIONAL:
        return _RATIONAL
    return FloatBackend()


def infer_backend(values: Sequence) -> Backend:
    if any(isinstance(x, (float, np.floating)) for x in values):
        return Backend.FLOAT
    return Backend.RATIONAL


@dataclass(frozen=True)
class Ray:
    """A closed ray R>=0 * dir, identified by its canonical key."""

    dir: Vector = field(compare=False)
    key: tuple
    backend: Backend

    @property
    def dim(self) -> int:
        return len(self.dir)

    def __neg__(self) -> "Ray":
        return canonicalize([-x for x in self.dir], self.backend)


def canonicalize(v: Sequence, backend: Optional[Union[Backend, str, ScalarBackend]] = None) -> Ray:
    if backend is None:
        backend = infer_backend(v)
    impl = get_backend(backend)
    canon = impl.canonical(impl.vector(v))
    return Ray(dir=canon, key=impl.key(canon), backend=impl.kind)


def _check_compatible(rays: Sequence[Ray], dim: Optional[int] = None) -> Tuple[Backend, int]:
    kinds = {r.backend for r in rays}
    if len(kinds) > 1:
        raise BackendMismatchError(f"mixed backends {sorted(k.value for k in kinds)}")
    dims = {r.dim for r in rays}
    if dim is not None:
        dims.add(dim)
    if len(dims) > 1:
        raise DimError(f"dimension mismatch {sorted(dims)}")
    return kinds.pop(), dims.pop()


@dataclass(frozen=True)
class SimplicialCone:
    gens: Tuple[Ray, ...]

    def __post_init__(self):
        if not self.gens:
            raise DimError("a simplicial cone needs at least one generator")
        backend, dim = _check_compatible(self.gens)
        if len(self.gens) > dim:
            raise DimError(f"{len(self.gens)} generators in dimension {dim}")
        impl = get_backend(backend)
        if impl.rank([g.dir for g in self.gens]) != len(self.gens):
            raise DimError("cone generators are linearly dependent")

    @property
    def backend(self) -> Backend:
        return self.gens[0].backend

    @property
    def dim(self) -> int:
        return self.gens[0].dim


def cone_coords(cone: SimplicialCone, r: Ray) -> Optional[List[Scalar]]:
    _check_compatible((*cone.gens, r))
    impl = get_backend(cone.backend)
    return impl.solve_in_span([g.dir for g in cone.gens], r.dir)


def in_cone(cone: SimplicialCone, r: Ray) -> bool:
    coords = cone_coords(cone, r)
    if coords is None:
        return False
    impl = get_backend(cone.backend)
    return all(impl.nonneg(c) for c in coords)


def quotient_ray(modulus: Ray, r: Ray, frame: Sequence[Ray]) -> Ray:
    """Image of ``r`` in V / R*modulus, written in the complement ``frame``."""
    backend, dim = _check_compatible((modulus, r, *frame))
    if len(frame) != dim - 1:
        raise DimError(f"complement frame has {len(frame)} rays, expected {dim - 1}")
    impl = get_backend(backend)
    coeffs = impl.solve_in_span([modulus.dir] + [f.dir for f in frame], r.dir)
    if coeffs is None or impl.rank([modulus.dir] + [f.dir for f in frame]) != dim:
        raise DimError("modulus and frame do not form a basis")
    projected = coeffs[1:]
    if all(impl.is_zero(c) for c in projected):
        raise DegenerateProjectionError("ray is proportional to the modulus")
    return canonicalize(projected, impl)


def angle_between(u: Sequence, v: Sequence, metric: Optional[Sequence[Sequence[float]]] = None) -> float:
    """Angle in radians between two directions, optionally in a Gram metric."""
    a = np.asarray([float(x) for x in u])
    b = np.asarray([float(x) for x in v])
    if metric is not None:
        try:
            lower = np.linalg.cholesky(np.asarray(metric, dtype=float))
            a, b = lower.T @ a, lower.T @ b
        except np.linalg.LinAlgError:
            logger.warning("metric is not positive definite, using euclidean angles")
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    chord = float(np.linalg.norm(a - b))
    return 2.0 * math.asin(min(1.0, chord / 2.0))
