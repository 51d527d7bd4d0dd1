"""Generators of Matsumoto graphs.

Cayley graphs of Coxeter groups come from the geometric representation and
Weyl groups from Cartan matrices. Both run the same breadth-first search
over group elements, tracking for every element g the images
``cols[x] = g(alpha_x)`` of the simple roots. The arrow g -> g*s_x carries
the root ``cols[x]`` and the basis at g is ``{-cols[x]}``.
"""
import logging
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from core.config import settings
from core.errors import (
    AxiomViolationError,
    BackendMismatchError,
    BadCartanMatrixError,
    BadCoxeterMatrixError,
    CapExceededError,
    DimError,
    KeyCollisionError,
    OddPolygonError,
    ParseError,
    ZeroRayError,
)
from schemas.backend import Backend
from schemas.graph import GraphDocument
from schemas.matrix import MatrixDocument, MatrixKind
from services.axioms import check_axioms
from services.graph_model import (
    GraphBuilder,
    MGraph,
    RootEntry,
    RootId,
    Slot,
    VertexId,
    signed_update,
)
from services.scalars import canonicalize, get_backend

logger = logging.getLogger(__name__)

INF = math.inf
EXACT_ORDERS = (1, 2, 3, INF)


@dataclass(frozen=True)
class CoxeterMatrix:
    entries: Tuple[Tuple[Union[int, float], ...], ...]

    def __post_init__(self):
        n = len(self.entries)
        if n == 0 or any(len(row) != n for row in self.entries):
            raise BadCoxeterMatrixError("Coxeter matrix must be square and nonempty")
        for s in range(n):
            if self.entries[s][s] != 1:
                raise BadCoxeterMatrixError(f"m[{s}][{s}] must be 1")
            for t in range(n):
                m = self.entries[s][t]
                if m != self.entries[t][s]:
                    raise BadCoxeterMatrixError(f"Coxeter matrix is not symmetric at ({s}, {t})")
                if s != t and not (m == INF or (m == int(m) and m >= 2)):
                    raise BadCoxeterMatrixError(f"m[{s}][{t}] = {m} must be an integer >= 2 or infinity")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "CoxeterMatrix":
        """Read rows where 0 (or a negative value) encodes infinity."""
        return cls(tuple(tuple(INF if (x is None or x <= 0) else int(x) for x in row) for row in rows))

    @property
    def n(self) -> int:
        return len(self.entries)

    def m(self, s: int, t: int) -> Union[int, float]:
        return self.entries[s][t]

    def to_rows(self) -> List[List[int]]:
        return [[0 if x == INF else int(x) for x in row] for row in self.entries]

    @property
    def is_exact(self) -> bool:
        return all(x in EXACT_ORDERS for row in self.entries for x in row)


@dataclass(frozen=True)
class CartanMatrix:
    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.entries)
        if n == 0 or any(len(row) != n for row in self.entries):
            raise BadCartanMatrixError("Cartan matrix must be square and nonempty")
        for s in range(n):
            if self.entries[s][s] != 2:
                raise BadCartanMatrixError(f"a[{s}][{s}] must be 2")
            for t in range(n):
                a = self.entries[s][t]
                if a != int(a):
                    raise BadCartanMatrixError(f"a[{s}][{t}] = {a} is not an integer")
                if s != t and a > 0:
                    raise BadCartanMatrixError(f"off-diagonal a[{s}][{t}] = {a} is positive")
                if (a == 0) != (self.entries[t][s] == 0):
                    raise BadCartanMatrixError(f"a[{s}][{t}] and a[{t}][{s}] must vanish together")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "CartanMatrix":
        return cls(tuple(tuple(int(x) for x in row) for row in rows))

    @property
    def n(self) -> int:
        return len(self.entries)

    def to_rows(self) -> List[List[int]]:
        return [list(row) for row in self.entries]


def matrix_from_document(doc: MatrixDocument) -> Union[CoxeterMatrix, CartanMatrix]:
    if doc.type is MatrixKind.COXETER:
        return CoxeterMatrix.from_rows(doc.entries)
    return CartanMatrix.from_rows(doc.entries)


def matrix_to_document(matrix: Union[CoxeterMatrix, CartanMatrix]) -> MatrixDocument:
    kind = MatrixKind.COXETER if isinstance(matrix, CoxeterMatrix) else MatrixKind.CARTAN
    return MatrixDocument(type=kind, n=matrix.n, entries=matrix.to_rows())


# Named inputs


def cartan_matrix(kind: str, n: int) -> CartanMatrix:
    """Cartan matrix of a finite type, with ``a[i][j]`` the coefficient in s_i(alpha_j) = alpha_j - a_ij alpha_i."""
    kind = kind.upper()
    if n < 1:
        raise BadCartanMatrixError("rank must be positive")
    rows = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]
    if kind == "A":
        pass
    elif kind in ("B", "C"):
        if n < 2:
            raise BadCartanMatrixError(f"type {kind} needs rank >= 2")
        rows[n - 1][n - 2] = -2
        if kind == "C":
            rows = [list(col) for col in zip(*rows)]
    elif kind == "D":
        if n < 4:
            raise BadCartanMatrixError("type D needs rank >= 4")
        rows[n - 2][n - 1] = rows[n - 1][n - 2] = 0
        rows[n - 3][n - 1] = rows[n - 1][n - 3] = -1
    elif kind == "G":
        if n != 2:
            raise BadCartanMatrixError("type G exists only in rank 2")
        rows = [[2, -1], [-3, 2]]
    else:
        raise BadCartanMatrixError(f"unsupported Cartan type {kind}")
    return CartanMatrix.from_rows(rows)


def coxeter_from_cartan(c: CartanMatrix) -> CoxeterMatrix:
    orders = {0: 2, 1: 3, 2: 4, 3: 6}
    n = c.n
    rows = [
        [1 if s == t else orders.get(c.entries[s][t] * c.entries[t][s], INF) for t in range(n)]
        for s in range(n)
    ]
    return CoxeterMatrix(tuple(tuple(row) for row in rows))


def coxeter_matrix_of_type(kind: str, n: int) -> CoxeterMatrix:
    return coxeter_from_cartan(cartan_matrix(kind, n))


def dihedral_matrix(m: Union[int, float]) -> CoxeterMatrix:
    """I2(m); ``m`` may be ``INF`` or 0 for the infinite dihedral group."""
    m = INF if (m == INF or m <= 0) else int(m)
    return CoxeterMatrix(((1, m), (m, 1)))


def reducible_coxeter(*blocks: CoxeterMatrix) -> CoxeterMatrix:
    """Block-diagonal assembly; generators of different blocks commute."""
    n = sum(b.n for b in blocks)
    rows = [[2] * n for _ in range(n)]
    offset = 0
    for block in blocks:
        for s in range(block.n):
            for t in range(block.n):
                rows[offset + s][offset + t] = block.m(s, t)
        offset += block.n
    return CoxeterMatrix(tuple(tuple(row) for row in rows))


# Representations


def coxeter_form(m: CoxeterMatrix, backend: Union[Backend, str] = Backend.FLOAT) -> List[list]:
    """Bilinear form B(alpha_s, alpha_t) = -cos(pi / m_st), with -1 for infinity."""
    backend = Backend(backend)
    if backend is Backend.RATIONAL:
        if not m.is_exact:
            raise BackendMismatchError("exact Coxeter forms need every m_st in {1, 2, 3, infinity}")
        exact = {1: Fraction(1), 2: Fraction(0), 3: Fraction(-1, 2), INF: Fraction(-1)}
        return [[exact[x] for x in row] for row in m.entries]
    return [[-1.0 if x == INF else -math.cos(math.pi / x) for x in row] for row in m.entries]


def geometric_rep(m: CoxeterMatrix, backend: Union[Backend, str] = Backend.FLOAT) -> List[np.ndarray]:
    """Reflection matrices sigma_s(v) = v - 2 B(alpha_s, v) alpha_s in the basis {alpha_x}."""
    form = np.asarray(coxeter_form(m, backend), dtype=object if Backend(backend) is Backend.RATIONAL else float)
    n = m.n
    one = Fraction(1) if form.dtype == object else 1.0
    identity = np.array([[one * (i == j) for j in range(n)] for i in range(n)], dtype=form.dtype)
    reflections = []
    for s in range(n):
        sigma = identity.copy()
        sigma[s, :] = identity[s, :] - 2 * form[s, :]
        reflections.append(sigma)
    return reflections


def cartan_reflections(c: CartanMatrix) -> List[np.ndarray]:
    """Integer matrices of s_i(alpha_j) = alpha_j - a_ij alpha_i in the simple-root basis."""
    n = c.n
    reflections = []
    for i in range(n):
        sigma = np.identity(n, dtype=int)
        for j in range(n):
            sigma[i, j] -= c.entries[i][j]
        reflections.append(sigma)
    return reflections


def enumerate_group(matrix: Union[CoxeterMatrix, CartanMatrix], limit: int = 10000) -> int:
    """Group order by multiplying representation matrices and deduplicating entries.

    Independent of the Cayley search; used as a counting oracle.
    """
    if isinstance(matrix, CartanMatrix):
        gens = [g.astype(float) for g in cartan_reflections(matrix)]
    else:
        gens = geometric_rep(matrix)
    n = matrix.n

    def key(a: np.ndarray) -> tuple:
        return tuple(np.round(a, 8).ravel() + 0.0)

    identity = np.identity(n)
    seen = {key(identity)}
    queue = deque([identity])
    while queue:
        current = queue.popleft()
        for gen in gens:
            product = current @ gen
            k = key(product)
            if k in seen:
                continue
            seen.add(k)
            if len(seen) > limit:
                raise CapExceededError(f"group has more than {limit} elements")
            queue.append(product)
    return len(seen)


def _positive_definite(gram: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(gram)
        return True
    except np.linalg.LinAlgError:
        return False


def _cartan_metric(c: CartanMatrix) -> Optional[List[List[float]]]:
    """Symmetrised Gram matrix G_ij = a_ij * l_i / 2 with squared lengths l_i."""
    n = c.n
    lengths: Dict[int, float] = {}
    for start in range(n):
        if start in lengths:
            continue
        lengths[start] = 2.0
        queue = deque([start])
        while queue:
            i = queue.popleft()
            for j in range(n):
                a_ij, a_ji = c.entries[i][j], c.entries[j][i]
                if i == j or a_ij == 0:
                    continue
                length = a_ij * lengths[i] / a_ji
                if j not in lengths:
                    lengths[j] = length
                    queue.append(j)
                elif not math.isclose(lengths[j], length):
                    return None
    gram = np.array([[c.entries[i][j] * lengths[i] / 2.0 for j in range(n)] for i in range(n)])
    if not np.allclose(gram, gram.T) or not _positive_definite(gram):
        return None
    return gram.tolist()


def _coxeter_metric(m: CoxeterMatrix) -> Optional[List[List[float]]]:
    gram = np.asarray(coxeter_form(m, Backend.FLOAT), dtype=float)
    if not _positive_definite(gram):
        return None
    return gram.tolist()


def _verified(graph: MGraph, verify: bool) -> MGraph:
    if verify:
        report = check_axioms(graph)
        if not report.passed:
            failed = [c.name for c in report.checks if not c.passed]
            raise AxiomViolationError(f"graph fails {', '.join(failed)}", report=report)
    return graph


# Cayley search


def _cayley_search(
    shift: Sequence[Sequence],
    backend: Backend,
    radius: int,
    metric: Optional[List[List[float]]],
    notes: List[str],
) -> MGraph:
    """Breadth-first search over group elements.

    ``shift[x][y]`` is the coefficient in s_x(alpha_y) = alpha_y - shift[x][y] alpha_x.
    """
    if radius < 0:
        raise DimError("radius must be nonnegative")
    n = len(shift)
    impl = get_backend(backend)
    if metric is None:
        notes.append("no positive definite metric; angles are measured in euclidean coordinates")
    builder = GraphBuilder(n, backend, metric=metric, notes=notes)
    roots = builder.roots
    shift = [[impl.coerce(x) for x in row] for row in shift]

    def register(cols) -> Tuple[RootId, ...]:
        return tuple(roots.add_pair(col)[0] for col in cols)

    identity = tuple(tuple(impl.coerce(1 if i == j else 0) for j in range(n)) for i in range(n))
    cols_of = {0: identity}
    vias: Dict[VertexId, Tuple[RootId, ...]] = {0: register(identity)}
    inversion: Dict[VertexId, FrozenSet[RootId]] = {0: frozenset()}
    index: Dict[FrozenSet[RootId], VertexId] = {frozenset(): 0}
    depth = {0: 0}
    neighbours: Dict[VertexId, List[Optional[VertexId]]] = {}

    queue = deque([0])
    while queue:
        g = queue.popleft()
        cols = cols_of[g]
        neighbours[g] = []
        for x in range(n):
            via = vias[g][x]
            key = signed_update(inversion[g], via, roots.neg(via))
            h = index.get(key)
            if h is None and depth[g] >= radius:
                neighbours[g].append(None)
                continue
            new_cols = tuple(
                tuple(a - shift[x][y] * b for a, b in zip(cols[y], cols[x])) for y in range(n)
            )
            new_vias = register(new_cols)
            if h is not None:
                if new_vias != vias[h]:
                    raise KeyCollisionError(
                        f"vertices reached from {g} by generator {x} share the inversion set of {h} "
                        f"but carry roots {list(new_vias)} instead of {list(vias[h])}",
                        vertex=h,
                    )
                neighbours[g].append(h)
                continue
            h = len(cols_of)
            cols_of[h] = new_cols
            vias[h] = new_vias
            inversion[h] = key
            index[key] = h
            depth[h] = depth[g] + 1
            neighbours[g].append(h)
            queue.append(h)

    for g in sorted(neighbours):
        builder.add_vertex(g, [Slot(vias[g][x], to=neighbours[g][x]) for x in range(n)])
    graph = builder.build(0)
    if not graph.is_closed:
        logger.warning(f"Cayley window truncated at radius {radius}: {len(graph)} vertices materialised")
    return graph


def build_cayley(
    m: CoxeterMatrix,
    radius: Optional[int] = None,
    backend: Union[Backend, str] = Backend.FLOAT,
    verify: bool = True,
) -> MGraph:
    """Cayley graph of the Coxeter group of ``m`` realised by the geometric representation.

    Args:
        m: Coxeter matrix.
        radius: window radius in word length, settings.MK_DEFAULT_RADIUS by default.
        backend: float by default; rational is accepted when every m_st is 1, 2, 3 or infinity.
        verify: run the axiom checks and raise AxiomViolationError on failure.

    Returns:
        MGraph with base vertex 0 at the identity.
    """
    radius = settings.MK_DEFAULT_RADIUS if radius is None else radius
    backend = Backend(backend)
    form = coxeter_form(m, backend)
    shift = [[2 * b for b in row] for row in form]
    notes = [f"Coxeter group with matrix {m.to_rows()} (0 = infinity), window radius {radius}"]
    return _verified(_cayley_search(shift, backend, radius, _coxeter_metric(m), notes), verify)


def build_weyl(c: CartanMatrix, radius: Optional[int] = None, verify: bool = True) -> MGraph:
    """Weyl group Cayley graph with integer roots in the simple-root basis (rational backend)."""
    radius = settings.MK_DEFAULT_RADIUS if radius is None else radius
    notes = [f"Weyl group with Cartan matrix {c.to_rows()}, window radius {radius}"]
    return _verified(_cayley_search(c.entries, Backend.RATIONAL, radius, _cartan_metric(c), notes), verify)


def build_product(*blocks: CoxeterMatrix, radius: Optional[int] = None, verify: bool = True) -> MGraph:
    return build_cayley(reducible_coxeter(*blocks), radius, verify=verify)


# Rank two


def _direction(degrees: float) -> Tuple[float, float]:
    angle = math.radians(degrees)
    return math.cos(angle), math.sin(angle)


def _chain(angles: Sequence[float], first: float, last: Optional[float], dangling: Optional[float], notes: List[str]) -> MGraph:
    """Planar chain v_0 - v_1 - ... with compact roots at the given angles.

    v_0 carries an infinite edge with root at angle ``first``; the last vertex
    carries either an infinite edge at ``last`` or, for windows, a dangling
    compact slot whose root sits at ``dangling``.
    """
    builder = GraphBuilder(2, Backend.FLOAT, notes=notes)
    roots = builder.roots
    start = roots.add_noninvertible(_direction(first))
    gammas = [roots.add_pair(_direction(a)) for a in angles]
    k = len(gammas)
    builder.add_vertex(0, [Slot(start, infinite=True), Slot(gammas[0][0], to=1)])
    for i in range(1, k):
        builder.add_vertex(i, [Slot(gammas[i - 1][1], to=i - 1), Slot(gammas[i][0], to=i + 1)])
    if last is not None:
        end = roots.add_noninvertible(_direction(last))
        builder.add_vertex(k, [Slot(gammas[k - 1][1], to=k - 1), Slot(end, infinite=True)])
    else:
        beyond = roots.add_pair(_direction(dangling))[0]
        builder.add_vertex(k, [Slot(gammas[k - 1][1], to=k - 1), Slot(beyond)])
    return builder.build(0)


def build_segment(k: int, verify: bool = True) -> MGraph:
    """Two infinite edges joined by k compact edges.

    With eps = 80/k degrees the compact roots sit at -i*eps and the two
    noninvertible roots at 90 and 91 degrees.
    """
    if k < 1:
        raise DimError("a segment needs at least one compact edge")
    eps = 80.0 / k
    notes = [f"rank 2 segment with {k} compact edges: compact roots at -i*{eps:g} degrees, infinite roots at 90 and 91 degrees"]
    return _verified(_chain([-i * eps for i in range(1, k + 1)], 90.0, 91.0, None, notes), verify)


def tail_angle(i: int) -> float:
    return -80.0 * i / (i + 1)


def build_tail(radius: Optional[int] = None, verify: bool = True) -> MGraph:
    """One infinite edge followed by infinitely many compact edges, windowed.

    Compact roots sit at -80*i/(i+1) degrees and accumulate at -80 degrees,
    which is not a root.
    """
    radius = settings.MK_DEFAULT_RADIUS if radius is None else radius
    if radius < 1:
        raise DimError("a tail window needs radius >= 1")
    notes = [
        f"rank 2 tail window of radius {radius}: compact roots at -80*i/(i+1) degrees, infinite root at 90 degrees",
        "this tail realisation is one choice among many",
    ]
    logger.warning(f"Tail graph truncated at radius {radius}")
    graph = _chain([tail_angle(i) for i in range(1, radius + 1)], 90.0, None, tail_angle(radius + 1), notes)
    return _verified(graph, verify)


def build_rank2(
    kind: str,
    m: Optional[int] = None,
    k: Optional[int] = None,
    edges: Optional[int] = None,
    radius: Optional[int] = None,
    verify: bool = True,
) -> MGraph:
    """Rank two Matsumoto graphs.

    Args:
        kind: ``polygon`` (2m-gon, or ``edges`` given directly), ``idihedral``,
            ``segment`` (k compact edges) or ``tail`` (windowed).
        radius: window radius for ``idihedral`` and ``tail``.
    """
    kind = kind.lower()
    if kind == "polygon":
        if edges is not None:
            if edges % 2:
                raise OddPolygonError(f"a polygon with {edges} edges cannot be realised; polygons are bipartite")
            m = edges // 2
        if m is None or m < 2:
            raise BadCoxeterMatrixError("polygon needs m >= 2")
        matrix = dihedral_matrix(m)
        backend = Backend.RATIONAL if matrix.is_exact else Backend.FLOAT
        return build_cayley(matrix, radius=m, backend=backend, verify=verify)
    if kind == "idihedral":
        return build_cayley(dihedral_matrix(INF), radius=radius, backend=Backend.RATIONAL, verify=verify)
    if kind == "segment":
        return build_segment(1 if k is None else k, verify=verify)
    if kind == "tail":
        return build_tail(radius if radius is not None else k, verify=verify)
    raise ParseError(f"unknown rank 2 kind {kind}")


# File input


def build_from_file(doc: Union[GraphDocument, dict], verify: bool = True) -> MGraph:
    """Build a graph from a graph document and check its axioms unless ``verify`` is False.

    Raises:
        ParseError: malformed document, duplicated ray or inconsistent slots.
        AxiomViolationError: the axioms fail; the report is attached.
    """
    if not isinstance(doc, GraphDocument):
        try:
            doc = GraphDocument.model_validate(doc)
        except ValidationError as e:
            raise ParseError(f"invalid graph document: {e}")

    builder = GraphBuilder(doc.dim, doc.backend, metric=doc.metric, notes=doc.notes)
    ids = set()
    for root in doc.roots:
        if root.id in ids:
            raise ParseError(f"duplicate root id {root.id}")
        ids.add(root.id)
        try:
            ray = canonicalize(root.coords, doc.backend)
        except (ZeroRayError, ValueError, ZeroDivisionError) as e:
            raise ParseError(f"root {root.id}: invalid coordinates {root.coords} ({e})")
        if ray.dim != doc.dim:
            raise ParseError(f"root {root.id} has {ray.dim} coordinates, expected {doc.dim}")
        existing = builder.roots.lookup(ray)
        if existing is not None:
            raise ParseError(f"roots {existing} and {root.id} have the same ray")
        if root.invertible != (root.neg is not None):
            raise ParseError(f"root {root.id}: a negative is required exactly for invertible roots")
        builder.roots.insert(RootEntry(root.id, ray, root.invertible, root.neg))
    for root in doc.roots:
        if root.neg is not None and root.neg not in ids:
            raise ParseError(f"root {root.id} names unknown negative {root.neg}")

    for vertex in doc.vertices:
        slots = [Slot(s.via, to=None if s.infinite else s.to, infinite=s.infinite) for s in vertex.slots]
        builder.add_vertex(vertex.id, slots, interior=vertex.interior, basis=vertex.basis)
    graph = builder.build(doc.base)

    return _verified(graph, verify)
