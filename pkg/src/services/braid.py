"""Rank two cells, braid moves and braid-equivalence certificates for shortest paths."""
import logging
import weakref
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from core.config import settings
from core.errors import (
    AxiomViolationError,
    BoundaryVertexError,
    CapExceededError,
    DimError,
    InvalidMoveError,
    InvalidPathError,
    MatsumotoError,
    NotShortestPairError,
    OutOfWindowError,
)
from schemas.path import VerificationResult
from services.graph_model import (
    MGraph,
    Path,
    RootId,
    Step,
    VertexId,
    distance_geometric,
    greedy_shortest_path,
    path_from_roots,
    positive_roots,
    roots_in_span,
    span_component,
)

logger = logging.getLogger(__name__)


class Rank2Kind(str, Enum):
    POLYGON = "polygon"
    IDIHEDRAL_WINDOW = "idihedral-window"
    TAIL_WINDOW = "tail-window"
    SEGMENT_WINDOW = "segment-window"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Rank2Cell:
    """Connected component through ``anchor`` of the edges whose roots lie in a plane.

    For polygons ``vertices`` is the cycle in walking order, ``forward[j]`` the
    root of the arrow vertices[j] -> vertices[j+1] and ``backward[j]`` the root
    of the reverse arrow.
    """

    anchor: VertexId
    roots: Tuple[RootId, RootId]
    kind: Rank2Kind
    vertices: Tuple[VertexId, ...]
    members: FrozenSet[RootId]
    infinite_edges: int = 0
    truncated: bool = False
    forward: Tuple[RootId, ...] = ()
    backward: Tuple[RootId, ...] = ()

    @property
    def is_polygon(self) -> bool:
        return self.kind is Rank2Kind.POLYGON

    @property
    def m(self) -> int:
        """Half the number of edges of a polygon."""
        return len(self.vertices) // 2

    def _index(self, u: VertexId) -> int:
        if not self.is_polygon:
            raise InvalidMoveError(f"rank 2 cell at {self.anchor} is a {self.kind}, not a polygon")
        try:
            return self.vertices.index(u)
        except ValueError:
            raise InvalidMoveError(f"vertex {u} is not on the polygon through {self.anchor}")

    def antipode(self, u: VertexId) -> VertexId:
        i = self._index(u)
        return self.vertices[(i + self.m) % len(self.vertices)]

    def halves(self, u: VertexId) -> Tuple[Path, Path]:
        """The two paths of length m from u to its antipode, forward one first."""
        i = self._index(u)
        size = len(self.vertices)
        forward = Path(u, tuple(
            Step(self.forward[(i + j) % size], self.vertices[(i + j + 1) % size]) for j in range(self.m)
        ))
        backward = Path(u, tuple(
            Step(self.backward[(i - j - 1) % size], self.vertices[(i - j - 1) % size]) for j in range(self.m)
        ))
        return forward, backward


@dataclass(frozen=True, slots=True)
class BraidMove:
    pos: int
    m: int
    replacement: Tuple[RootId, ...]
    removed: Optional[Tuple[RootId, ...]] = field(default=None, compare=False)

    def reversed(self) -> "BraidMove":
        if self.removed is None:
            raise InvalidMoveError(f"move at {self.pos} does not record the half it replaces")
        return BraidMove(self.pos, self.m, self.removed, self.replacement)

    def shifted(self, offset: int) -> "BraidMove":
        return replace(self, pos=self.pos + offset)


@dataclass(frozen=True)
class Certificate:
    source: Path
    target: Path
    moves: Tuple[BraidMove, ...] = ()

    def __len__(self) -> int:
        return len(self.moves)

    def reversed(self) -> "Certificate":
        return Certificate(self.target, self.source, tuple(mv.reversed() for mv in reversed(self.moves)))


class _CellCache:
    """Per-graph memo of rank 2 cells, polygon halves and certificates."""

    def __init__(self):
        self.members: Dict[FrozenSet[RootId], FrozenSet[RootId]] = {}
        self.cells: Dict[Tuple[FrozenSet[RootId], VertexId], Rank2Cell] = {}
        self.anchored: Dict[Tuple[VertexId, RootId, RootId], Rank2Cell] = {}
        self.halves: Dict[Tuple[FrozenSet[RootId], VertexId], Tuple[Path, Path]] = {}
        self.opposite: Dict[Tuple[VertexId, Tuple[RootId, ...]], Path] = {}
        self.greedy: Dict[Tuple[VertexId, VertexId], Path] = {}
        # keyed by (start, roots of a, roots of b); moves are relative to a
        self.transforms: Dict[Tuple[VertexId, Tuple[RootId, ...], Tuple[RootId, ...]], Tuple[BraidMove, ...]] = {}


_caches: "weakref.WeakKeyDictionary[MGraph, _CellCache]" = weakref.WeakKeyDictionary()


def _cache(g: MGraph) -> _CellCache:
    cache = _caches.get(g)
    if cache is None:
        cache = _caches[g] = _CellCache()
    return cache


def _walk_cycle(g: MGraph, v: VertexId, members: FrozenSet[RootId]):
    cycle = [v]
    forward: List[RootId] = []
    backward: List[RootId] = []
    previous, current = None, v
    while True:
        slot = next(
            s for s in g.vertex(current).slots
            if s.via in members and not s.infinite and s.to != previous
        )
        forward.append(slot.via)
        backward.append(g.roots.neg(slot.via))
        previous, current = current, slot.to
        if current == v:
            break
        cycle.append(current)
    return tuple(cycle), tuple(forward), tuple(backward)


def rank2_at(g: MGraph, v: VertexId, root_a: RootId, root_b: RootId) -> Rank2Cell:
    """Classify the rank two subgraph through v spanned by two roots."""
    if not g.vertex(v).interior:
        raise BoundaryVertexError(f"vertex {v} lies on the window boundary")
    cache = _cache(g)
    found = cache.anchored.get((v, root_a, root_b))
    if found is not None:
        return found
    pair = frozenset((root_a, root_b))
    members = cache.members.get(pair)
    if members is None:
        span = [g.roots.ray(root_a), g.roots.ray(root_b)]
        if g.impl.rank([r.dir for r in span]) != 2:
            raise DimError(f"roots {root_a} and {root_b} are not independent")
        members = cache.members[pair] = frozenset(roots_in_span(g, span))

    cell = cache.cells.get((members, v))
    if cell is not None:
        found = cache.anchored[(v, root_a, root_b)] = replace(cell, anchor=v, roots=(root_a, root_b))
        return found

    component = span_component(g, v, members)
    infinite = 0
    truncated = False
    for u in component:
        rec = g.vertex(u)
        in_span = [s for s in rec.slots if s.via in members]
        if len(in_span) != 2:
            raise AxiomViolationError(f"vertex {u} has {len(in_span)} edges in a rank 2 span")
        infinite += sum(1 for s in in_span if s.infinite)
        truncated = truncated or not rec.interior or any(not s.resolved for s in in_span)

    if infinite == 0 and not truncated:
        cycle, forward, backward = _walk_cycle(g, v, members)
        if len(cycle) != len(component) or len(cycle) % 2:
            raise AxiomViolationError(f"rank 2 cycle through {v} has {len(cycle)} edges")
        cell = Rank2Cell(v, (root_a, root_b), Rank2Kind.POLYGON, cycle, members, 0, False, forward, backward)
    else:
        kind = {2: Rank2Kind.SEGMENT_WINDOW, 1: Rank2Kind.TAIL_WINDOW}.get(infinite, Rank2Kind.IDIHEDRAL_WINDOW)
        cell = Rank2Cell(v, (root_a, root_b), kind, tuple(component), members, infinite, truncated)

    for u in cell.vertices:
        cache.cells[(members, u)] = cell
    cache.anchored[(v, root_a, root_b)] = cell
    return cell


def validate_path(g: MGraph, p: Path) -> Path:
    """Check that every step follows a materialised compact edge."""
    built = path_from_roots(g, p.start, p.roots)
    if built.vertices != p.vertices:
        raise InvalidPathError(f"path from {p.start} visits {list(p.vertices)} but its roots lead through {list(built.vertices)}")
    return built


def _splice(p: Path, pos: int, m: int, half: Path) -> Path:
    return Path(p.start, p.steps[:pos] + half.steps + p.steps[pos + m:])


def _halves(g: MGraph, cell: Rank2Cell, u: VertexId) -> Tuple[Path, Path]:
    cache = _cache(g)
    key = (cell.members, u)
    found = cache.halves.get(key)
    if found is None:
        found = cache.halves[key] = cell.halves(u)
    return found


def _greedy(g: MGraph, v: VertexId, w: VertexId) -> Path:
    cache = _cache(g)
    found = cache.greedy.get((v, w))
    if found is None:
        found = cache.greedy[(v, w)] = greedy_shortest_path(g, v, w)
    return found


def _opposite_half(g: MGraph, u: VertexId, roots: Tuple[RootId, ...], pos: int) -> Path:
    """The other half of the polygon whose half leaving u crosses ``roots``."""
    cache = _cache(g)
    other = cache.opposite.get((u, roots))
    if other is not None:
        return other
    try:
        cell = rank2_at(g, u, roots[0], roots[1])
    except (DimError, BoundaryVertexError) as e:
        raise InvalidMoveError(f"move at {pos}: {e.message}")
    if not cell.is_polygon or cell.m != len(roots):
        raise InvalidMoveError(f"segment at {pos} is not half of a {2 * len(roots)}-gon")
    first, second = _halves(g, cell, u)
    if roots == first.roots:
        other = second
    elif roots == second.roots:
        other = first
    else:
        raise InvalidMoveError(f"segment at {pos} is not a polygon half")
    cache.opposite[(u, roots)] = other
    return other


def apply_move(g: MGraph, p: Path, mv: BraidMove) -> Path:
    """Replace the polygon half p[pos:pos+m] by the other half of the same polygon."""
    if mv.m < 2 or mv.pos < 0 or mv.pos + mv.m > len(p):
        raise InvalidMoveError(f"move at {mv.pos} of length {mv.m} does not fit a path of length {len(p)}")
    if len(mv.replacement) != mv.m:
        raise InvalidMoveError(f"replacement has {len(mv.replacement)} steps, expected {mv.m}")
    removed = p.roots[mv.pos:mv.pos + mv.m]
    if mv.removed is not None and removed != mv.removed:
        raise InvalidMoveError(f"move at {mv.pos} expects to remove {list(mv.removed)}, path has {list(removed)}")
    other = _opposite_half(g, p.vertex_at(mv.pos), removed, mv.pos)
    if other.roots != tuple(mv.replacement):
        raise InvalidMoveError(f"replacement {list(mv.replacement)} is not the opposite half {list(other.roots)}")
    return _splice(p, mv.pos, mv.m, other)


def all_moves(g: MGraph, p: Path) -> List[BraidMove]:
    """Every braid move applicable to p, by position."""
    moves = []
    for pos in range(len(p) - 1):
        u = p.vertex_at(pos)
        if not g.vertex(u).interior:
            continue
        try:
            cell = rank2_at(g, u, p.roots[pos], p.roots[pos + 1])
        except DimError:
            continue
        if not cell.is_polygon or pos + cell.m > len(p):
            continue
        segment = p.roots[pos:pos + cell.m]
        first, second = _halves(g, cell, u)
        if segment == first.roots:
            moves.append(BraidMove(pos, cell.m, second.roots, segment))
        elif segment == second.roots:
            moves.append(BraidMove(pos, cell.m, first.roots, segment))
    return moves


def shortest_paths(g: MGraph, v: VertexId, w: VertexId, limit: Optional[int] = None) -> List[Path]:
    """All shortest paths from v to w in slot order, truncated at ``limit``."""
    limit = settings.MK_PATH_LIMIT if limit is None else limit
    target = positive_roots(g, w)
    positive_roots(g, v)
    found: List[Path] = []

    def descend(u: VertexId, steps: Tuple[Step, ...]) -> None:
        if len(found) >= limit:
            return
        if u == w:
            found.append(Path(v, steps))
            return
        here = g.positive_set(u)
        for slot in g.vertex(u).slots:
            if slot.infinite or slot.via not in target or slot.via in here:
                continue
            if slot.to is None:
                raise OutOfWindowError(f"shortest paths from {v} to {w} leave the window at {u}")
            descend(slot.to, steps + (Step(slot.via, slot.to),))

    descend(v, ())
    if len(found) >= limit:
        logger.warning(f"Shortest path enumeration from {v} to {w} truncated at {limit}")
    return found


def _check_pair(g: MGraph, a: Path, b: Path) -> None:
    validate_path(g, a)
    validate_path(g, b)
    if a.start != b.start or a.end != b.end:
        raise NotShortestPairError(f"paths join {a.start}->{a.end} and {b.start}->{b.end}")
    d = distance_geometric(g, a.start, a.end)
    if len(a) != d or len(b) != d:
        raise NotShortestPairError(f"paths of lengths {len(a)} and {len(b)} between vertices at distance {d}")


def matsumoto_transform(g: MGraph, a: Path, b: Path) -> Certificate:
    """Certificate of braid moves turning the shortest path a into the shortest path b.

    Raises:
        NotShortestPairError: the paths are not shortest or do not share endpoints.
        AxiomViolationError: a rank 2 cell is not a polygon or distances are not additive.
        OutOfWindowError: a rank 2 cell leaves the window.
    """
    _check_pair(g, a, b)
    memo = _cache(g).transforms
    if len(memo) > settings.MK_CERT_MEMO:
        memo.clear()

    def transform(a: Path, b: Path) -> Tuple[BraidMove, ...]:
        key = (a.start, a.roots, b.roots)
        if key not in memo:
            memo[key] = _transform(a, b)
        return memo[key]

    def _transform(a: Path, b: Path) -> Tuple[BraidMove, ...]:
        n = len(a)
        if a.roots == b.roots:
            return ()
        if a.roots[0] == b.roots[0]:
            return tuple(mv.shifted(1) for mv in transform(a.segment(1, n), b.segment(1, n)))
        if b.roots[0] not in a.roots or a.roots[0] not in b.roots:
            raise AxiomViolationError(f"shortest paths from {a.start} to {a.end} cross different roots")

        i = a.roots.index(b.roots[0])
        if i < n - 1:
            # b_1 followed by a shortest path to the end of a_i, then the rest of a
            gamma = _greedy(g, b.vertex_at(1), a.vertex_at(i + 1))
            detour = b.segment(0, 1).concat(gamma)
            middle = detour.concat(a.segment(i + 1, n))
            return transform(a.segment(0, i + 1), detour) + transform(middle, b)
        if b.roots.index(a.roots[0]) < n - 1:
            return tuple(mv.reversed() for mv in reversed(transform(b, a)))

        v = a.start
        try:
            cell = rank2_at(g, v, a.roots[0], b.roots[0])
        except DimError:
            raise AxiomViolationError(f"first roots of the paths from {v} are dependent")
        if not cell.is_polygon:
            if cell.truncated:
                raise OutOfWindowError(f"rank 2 cell at {v} is cut by the window")
            raise AxiomViolationError(f"rank 2 cell at {v} is a {cell.kind}, not a polygon")
        antipode = cell.antipode(v)
        w = a.end
        if distance_geometric(g, v, w) != distance_geometric(g, v, antipode) + distance_geometric(g, antipode, w):
            raise AxiomViolationError(f"distance from {v} to {w} does not pass through the antipode {antipode}")
        gamma = _greedy(g, antipode, w)
        first, second = _halves(g, cell, v)
        half_a, half_b = (first, second) if first.roots[0] == a.roots[0] else (second, first)
        via_a = half_a.concat(gamma)
        via_b = half_b.concat(gamma)
        move = BraidMove(0, cell.m, half_b.roots, half_a.roots)
        return transform(a, via_a) + (move,) + transform(via_b, b)

    moves = transform(a, b)
    logger.info(f"Certificate from {a.start} to {a.end}: length {len(a)}, {len(moves)} moves")
    return Certificate(a, b, moves)


def verify_certificate(g: MGraph, c: Certificate) -> VerificationResult:
    """Replay the moves of ``c`` and compare the result with its declared target."""
    try:
        current = validate_path(g, c.source)
        validate_path(g, c.target)
    except MatsumotoError as e:
        return VerificationResult(ok=False, failed_at=None, reason=str(e))
    for index, mv in enumerate(c.moves):
        try:
            following = apply_move(g, current, mv)
        except MatsumotoError as e:
            return VerificationResult(ok=False, failed_at=index, reason=str(e))
        if following.start != current.start or following.end != current.end or len(following) != len(current):
            return VerificationResult(ok=False, failed_at=index, reason="move changed endpoints or length")
        current = following
    if current.start != c.target.start or current.roots != c.target.roots:
        return VerificationResult(
            ok=False, failed_at=len(c.moves), reason="final path differs from the declared target"
        )
    return VerificationResult(ok=True)


def braid_class(g: MGraph, p: Path, cap: Optional[int] = None) -> Set[Path]:
    """Closure of p under all braid moves."""
    cap = settings.MK_BRAID_CAP if cap is None else cap
    p = validate_path(g, p)
    seen = {p}
    queue = deque([p])
    while queue:
        current = queue.popleft()
        for mv in all_moves(g, current):
            following = apply_move(g, current, mv)
            if following in seen:
                continue
            seen.add(following)
            if len(seen) > cap:
                raise CapExceededError(f"braid class exceeds {cap} paths")
            queue.append(following)
    return seen
