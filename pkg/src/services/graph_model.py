"""Matsumoto graph data model and the queries that only need positive systems.

Conventions:

* A slot ``i`` of vertex ``v`` describes one edge at ``v``. For a compact edge
  ``via`` is the root of the arrow leaving ``v`` and ``basis[i] = neg(via)`` is
  the root of the arrow entering ``v``. For an infinite edge ``via`` is the
  (always incoming) root itself and ``basis[i] = via``.
* ``to is None`` on a compact slot means the far end lies outside the window.
* Inversion sets are kept relative to the base vertex and updated along an
  arrow with root ``a`` by removing ``neg(a)`` if present, inserting ``a``
  otherwise.
"""
import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from core.errors import (
    AxiomViolationError,
    BoundaryVertexError,
    DimError,
    InvalidPathError,
    OutOfWindowError,
    ParseError,
)
from schemas.backend import Backend
from services.scalars import Ray, ScalarBackend, SimplicialCone, canonicalize, get_backend, in_cone

logger = logging.getLogger(__name__)

RootId = int
VertexId = int


@dataclass(frozen=True)
class RootEntry:
    id: RootId
    ray: Ray
    invertible: bool
    neg: Optional[RootId] = None


class RootTable:
    """Roots indexed by id, with a ray-key index for lookups.

    Duplicate rays are tolerated here so that the axiom checker can report
    them; the file loader rejects them up front.
    """

    def __init__(self, backend: Backend, dim: int):
        self.backend = Backend(backend)
        self.dim = dim
        self._entries: Dict[RootId, RootEntry] = {}
        self._by_key: Dict[tuple, RootId] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[RootEntry]:
        return iter(self._entries[i] for i in self.ids())

    def __contains__(self, root_id: RootId) -> bool:
        return root_id in self._entries

    def __getitem__(self, root_id: RootId) -> RootEntry:
        return self._entries[root_id]

    @property
    def impl(self) -> ScalarBackend:
        return get_backend(self.backend)

    def ids(self) -> List[RootId]:
        return sorted(self._entries)

    def ray(self, root_id: RootId) -> Ray:
        return self._entries[root_id].ray

    def neg(self, root_id: RootId) -> Optional[RootId]:
        return self._entries[root_id].neg

    def invertible(self, root_id: RootId) -> bool:
        return self._entries[root_id].invertible

    def lookup(self, ray: Ray) -> Optional[RootId]:
        found = self._by_key.get(ray.key)
        if found is not None or self.backend is Backend.RATIONAL:
            return found
        impl = self.impl
        for entry in self._entries.values():
            if impl.same(entry.ray.dir, ray.dir):
                return entry.id
        return None

    def duplicates(self) -> List[Tuple[RootId, RootId]]:
        seen: Dict[tuple, RootId] = {}
        pairs = []
        for entry in self:
            other = seen.get(entry.ray.key)
            if other is not None:
                pairs.append((other, entry.id))
            else:
                seen[entry.ray.key] = entry.id
        return pairs

    def _next_id(self) -> RootId:
        return max(self._entries, default=-1) + 1

    def insert(self, entry: RootEntry) -> RootId:
        if entry.ray.dim != self.dim:
            raise DimError(f"root {entry.id} has dimension {entry.ray.dim}, expected {self.dim}")
        if entry.ray.backend is not self.backend:
            raise ParseError(f"root {entry.id} uses backend {entry.ray.backend}")
        self._entries[entry.id] = entry
        self._by_key.setdefault(entry.ray.key, entry.id)
        return entry.id

    def add_pair(self, vec: Sequence) -> Tuple[RootId, RootId]:
        """Register the invertible pair +-vec; returns (id of vec, id of -vec)."""
        ray = canonicalize(vec, self.backend)
        found = self.lookup(ray)
        if found is not None:
            entry = self._entries[found]
            if not entry.invertible:
                raise AxiomViolationError(f"root {found} is noninvertible but its opposite is requested")
            return found, entry.neg
        pos_id = self._next_id()
        neg_id = pos_id + 1
        self.insert(RootEntry(pos_id, ray, True, neg_id))
        self.insert(RootEntry(neg_id, -ray, True, pos_id))
        return pos_id, neg_id

    def add_noninvertible(self, vec: Sequence) -> RootId:
        ray = canonicalize(vec, self.backend)
        found = self.lookup(ray)
        if found is not None:
            return found
        root_id = self._next_id()
        self.insert(RootEntry(root_id, ray, False, None))
        return root_id


@dataclass(frozen=True)
class Slot:
    via: RootId
    to: Optional[VertexId] = None
    infinite: bool = False

    @property
    def resolved(self) -> bool:
        return self.infinite or self.to is not None


@dataclass(frozen=True)
class VertexRecord:
    id: VertexId
    basis: Tuple[RootId, ...]
    slots: Tuple[Slot, ...]
    interior: bool
    inversion: FrozenSet[RootId]


@dataclass(frozen=True, slots=True)
class Step:
    via: RootId
    to: VertexId


@dataclass(frozen=True)
class Path:
    start: VertexId
    steps: Tuple[Step, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    @cached_property
    def roots(self) -> Tuple[RootId, ...]:
        return tuple(s.via for s in self.steps)

    @cached_property
    def vertices(self) -> Tuple[VertexId, ...]:
        return (self.start,) + tuple(s.to for s in self.steps)

    @property
    def end(self) -> VertexId:
        return self.steps[-1].to if self.steps else self.start

    def vertex_at(self, index: int) -> VertexId:
        return self.start if index == 0 else self.steps[index - 1].to

    def segment(self, i: int, j: int) -> "Path":
        return Path(self.vertex_at(i), self.steps[i:j])

    def concat(self, other: "Path") -> "Path":
        if other.start != self.end:
            raise InvalidPathError(f"cannot join a path ending at {self.end} with one starting at {other.start}")
        return Path(self.start, self.steps + other.steps)


class MGraph:
    """An immutable Matsumoto graph (or a finite window of one)."""

    def __init__(
        self,
        dim: int,
        backend: Backend,
        roots: RootTable,
        vertices: Dict[VertexId, VertexRecord],
        base: VertexId,
        metric: Optional[Sequence[Sequence[float]]] = None,
        notes: Sequence[str] = (),
    ):
        self.dim = dim
        self.backend = Backend(backend)
        self.roots = roots
        self._vertices = dict(vertices)
        self.base = base
        self.metric = None if metric is None else tuple(tuple(float(x) for x in row) for row in metric)
        self.notes = tuple(notes)
        self._cones: Dict[VertexId, SimplicialCone] = {}
        self._positive: Dict[VertexId, FrozenSet[RootId]] = {}
        self._nx: Optional[nx.Graph] = None
        self._arrows: Optional[Dict[Tuple[VertexId, RootId], Slot]] = None

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, v: VertexId) -> bool:
        return v in self._vertices

    def __repr__(self) -> str:
        return (
            f"MGraph(dim={self.dim}, backend={self.backend}, vertices={len(self)}, "
            f"roots={len(self.roots)}, base={self.base})"
        )

    @property
    def impl(self) -> ScalarBackend:
        return get_backend(self.backend)

    def vertex(self, v: VertexId) -> VertexRecord:
        try:
            return self._vertices[v]
        except KeyError:
            raise OutOfWindowError(f"vertex {v} is not in the window")

    def vertex_ids(self) -> List[VertexId]:
        return sorted(self._vertices)

    def vertices(self) -> List[VertexRecord]:
        return [self._vertices[v] for v in self.vertex_ids()]

    def interior_ids(self) -> List[VertexId]:
        return [v for v in self.vertex_ids() if self._vertices[v].interior]

    @property
    def is_closed(self) -> bool:
        """True when every vertex is interior, i.e. the graph is finite and complete."""
        return all(rec.interior for rec in self._vertices.values())

    def oriented_edges(self) -> Iterator[Tuple[VertexId, int, VertexId]]:
        """Materialised compact arrows as (source, slot index, target)."""
        for rec in self.vertices():
            for i, slot in enumerate(rec.slots):
                if not slot.infinite and slot.to is not None:
                    yield rec.id, i, slot.to

    def arrow(self, v: VertexId, root: RootId) -> Optional[Slot]:
        """The compact slot of v whose outgoing root is ``root``."""
        if self._arrows is None:
            self._arrows = {
                (rec.id, slot.via): slot
                for rec in self._vertices.values()
                for slot in rec.slots
                if not slot.infinite
            }
        return self._arrows.get((v, root))

    def slot_towards(self, v: VertexId, w: VertexId) -> int:
        for i, slot in enumerate(self.vertex(v).slots):
            if not slot.infinite and slot.to == w:
                return i
        raise InvalidPathError(f"vertices {v} and {w} are not adjacent")

    def cone(self, v: VertexId) -> SimplicialCone:
        if v not in self._cones:
            rec = self.vertex(v)
            self._cones[v] = SimplicialCone(tuple(self.roots.ray(r) for r in rec.basis))
        return self._cones[v]

    def positive_set(self, v: VertexId) -> FrozenSet[RootId]:
        """R+_v restricted to the root table, without the interior check."""
        if v not in self._positive:
            cone = self.cone(v)
            self._positive[v] = frozenset(e.id for e in self.roots if in_cone(cone, e.ray))
        return self._positive[v]

    @property
    def nx_graph(self) -> nx.Graph:
        if self._nx is None:
            graph = nx.Graph()
            graph.add_nodes_from(self.vertex_ids())
            graph.add_edges_from((u, w) for u, _, w in self.oriented_edges())
            self._nx = graph
        return self._nx


class GraphBuilder:
    """Collects roots and vertex slots and produces a validated MGraph."""

    def __init__(
        self,
        dim: int,
        backend: Backend,
        metric: Optional[Sequence[Sequence[float]]] = None,
        notes: Iterable[str] = (),
    ):
        if dim < 1:
            raise DimError("dimension must be positive")
        self.dim = dim
        self.backend = Backend(backend)
        self.roots = RootTable(self.backend, dim)
        self.metric = metric
        self.notes = list(notes)
        self._slots: Dict[VertexId, List[Slot]] = {}
        self._interior: Dict[VertexId, Optional[bool]] = {}
        self._declared_basis: Dict[VertexId, Tuple[RootId, ...]] = {}

    def add_vertex(
        self,
        vid: VertexId,
        slots: Sequence[Slot],
        interior: Optional[bool] = None,
        basis: Optional[Sequence[RootId]] = None,
    ) -> None:
        if vid in self._slots:
            raise ParseError(f"duplicate vertex id {vid}")
        self._slots[vid] = list(slots)
        self._interior[vid] = interior
        if basis is not None:
            self._declared_basis[vid] = tuple(basis)

    def set_slot(self, vid: VertexId, index: int, slot: Slot) -> None:
        self._slots[vid][index] = slot

    def _basis_of(self, vid: VertexId, slots: List[Slot]) -> Tuple[RootId, ...]:
        basis = []
        for i, slot in enumerate(slots):
            if slot.via not in self.roots:
                raise ParseError(f"vertex {vid} slot {i} refers to unknown root {slot.via}")
            if slot.infinite:
                basis.append(slot.via)
                continue
            neg = self.roots.neg(slot.via)
            if neg is None:
                raise ParseError(f"vertex {vid} slot {i}: compact edge carries noninvertible root {slot.via}")
            basis.append(neg)
        return tuple(basis)

    def build(self, base: VertexId) -> MGraph:
        if base not in self._slots:
            raise ParseError(f"base vertex {base} is not defined")

        records: Dict[VertexId, VertexRecord] = {}
        for vid, slots in self._slots.items():
            if len(slots) != self.dim:
                raise ParseError(f"vertex {vid} has {len(slots)} slots, expected {self.dim}")
            basis = self._basis_of(vid, slots)
            declared = self._declared_basis.get(vid)
            if declared is not None and declared != basis:
                raise ParseError(f"vertex {vid} declares basis {list(declared)} but its slots give {list(basis)}")
            for i, slot in enumerate(slots):
                if slot.infinite:
                    if self.roots.invertible(slot.via):
                        raise ParseError(f"vertex {vid} slot {i}: infinite edge carries invertible root {slot.via}")
                    continue
                if slot.to is None:
                    continue
                if slot.to not in self._slots:
                    raise ParseError(f"vertex {vid} slot {i} points to unknown vertex {slot.to}")
                back = self.roots.neg(slot.via)
                if not any(s.to == vid and not s.infinite and s.via == back for s in self._slots[slot.to]):
                    raise ParseError(f"edge {vid}->{slot.to} has no reverse slot carrying root {back}")
            resolved = all(s.resolved for s in slots)
            declared_interior = self._interior.get(vid)
            if declared_interior and not resolved:
                raise ParseError(f"vertex {vid} is marked interior but has an unresolved slot")
            interior = resolved if declared_interior is None else bool(declared_interior)
            records[vid] = VertexRecord(vid, basis, tuple(slots), interior, frozenset())

        inversion = self._inversion_sets(base)
        if len(inversion) != len(records):
            missing = sorted(set(records) - set(inversion))
            raise ParseError(f"graph is not connected over compact edges; unreachable: {missing[:10]}")
        for vid, rec in records.items():
            records[vid] = VertexRecord(rec.id, rec.basis, rec.slots, rec.interior, inversion[vid])

        graph = MGraph(self.dim, self.backend, self.roots, records, base, self.metric, self.notes)
        logger.info(
            f"Built graph: {len(graph)} vertices ({len(graph.interior_ids())} interior), "
            f"{len(self.roots)} roots, dim {self.dim}, backend {self.backend}"
        )
        return graph

    def _inversion_sets(self, base: VertexId) -> Dict[VertexId, FrozenSet[RootId]]:
        inversion = {base: frozenset()}
        queue = deque([base])
        while queue:
            u = queue.popleft()
            for slot in self._slots[u]:
                if slot.infinite or slot.to is None or slot.to in inversion:
                    continue
                inversion[slot.to] = signed_update(inversion[u], slot.via, self.roots.neg(slot.via))
                queue.append(slot.to)
        return inversion


def signed_update(inversion: FrozenSet[RootId], root: RootId, neg: Optional[RootId]) -> FrozenSet[RootId]:
    if neg is not None and neg in inversion:
        return inversion - {neg}
    return inversion | {root}


def _require_interior(g: MGraph, v: VertexId) -> VertexRecord:
    rec = g.vertex(v)
    if not rec.interior:
        raise BoundaryVertexError(f"vertex {v} lies on the window boundary")
    return rec


def positive_roots(g: MGraph, v: VertexId) -> FrozenSet[RootId]:
    _require_interior(g, v)
    return g.positive_set(v)


def distance(g: MGraph, v: VertexId, w: VertexId) -> int:
    """BFS length of a shortest path over materialised compact edges."""
    g.vertex(v), g.vertex(w)
    try:
        return nx.shortest_path_length(g.nx_graph, v, w)
    except nx.NetworkXNoPath:
        raise OutOfWindowError(f"no path from {v} to {w} inside the window")


def distance_geometric(g: MGraph, v: VertexId, w: VertexId) -> int:
    """|R+_w \\ R+_v|, which equals the BFS distance on a Matsumoto graph."""
    return len(positive_roots(g, w) - positive_roots(g, v))


def greedy_shortest_path(g: MGraph, v: VertexId, w: VertexId) -> Path:
    """Shortest path built by always crossing the lowest slot whose root is still missing."""
    target = positive_roots(g, w)
    positive_roots(g, v)
    current = v
    steps: List[Step] = []
    for _ in range(len(g) + 1):
        if current == w:
            return Path(v, tuple(steps))
        here = g.positive_set(current)
        for slot in g.vertex(current).slots:
            if slot.infinite or slot.via not in target or slot.via in here:
                continue
            if slot.to is None:
                raise OutOfWindowError(f"greedy path from {v} to {w} leaves the window at {current}")
            steps.append(Step(slot.via, slot.to))
            current = slot.to
            break
        else:
            raise AxiomViolationError(f"no admissible edge at vertex {current} towards {w}")
    raise AxiomViolationError(f"greedy path from {v} to {w} does not terminate")


def path_from_roots(g: MGraph, start: VertexId, roots: Sequence[RootId]) -> Path:
    current = start
    g.vertex(start)
    steps = []
    for index, root in enumerate(roots):
        slot = g.arrow(current, root)
        if slot is None or slot.to is None:
            raise InvalidPathError(f"step {index}: no materialised edge with root {root} at vertex {current}")
        steps.append(Step(root, slot.to))
        current = slot.to
    return Path(start, tuple(steps))


def roots_in_span(g: MGraph, span: Sequence[Ray]) -> Dict[RootId, list]:
    """Table roots lying in span(span), with their coordinates in that spanning set."""
    impl = g.impl
    gens = [r.dir for r in span]
    members = {}
    for entry in g.roots:
        coeffs = impl.solve_in_span(gens, entry.ray.dir)
        if coeffs is not None:
            members[entry.id] = coeffs
    return members


def span_component(g: MGraph, v: VertexId, members: Iterable[RootId]) -> List[VertexId]:
    """Vertices reachable from v along compact edges whose roots lie in ``members``."""
    allowed = set(members)
    seen = {v}
    order = [v]
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for slot in g.vertex(u).slots:
            if slot.infinite or slot.to is None or slot.via not in allowed or slot.to in seen:
                continue
            seen.add(slot.to)
            order.append(slot.to)
            queue.append(slot.to)
    return order


def subgraph_span(g: MGraph, v: VertexId, slots: Sequence[int]) -> MGraph:
    """The full subgraph through v whose roots lie in the span of the chosen basis rays.

    Root and vertex ids are kept; root coordinates are rewritten in the chosen
    basis rays, so the result lives in dimension k.
    """
    rec = _require_interior(g, v)
    chosen = sorted(set(slots))
    if not chosen or len(chosen) != len(slots) or chosen[0] < 0 or chosen[-1] >= g.dim:
        raise DimError(f"invalid slot selection {list(slots)} for dimension {g.dim}")
    span = [g.roots.ray(rec.basis[i]) for i in chosen]
    members = roots_in_span(g, span)
    component = span_component(g, v, members)

    metric = None
    if g.metric is not None:
        frame = np.asarray([[float(x) for x in r.dir] for r in span]).T
        metric = (frame.T @ np.asarray(g.metric) @ frame).tolist()

    builder = GraphBuilder(len(chosen), g.backend, metric=metric, notes=g.notes)
    for root_id in sorted(members):
        entry = g.roots[root_id]
        ray = canonicalize(members[root_id], g.backend)
        builder.roots.insert(RootEntry(root_id, ray, entry.invertible, entry.neg))
    for u in component:
        urec = g.vertex(u)
        kept = [s for s in urec.slots if s.via in members]
        if len(kept) != len(chosen):
            raise AxiomViolationError(
                f"vertex {u} has {len(kept)} edges in the span, expected {len(chosen)}"
            )
        builder.add_vertex(u, kept, interior=urec.interior)
    return builder.build(v)


def bipartite_check(g: MGraph) -> bool:
    return nx.is_bipartite(g.nx_graph)
