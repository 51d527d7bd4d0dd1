"""Edge correspondences, global edge colorings and holonomy.

Crossing an edge with root a identifies the basis slots at both ends: the
traversed slot pairs with its reverse and every other basis root is matched
by its image in the quotient by a.
"""
import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from core.errors import (
    AxiomViolationError,
    DegenerateProjectionError,
    InvalidPathError,
    NotClosedError,
    OutOfWindowError,
)
from schemas.coloring import Color
from services.graph_model import MGraph, RootId, VertexId
from services.scalars import quotient_ray

logger = logging.getLogger(__name__)


def edge_correspondence(g: MGraph, v: VertexId, w: VertexId) -> Dict[int, int]:
    """Bijection from the slots of v to the slots of w along the edge v -> w."""
    i = g.slot_towards(v, w)
    j = g.slot_towards(w, v)
    rec_v, rec_w = g.vertex(v), g.vertex(w)
    root = g.roots.ray(rec_v.slots[i].via)
    frame = [g.roots.ray(r) for k, r in enumerate(rec_v.basis) if k != i]
    impl = g.impl

    def project(root_id: RootId):
        try:
            return quotient_ray(root, g.roots.ray(root_id), frame)
        except DegenerateProjectionError:
            raise AxiomViolationError(f"basis root {root_id} is proportional to the edge root of {v}->{w}")

    targets = [(l, project(r)) for l, r in enumerate(rec_w.basis) if l != j]
    mapping = {i: j}
    for k, r in enumerate(rec_v.basis):
        if k == i:
            continue
        image = project(r)
        matches = [l for l, candidate in targets if impl.same(candidate.dir, image.dir)]
        if len(matches) != 1:
            raise AxiomViolationError(
                f"slot {k} of {v} has {len(matches)} quotient matches at {w}", vertex=v, slot=k
            )
        mapping[k] = matches[0]
    if len(set(mapping.values())) != g.dim:
        raise AxiomViolationError(f"edge {v}->{w} does not induce a bijection of slots")
    return mapping


@dataclass(frozen=True)
class Holonomy:
    """Permutation of the slots at the start of a closed walk."""

    perm: Tuple[int, ...]

    @property
    def is_identity(self) -> bool:
        return all(i == p for i, p in enumerate(self.perm))

    def __mul__(self, other: "Holonomy") -> "Holonomy":
        """Transport along self, then along other."""
        return Holonomy(tuple(other.perm[p] for p in self.perm))


def holonomy(g: MGraph, walk: Sequence[VertexId]) -> Holonomy:
    if not walk:
        raise NotClosedError("empty walk")
    if walk[0] != walk[-1]:
        raise NotClosedError(f"walk starts at {walk[0]} but ends at {walk[-1]}")
    perm = list(range(g.dim))
    for u, w in zip(walk, walk[1:]):
        try:
            step = edge_correspondence(g, u, w)
        except InvalidPathError:
            raise InvalidPathError(f"walk steps between non-adjacent vertices {u} and {w}")
        perm = [step[p] for p in perm]
    return Holonomy(tuple(perm))


def cycle_walks(g: MGraph) -> List[List[VertexId]]:
    """Closed walks for a cycle basis of the compact edges."""
    walks = []
    for cycle in nx.cycle_basis(g.nx_graph, root=g.base):
        walks.append(list(cycle) + [cycle[0]])
    return walks


@dataclass
class Coloring:
    palette: Tuple[Color, ...]
    slot_colors: Dict[VertexId, Tuple[int, ...]] = field(default_factory=dict)

    def color(self, v: VertexId, slot: int) -> Color:
        return self.palette[self.slot_colors[v][slot]]

    def edge_colors(self, g: MGraph) -> Dict[str, Color]:
        edges = {}
        for v in g.vertex_ids():
            for i, slot in enumerate(g.vertex(v).slots):
                if slot.infinite or slot.to is None:
                    edges[f"{v}:{i}"] = self.color(v, i)
                elif v < slot.to:
                    edges[f"{v}-{slot.to}"] = self.color(v, i)
        return edges


@dataclass
class ColoringResult:
    coloring: Optional[Coloring] = None
    witness: Optional[List[VertexId]] = None

    @property
    def ok(self) -> bool:
        return self.coloring is not None


def _tree_path(parent: Dict[VertexId, Optional[VertexId]], v: VertexId) -> List[VertexId]:
    path = [v]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path[::-1]


def global_coloring(g: MGraph, palette: Optional[Sequence[Color]] = None) -> ColoringResult:
    """Transport the base slots over a spanning tree and check the remaining edges.

    Returns a coloring, or a closed walk through the base whose holonomy is
    not the identity.
    """
    palette = tuple(range(g.dim)) if palette is None else tuple(palette)
    if len(palette) != g.dim or len(set(palette)) != g.dim:
        raise AxiomViolationError(f"palette {list(palette)} must list {g.dim} distinct colors")
    interior = g.interior_ids()
    if not interior or not nx.is_connected(g.nx_graph.subgraph(interior)):
        raise OutOfWindowError("interior of the window is not connected")

    colors: Dict[VertexId, Tuple[int, ...]] = {g.base: tuple(range(g.dim))}
    parent: Dict[VertexId, Optional[VertexId]] = {g.base: None}
    queue = deque([g.base])
    while queue:
        u = queue.popleft()
        for slot in g.vertex(u).slots:
            w = slot.to
            if slot.infinite or w is None:
                continue
            step = edge_correspondence(g, u, w)
            transported = [0] * g.dim
            for k, l in step.items():
                transported[l] = colors[u][k]
            transported = tuple(transported)
            if w not in colors:
                colors[w] = transported
                parent[w] = u
                queue.append(w)
            elif colors[w] != transported:
                walk = _tree_path(parent, u) + _tree_path(parent, w)[::-1]
                logger.warning(f"Coloring is inconsistent along edge {u}->{w}")
                return ColoringResult(witness=walk)

    logger.info(f"Global coloring with {g.dim} colors on {len(colors)} vertices")
    return ColoringResult(coloring=Coloring(palette, colors))


@dataclass(frozen=True)
class Isomorphism:
    vertices: Dict[VertexId, VertexId]
    roots: Dict[RootId, RootId]
    palette: Tuple[int, ...]


def _try_match(
    g1: MGraph, c1: Coloring, g2: MGraph, c2: Coloring, image: VertexId, perm: Tuple[int, ...]
) -> Optional[Isomorphism]:
    vmap = {g1.base: image}
    rmap: Dict[RootId, RootId] = {}
    queue = deque([g1.base])
    while queue:
        u = queue.popleft()
        u2 = vmap[u]
        slots2 = g2.vertex(u2).slots
        where = {color: l for l, color in enumerate(c2.slot_colors[u2])}
        for k, slot in enumerate(g1.vertex(u).slots):
            slot2 = slots2[where[perm[c1.slot_colors[u][k]]]]
            if slot.infinite != slot2.infinite or (slot.to is None) != (slot2.to is None):
                return None
            if rmap.setdefault(slot.via, slot2.via) != slot2.via:
                return None
            if slot.infinite or slot.to is None:
                continue
            known = vmap.get(slot.to)
            if known is None:
                vmap[slot.to] = slot2.to
                queue.append(slot.to)
            elif known != slot2.to:
                return None
    if len(vmap) != len(g1) or len(set(vmap.values())) != len(g2):
        return None
    if len(set(rmap.values())) != len(rmap):
        return None
    return Isomorphism(vmap, rmap, perm)


def colored_isomorphism(g1: MGraph, g2: MGraph) -> Optional[Isomorphism]:
    """An isomorphism of colored graphs with a consistent bijection of root ids, if one exists."""
    if g1.dim != g2.dim or len(g1) != len(g2) or len(g1.roots) != len(g2.roots):
        return None
    r1, r2 = global_coloring(g1), global_coloring(g2)
    if not r1.ok or not r2.ok:
        return None
    for image in g2.vertex_ids():
        for perm in itertools.permutations(range(g1.dim)):
            found = _try_match(g1, r1.coloring, g2, r2.coloring, image, perm)
            if found is not None:
                return found
    return None
