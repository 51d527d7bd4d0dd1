"""Dual chambers, chamber location and fan reconstruction.

The chamber of a vertex v is the simplicial cone of functionals that are
nonnegative on every basis root of v. Its generators are the dual basis, and
the wall opposite generator i is the hyperplane of basis root i.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from core.errors import AxiomViolationError, BadFanError, DimError, OutOfWindowError
from schemas.backend import Backend
from services.axioms import check_axioms
from services.graph_model import GraphBuilder, MGraph, Path, RootId, Slot, Step, VertexId
from services.scalars import Ray, ScalarBackend, Vector, angle_between, canonicalize, get_backend

logger = logging.getLogger(__name__)


def _functional(g: MGraph, xi: Sequence) -> Vector:
    if len(xi) != g.dim:
        raise DimError(f"functional has {len(xi)} coordinates, expected {g.dim}")
    return g.impl.vector(xi)


def pairing(g: MGraph, xi: Sequence, root: RootId):
    return g.impl.dot(_functional(g, xi), g.roots.ray(root).dir)


def chamber_contains(g: MGraph, v: VertexId, xi: Sequence) -> bool:
    impl = g.impl
    return all(impl.nonneg(pairing(g, xi, r)) for r in g.vertex(v).basis)


def containing_chambers(g: MGraph, xi: Sequence, strict: bool = False) -> List[VertexId]:
    """Vertices whose chamber contains xi (in its interior when ``strict``)."""
    impl = g.impl
    found = []
    for v in g.vertex_ids():
        values = [pairing(g, xi, r) for r in g.vertex(v).basis]
        if strict:
            inside = all(not impl.nonneg(-x) for x in values)
        else:
            inside = all(impl.nonneg(x) for x in values)
        if inside:
            found.append(v)
    return found


def chamber_generators(g: MGraph, v: VertexId) -> List[Ray]:
    """Dual basis of the basis roots of v; generator i pairs to 1 with root i and 0 with the others."""
    impl = g.impl
    basis = [g.roots.ray(r).dir for r in g.vertex(v).basis]
    columns = [[row[k] for row in basis] for k in range(g.dim)]
    generators = []
    for j in range(g.dim):
        unit = [impl.coerce(1 if i == j else 0) for i in range(g.dim)]
        coeffs = impl.solve_in_span(columns, unit)
        if coeffs is None:
            raise DimError(f"basis of vertex {v} is not invertible")
        generators.append(canonicalize(coeffs, impl))
    return generators


def descend(g: MGraph, xi: Sequence) -> Optional[Path]:
    """Walk from the base towards the chamber of xi.

    Returns None when a noninvertible basis root is negative on xi, meaning
    xi lies outside the union of the chambers.

    Raises:
        OutOfWindowError: the walk needs an edge that is not materialised.
    """
    impl = g.impl
    current = g.base
    steps: List[Step] = []
    for _ in range(len(g) + 1):
        rec = g.vertex(current)
        values = [pairing(g, xi, r) for r in rec.basis]
        if any(slot.infinite and impl.negative(x) for slot, x in zip(rec.slots, values)):
            logger.debug(f"Functional {list(xi)} is negative on a noninvertible root at {current}")
            return None
        crossing = next(
            (slot for slot, x in zip(rec.slots, values) if not slot.infinite and impl.negative(x)), None
        )
        if crossing is None:
            return Path(g.base, tuple(steps))
        if crossing.to is None:
            raise OutOfWindowError(f"descent for {list(xi)} leaves the window at vertex {current}")
        steps.append(Step(crossing.via, crossing.to))
        current = crossing.to
    raise OutOfWindowError(f"descent for {list(xi)} does not terminate within the window")


def locate(g: MGraph, xi: Sequence) -> Optional[VertexId]:
    path = descend(g, xi)
    return None if path is None else path.end


def boundary_roots(g: MGraph) -> FrozenSet[RootId]:
    """Roots of dangling slots and their negatives."""
    found = set()
    for rec in g.vertices():
        for slot in rec.slots:
            if not slot.infinite and slot.to is None:
                found.add(slot.via)
                found.add(g.roots.neg(slot.via))
    return frozenset(found)


def in_D_prime(g: MGraph, xi: Sequence) -> bool:
    """Whether xi is nonnegative on every noninvertible root and on all but finitely many positive roots.

    On a window the finiteness condition is replaced by asking that no root
    separating xi from the base chamber sits on the window boundary.
    """
    impl = g.impl
    for entry in g.roots:
        if not entry.invertible and impl.negative(pairing(g, xi, entry.id)):
            return False
    if g.is_closed:
        return True
    base_positive = g.positive_set(g.base)
    separating = {
        r for r in base_positive if g.roots.invertible(r) and impl.negative(pairing(g, xi, r))
    }
    return not (separating & boundary_roots(g))


def isolation_gap(g: MGraph, root: RootId) -> float:
    """Smallest angle in radians between the root and any other root of the table."""
    direction = g.roots.ray(root).dir
    gaps = [
        angle_between(direction, entry.ray.dir, g.metric) for entry in g.roots if entry.id != root
    ]
    return min(gaps) if gaps else float("inf")


# Fans


@dataclass(frozen=True)
class FanChamber:
    id: int
    generators: Tuple[Vector, ...]

    def points(self) -> List[Tuple[float, float]]:
        """Coordinates in the slice z = 1 (dimension 3 only)."""
        return [(float(x) / float(z), float(y) / float(z)) for x, y, z in self.generators]


@dataclass
class Fan2D:
    """A simplicial fan of dimension 2, or of dimension 3 described in the slice z = 1.

    ``open_walls`` lists (chamber, wall) pairs cut by the window; they become
    dangling slots rather than infinite edges.
    """

    ambient_dim: int
    backend: Backend
    chambers: List[FanChamber]
    open_walls: List[Tuple[int, int]] = field(default_factory=list)
    base: Optional[int] = None
    notes: List[str] = field(default_factory=list)

    @property
    def impl(self) -> ScalarBackend:
        return get_backend(self.backend)

    def walls(self) -> Dict[FrozenSet[int], List[Tuple[int, int]]]:
        """Facets keyed by their generator rays, with the (chamber, wall) pairs bounded by each."""
        registry: List[Vector] = []

        def ray_id(vec: Vector) -> int:
            canon = canonicalize(vec, self.impl).dir
            for k, known in enumerate(registry):
                if self.impl.same(known, canon):
                    return k
            registry.append(canon)
            return len(registry) - 1

        facets: Dict[FrozenSet[int], List[Tuple[int, int]]] = {}
        for chamber in self.chambers:
            ids = [ray_id(gen) for gen in chamber.generators]
            for i in range(len(ids)):
                facet = frozenset(ids[:i] + ids[i + 1:])
                facets.setdefault(facet, []).append((chamber.id, i))
        return facets

    def adjacency(self) -> List[Tuple[int, int]]:
        pairs = set()
        for sides in self.walls().values():
            if len(sides) == 2:
                a, b = sorted(c for c, _ in sides)
                pairs.add((a, b))
        return sorted(pairs)


def _wall_roots(impl: ScalarBackend, gens: Sequence[Vector]) -> List[Vector]:
    """Root i vanishes on every generator except i and is positive on generator i."""
    d = len(gens)
    roots = []
    for i in range(d):
        others = [gens[j] for j in range(d) if j != i]
        if d == 2:
            (x, y), = others
            normal = (-y, x)
        else:
            (a1, a2, a3), (b1, b2, b3) = others
            normal = (a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1)
        value = impl.dot(normal, gens[i])
        if impl.is_zero(value):
            raise BadFanError("chamber generators are linearly dependent")
        roots.append(normal if value > 0 else tuple(-x for x in normal))
    return roots


def _overlapping(impl: ScalarBackend, first: Sequence[Vector], second: Sequence[Vector], walls: Sequence[Vector]) -> bool:
    """True unless some wall root of either chamber separates the two cones."""
    for normal in walls:
        values_first = [impl.dot(normal, gen) for gen in first]
        values_second = [impl.dot(normal, gen) for gen in second]
        if all(impl.nonneg(x) for x in values_first) and all(impl.nonneg(-x) for x in values_second):
            return False
        if all(impl.nonneg(-x) for x in values_first) and all(impl.nonneg(x) for x in values_second):
            return False
    return True


def dual_reconstruct(fan: Fan2D) -> MGraph:
    """One vertex per chamber, a compact edge per shared wall and an infinite edge per free wall.

    Raises:
        BadFanError: a chamber is not simplicial or two chambers overlap.
        AxiomViolationError: the resulting graph fails the axioms.
    """
    d = fan.ambient_dim
    if d not in (2, 3):
        raise BadFanError(f"fans are supported in dimension 2 and 3, not {d}")
    if not fan.chambers:
        raise BadFanError("fan has no chambers")
    impl = fan.impl
    gens: Dict[int, List[Vector]] = {}
    normals: Dict[int, List[Vector]] = {}
    for chamber in fan.chambers:
        if chamber.id in gens:
            raise BadFanError(f"duplicate chamber id {chamber.id}")
        if len(chamber.generators) != d or any(len(gen) != d for gen in chamber.generators):
            raise BadFanError(f"chamber {chamber.id} is not simplicial in dimension {d}")
        gens[chamber.id] = [impl.vector(gen) for gen in chamber.generators]
        if impl.rank(gens[chamber.id]) != d:
            raise BadFanError(f"chamber {chamber.id} has dependent generators")
        normals[chamber.id] = _wall_roots(impl, gens[chamber.id])

    ids = sorted(gens)
    for n, a in enumerate(ids):
        for b in ids[n + 1:]:
            if _overlapping(impl, gens[a], gens[b], normals[a] + normals[b]):
                raise BadFanError(f"chambers {a} and {b} overlap")

    builder = GraphBuilder(d, fan.backend, notes=fan.notes)
    roots = builder.roots
    slots: Dict[int, List[Optional[Slot]]] = {c: [None] * d for c in ids}
    open_walls = set(map(tuple, fan.open_walls))
    for sides in fan.walls().values():
        if len(sides) > 2:
            raise BadFanError(f"wall shared by more than two chambers: {sides}")
        if len(sides) == 2:
            (a, i), (b, j) = sides
            root_a, neg_a = roots.add_pair(normals[a][i])
            slots[a][i] = Slot(neg_a, to=b)
            slots[b][j] = Slot(root_a, to=a)
            continue
        (a, i), = sides
        if (a, i) in open_walls:
            slots[a][i] = Slot(roots.add_pair(normals[a][i])[1])
        else:
            slots[a][i] = Slot(roots.add_noninvertible(normals[a][i]), infinite=True)

    for c in ids:
        builder.add_vertex(c, slots[c])
    base = ids[0] if fan.base is None else fan.base
    graph = builder.build(base)
    report = check_axioms(graph)
    if not report.passed:
        failed = [check.name for check in report.checks if not check.passed]
        raise AxiomViolationError(f"reconstructed graph fails {', '.join(failed)}", report=report)
    return graph


def extract_fan(g: MGraph) -> Fan2D:
    """The chambers of every materialised vertex, with dangling slots as open walls."""
    if g.dim not in (2, 3):
        raise BadFanError(f"fans are supported in dimension 2 and 3, not {g.dim}")
    chambers = []
    open_walls = []
    for v in g.vertex_ids():
        generators = tuple(r.dir for r in chamber_generators(g, v))
        chambers.append(FanChamber(v, generators))
        for i, slot in enumerate(g.vertex(v).slots):
            if not slot.infinite and slot.to is None:
                open_walls.append((v, i))
    return Fan2D(g.dim, g.backend, chambers, open_walls, base=g.base, notes=list(g.notes))


# Midpoint example

_HALF = Fraction(1, 2)


def midpoint_points(n: int) -> Dict[str, Tuple[Fraction, Fraction]]:
    points = {
        "A": (Fraction(0), Fraction(0)),
        "B": (Fraction(1), Fraction(0)),
        "C": (Fraction(0), Fraction(1)),
        "M0": (_HALF, _HALF),
    }
    for k in range(1, n + 1):
        points[f"M{k}"] = (Fraction(0), 1 - Fraction(1, 2 ** k))
    return points


def midpoint_fan(n: int) -> Tuple[Fan2D, MGraph]:
    """Triangle ABC subdivided towards C by the midpoints M_k of M_{k-1}C.

    Chambers are ABM0, AM0M1 and M0M(k-1)Mk for k = 2..n; the wall M0Mn is
    left open. Walls on the line AC share one noninvertible root.
    """
    if n < 1:
        raise DimError("midpoint fan needs n >= 1")
    points = midpoint_points(n)

    def lift(name: str) -> Vector:
        x, y = points[name]
        return (x, y, Fraction(1))

    triangles = [("A", "B", "M0"), ("A", "M0", "M1")]
    triangles += [("M0", f"M{k - 1}", f"M{k}") for k in range(2, n + 1)]
    chambers = [FanChamber(c, tuple(lift(p) for p in tri)) for c, tri in enumerate(triangles)]
    # the last chamber's wall M0Mn lies opposite its middle vertex
    open_wall = (n, 1) if n >= 2 else (1, 0)
    notes = [
        f"midpoint fan of depth {n}: chambers ABM0, AM0M1, M0M(k-1)Mk for k = 2..{n}",
        "the chambers AM(k)M(k+1) would be degenerate since A and all Mk lie on AC; the fan M0M(k-1)Mk is used instead",
        "the wall AM0 separates the first two chambers and is included as a root",
        "the ray of M0C is the limit of the M0Mn roots and coincides with the BM0 root; it labels no extra edge",
    ]
    fan = Fan2D(3, Backend.RATIONAL, chambers, [open_wall], base=0, notes=notes)
    logger.info(f"Midpoint fan of depth {n}: {len(chambers)} chambers")
    return fan, dual_reconstruct(fan)


def midpoint_wall_root(k: int) -> Ray:
    """Root of the line M0Mk, positive on the side of A."""
    t = Fraction(1, 2 ** k)
    return canonicalize((-_HALF + t, -_HALF, _HALF - t / 2), Backend.RATIONAL)


def limit_direction() -> Ray:
    """Limit of the M0Mn roots: the line M0C, which passes through B."""
    return canonicalize((-1, -1, 1), Backend.RATIONAL)


def limit_gap(n: int) -> float:
    """Angle between the limit direction and the root of M0Mn."""
    return angle_between(limit_direction().dir, midpoint_wall_root(n).dir)
