"""Axiom verification for geometric realizations.

On windows every check quantifies over interior vertices and over edges with
both ends interior; such reports are flagged ``window_sound``.
"""
import logging
from typing import Dict, FrozenSet, List, Tuple

from core.errors import MatsumotoError
from schemas.report import AxiomCheck, AxiomReport
from services.graph_model import MGraph, RootId, VertexId

logger = logging.getLogger(__name__)

MAX_WITNESSES = 20


class _Check:
    def __init__(self, name: str):
        self.name = name
        self.checked = 0
        self.witnesses: List[str] = []
        self.failed = False

    def fail(self, witness: str) -> None:
        self.failed = True
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append(witness)

    def result(self) -> AxiomCheck:
        return AxiomCheck(name=self.name, passed=not self.failed, checked=self.checked, witnesses=self.witnesses)


def _check_structure(g: MGraph) -> _Check:
    check = _Check("structure")
    for rec in g.vertices():
        check.checked += 1
        if len(rec.slots) != g.dim or len(rec.basis) != g.dim:
            check.fail(f"vertex {rec.id} has {len(rec.slots)} slots in dimension {g.dim}")
            continue
        for i, slot in enumerate(rec.slots):
            expected = slot.via if slot.infinite else g.roots.neg(slot.via)
            if rec.basis[i] != expected:
                check.fail(f"vertex {rec.id} slot {i}: basis root {rec.basis[i]} does not match edge root {slot.via}")
            if slot.infinite or slot.to is None:
                continue
            if slot.to not in g:
                check.fail(f"vertex {rec.id} slot {i} points outside the graph")
                continue
            back = g.roots.neg(slot.via)
            if not any(s.to == rec.id and s.via == back for s in g.vertex(slot.to).slots):
                check.fail(f"edge {rec.id}->{slot.to} has no reverse edge with root {back}")
    return check


def _check_roots(g: MGraph) -> _Check:
    check = _Check("axiom1")
    table = g.roots
    for first, second in table.duplicates():
        check.fail(f"roots {first} and {second} share the ray {list(table.ray(first).key)}")
    for entry in table:
        check.checked += 1
        opposite = table.lookup(-entry.ray)
        if not entry.invertible:
            if entry.neg is not None:
                check.fail(f"noninvertible root {entry.id} declares a negative {entry.neg}")
            if opposite is not None:
                check.fail(f"noninvertible root {entry.id} has its opposite ray in the table (root {opposite})")
            continue
        if entry.neg is None or entry.neg not in table:
            check.fail(f"invertible root {entry.id} has no negative")
            continue
        partner = table[entry.neg]
        if partner.neg != entry.id or not partner.invertible:
            check.fail(f"negation is not an involution on roots {entry.id} and {entry.neg}")
        if not g.impl.same(partner.ray.dir, (-entry.ray).dir):
            check.fail(f"root {entry.neg} is not the opposite ray of root {entry.id}")
    return check


def _check_bases(g: MGraph) -> Tuple[_Check, Dict[VertexId, FrozenSet[RootId]]]:
    check = _Check("axiom2")
    positive: Dict[VertexId, FrozenSet[RootId]] = {}
    for v in g.interior_ids():
        check.checked += 1
        rec = g.vertex(v)
        if len(set(rec.basis)) != g.dim:
            check.fail(f"vertex {v}: basis {list(rec.basis)} repeats a root")
            continue
        try:
            positive[v] = g.positive_set(v)
        except MatsumotoError as e:
            check.fail(f"vertex {v}: basis {list(rec.basis)} is not a basis ({e.message})")
    return check, positive


def _check_edges(g: MGraph, positive: Dict[VertexId, FrozenSet[RootId]]) -> _Check:
    check = _Check("axiom3")
    for u, _, w in g.oriented_edges():
        if u not in positive or w not in positive:
            continue
        check.checked += 1
        root = g.vertex(u).slots[g.slot_towards(u, w)].via
        opposite = g.roots.lookup(-g.roots.ray(root))
        gained = positive[w] - positive[u]
        lost = positive[u] - positive[w]
        expected_lost = set() if opposite is None else {opposite}
        if gained != {root} or lost != expected_lost:
            check.fail(
                f"edge {u}->{w} with root {root}: gained {sorted(gained)}, lost {sorted(lost)}"
                + ("" if opposite is not None else "; the opposite ray is not a root")
            )
    return check


def _check_distinct(positive: Dict[VertexId, FrozenSet[RootId]]) -> _Check:
    check = _Check("axiom4")
    seen: Dict[FrozenSet[RootId], VertexId] = {}
    for v, pos in sorted(positive.items()):
        check.checked += 1
        if pos in seen:
            check.fail(f"vertices {seen[pos]} and {v} have the same positive system")
        else:
            seen[pos] = v
    return check


def _check_noninvertible(g: MGraph, positive: Dict[VertexId, FrozenSet[RootId]]) -> _Check:
    check = _Check("noninvertible_positive")
    for entry in g.roots:
        if entry.invertible:
            continue
        for v, pos in sorted(positive.items()):
            check.checked += 1
            if entry.id not in pos:
                check.fail(f"noninvertible root {entry.id} is not positive at vertex {v}")
    return check


def _check_inversions(g: MGraph, positive: Dict[VertexId, FrozenSet[RootId]]) -> _Check:
    check = _Check("inversion_sets")
    base = positive.get(g.base)
    if base is None:
        check.fail(f"base vertex {g.base} has no positive system")
        return check
    for v, pos in sorted(positive.items()):
        check.checked += 1
        recomputed = pos - base
        stored = g.vertex(v).inversion
        if recomputed != stored:
            check.fail(f"vertex {v}: stored inversion set {sorted(stored)} but cones give {sorted(recomputed)}")
    return check


def check_axioms(g: MGraph) -> AxiomReport:
    roots = _check_roots(g)
    bases, positive = _check_bases(g)
    checks = [
        _check_structure(g),
        roots,
        bases,
        _check_edges(g, positive),
        _check_distinct(positive),
        _check_noninvertible(g, positive),
        _check_inversions(g, positive),
    ]
    window = not g.is_closed
    notes = list(g.notes)
    if window:
        notes.append("window-sound: checks quantify over interior vertices and interior edges only")
    report = AxiomReport(
        window_sound=window,
        vertices=len(g),
        interior_vertices=len(g.interior_ids()),
        roots=len(g.roots),
        checks=[c.result() for c in checks],
        notes=notes,
    )
    if report.passed:
        logger.info(f"Axiom check passed on {len(g)} vertices")
    else:
        failed = [c.name for c in report.checks if not c.passed]
        logger.warning(f"Axiom check failed: {failed}")
    return report
