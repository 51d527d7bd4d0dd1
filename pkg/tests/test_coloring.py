import itertools

import pytest

from core.errors import AxiomViolationError, NotClosedError, OutOfWindowError
from services.braid import rank2_at
from services.coloring import (
    Holonomy,
    colored_isomorphism,
    cycle_walks,
    edge_correspondence,
    global_coloring,
    holonomy,
)
from services.scalars import SimplicialCone, in_cone


@pytest.mark.parametrize("name", ["a2", "b2", "g2", "a3", "b3", "a1_cubed", "octagon_float", "segment3"])
def test_coloring_is_consistent_across_edges(name, request):
    g = request.getfixturevalue(name)
    result = global_coloring(g)
    assert result.ok
    coloring = result.coloring
    for u, i, w in g.oriented_edges():
        j = g.slot_towards(w, u)
        assert coloring.color(u, i) == coloring.color(w, j)
    for v in g.vertex_ids():
        assert sorted(coloring.slot_colors[v]) == list(range(g.dim))


def test_edge_colors_cover_every_edge(a3):
    edges = global_coloring(a3).coloring.edge_colors(a3)
    assert len(edges) == 24 * 3 // 2
    assert set(edges.values()) == {0, 1, 2}


def test_named_palette(b2):
    result = global_coloring(b2, ["red", "blue"])
    assert set(result.coloring.edge_colors(b2).values()) == {"red", "blue"}
    with pytest.raises(AxiomViolationError):
        global_coloring(b2, ["red", "red"])


def test_infinite_edges_are_colored(segment3):
    edges = global_coloring(segment3).coloring.edge_colors(segment3)
    assert len(edges) == 3 + 2
    assert sum(1 for key in edges if ":" in key) == 2


def test_holonomy_is_trivial_on_cycles(b3):
    walks = cycle_walks(b3)
    assert walks
    for walk in walks:
        assert holonomy(b3, walk).is_identity


def test_edge_correspondence_is_a_bijection(a3):
    for u, i, w in a3.oriented_edges():
        mapping = edge_correspondence(a3, u, w)
        assert mapping[i] == a3.slot_towards(w, u)
        assert sorted(mapping.values()) == [0, 1, 2]


def test_holonomy_needs_a_closed_walk(a2):
    w = a2.vertex(a2.base).slots[0].to
    with pytest.raises(NotClosedError):
        holonomy(a2, [a2.base, w])
    assert holonomy(a2, [a2.base, w, a2.base]).is_identity


def test_holonomy_composition():
    swap = Holonomy((1, 0, 2))
    cycle = Holonomy((1, 2, 0))
    assert (swap * swap).is_identity
    assert (cycle * cycle * cycle).is_identity
    assert not (swap * cycle).is_identity


def test_windows_with_boundary_are_colored_on_the_interior(idihedral4):
    result = global_coloring(idihedral4)
    assert result.ok
    assert set(result.coloring.slot_colors) == set(idihedral4.vertex_ids())


def test_colored_isomorphism(b2, c2, g2, a2):
    found = colored_isomorphism(b2, c2)
    assert found is not None
    assert sorted(found.vertices) == b2.vertex_ids()
    assert len(set(found.roots.values())) == len(b2.roots)
    assert colored_isomorphism(b2, g2) is None
    assert colored_isomorphism(a2, a2) is not None


@pytest.mark.parametrize("name", ["b2", "g2", "a3"])
def test_edge_correspondence_stays_in_the_edge_cone(name, request):
    g = request.getfixturevalue(name)
    for u, i, w in g.oriented_edges():
        mapping = edge_correspondence(g, u, w)
        # basis[i] at u is the negative of the crossed root
        crossed_back = g.roots.ray(g.vertex(u).basis[i])
        for k, l in mapping.items():
            if k == i:
                continue
            source = g.roots.ray(g.vertex(u).basis[k])
            target = g.roots.ray(g.vertex(w).basis[l])
            assert in_cone(SimplicialCone((source, crossed_back)), target), (u, w, k, l)


@pytest.mark.parametrize("name", ["a3", "b3"])
def test_rank2_cells_use_two_colors(name, request):
    g = request.getfixturevalue(name)
    coloring = global_coloring(g).coloring
    for v in g.vertex_ids():
        slots = g.vertex(v).slots
        for i, j in itertools.combinations(range(g.dim), 2):
            cell = rank2_at(g, v, slots[i].via, slots[j].via)
            colors = {
                coloring.color(u, k)
                for u in cell.vertices
                for k, slot in enumerate(g.vertex(u).slots)
                if slot.via in cell.members
            }
            assert colors == {coloring.color(v, i), coloring.color(v, j)}


@pytest.mark.parametrize("name", ["g2", "a3", "b3"])
def test_coloring_matches_generator_labels(name, request):
    g = request.getfixturevalue(name)
    coloring = global_coloring(g).coloring
    # slot x of every Cayley vertex is the edge of generator x
    labels = coloring.slot_colors[g.base]
    for v in g.vertex_ids():
        assert coloring.slot_colors[v] == labels
