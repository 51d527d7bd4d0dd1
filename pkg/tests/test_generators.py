import math

import pytest

from conftest import triangle
from core.errors import (
    AxiomViolationError,
    BackendMismatchError,
    BadCartanMatrixError,
    BadCoxeterMatrixError,
    OddPolygonError,
    ParseError,
)
from schemas.backend import Backend
from services import generators
from services.axioms import check_axioms
from services.coloring import colored_isomorphism
from services.generators import (
    INF,
    CartanMatrix,
    CoxeterMatrix,
    build_cayley,
    build_from_file,
    build_rank2,
    build_segment,
    build_weyl,
    cartan_matrix,
    coxeter_form,
    coxeter_from_cartan,
    coxeter_matrix_of_type,
    dihedral_matrix,
    enumerate_group,
    reducible_coxeter,
    tail_angle,
)
from services.serialization import dump_graph, graph_to_document

FINITE_TYPES = [
    ("A", 2, 6, 6),
    ("B", 2, 8, 8),
    ("G", 2, 12, 12),
    ("A", 3, 24, 12),
    ("B", 3, 48, 18),
]


@pytest.mark.parametrize("kind, rank, order, roots", FINITE_TYPES)
def test_weyl_groups(kind, rank, order, roots):
    g = build_weyl(cartan_matrix(kind, rank))
    assert len(g) == order
    assert len(g.roots) == roots
    assert g.is_closed
    assert g.backend is Backend.RATIONAL
    assert g.metric is not None
    assert check_axioms(g).passed


@pytest.mark.parametrize("kind, rank, order, roots", FINITE_TYPES)
def test_coxeter_groups_match_weyl_groups(kind, rank, order, roots):
    matrix = coxeter_matrix_of_type(kind, rank)
    g = build_cayley(matrix)
    assert len(g) == order
    assert len(g.roots) == roots
    assert enumerate_group(matrix) == order
    assert enumerate_group(cartan_matrix(kind, rank)) == order


def test_h3_has_120_elements():
    matrix = CoxeterMatrix.from_rows([[1, 3, 2], [3, 1, 5], [2, 5, 1]])
    assert not matrix.is_exact
    assert enumerate_group(matrix) == 120
    g = build_cayley(matrix)
    assert len(g) == 120
    assert len(g.roots) == 30


def test_exact_coxeter_graphs_use_rationals():
    g = build_cayley(coxeter_matrix_of_type("A", 3), backend=Backend.RATIONAL)
    assert len(g) == 24
    with pytest.raises(BackendMismatchError):
        coxeter_form(coxeter_matrix_of_type("B", 2), Backend.RATIONAL)


def test_coxeter_from_cartan():
    assert coxeter_from_cartan(cartan_matrix("G", 2)).to_rows() == [[1, 6], [6, 1]]
    assert coxeter_from_cartan(cartan_matrix("B", 3)).to_rows() == [[1, 3, 2], [3, 1, 4], [2, 4, 1]]
    affine = CartanMatrix.from_rows([[2, -2], [-2, 2]])
    assert coxeter_from_cartan(affine).m(0, 1) == INF


def test_c2_is_the_transpose_of_b2():
    assert cartan_matrix("C", 2).to_rows() == [[2, -2], [-1, 2]]
    assert cartan_matrix("B", 2).to_rows() == [[2, -1], [-2, 2]]


def test_roots_are_rays_not_vectors(b2, c2):
    assert colored_isomorphism(b2, c2) is not None


def test_matrix_validation():
    with pytest.raises(BadCoxeterMatrixError):
        CoxeterMatrix.from_rows([[1, 3], [4, 1]])
    with pytest.raises(BadCoxeterMatrixError):
        CoxeterMatrix.from_rows([[2, 3], [3, 1]])
    with pytest.raises(BadCartanMatrixError):
        CartanMatrix.from_rows([[2, -1], [0, 2]])
    with pytest.raises(BadCartanMatrixError):
        CartanMatrix.from_rows([[2, 1], [1, 2]])
    with pytest.raises(BadCartanMatrixError):
        cartan_matrix("E", 6)


def test_zero_encodes_infinity():
    matrix = CoxeterMatrix.from_rows([[1, 0], [0, 1]])
    assert matrix == dihedral_matrix(INF)
    assert matrix.to_rows() == [[1, 0], [0, 1]]


def test_reducible_blocks_commute():
    a1 = coxeter_matrix_of_type("A", 1)
    matrix = reducible_coxeter(coxeter_matrix_of_type("A", 2), a1)
    assert matrix.to_rows() == [[1, 3, 2], [3, 1, 2], [2, 2, 1]]
    assert len(build_cayley(matrix)) == 12


def test_infinite_dihedral_window():
    g = build_rank2("idihedral", radius=4)
    assert len(g) == 9
    assert len(g.interior_ids()) == 7
    assert not g.is_closed
    assert g.metric is None
    assert any("positive definite" in note for note in g.notes)
    report = check_axioms(g)
    assert report.passed
    assert report.window_sound


@pytest.mark.parametrize("m", range(2, 9))
def test_polygons(m):
    g = build_rank2("polygon", m=m)
    assert len(g) == 2 * m
    assert g.is_closed
    assert check_axioms(g).passed
    assert g.backend is (Backend.RATIONAL if m in (2, 3) else Backend.FLOAT)


def test_polygon_by_edge_count():
    assert len(build_rank2("polygon", edges=10)) == 10
    with pytest.raises(OddPolygonError):
        build_rank2("polygon", edges=7)
    with pytest.raises(BadCoxeterMatrixError):
        build_rank2("polygon", m=1)


@pytest.mark.parametrize("k", range(1, 13))
def test_segments(k):
    g = build_segment(k)
    assert len(g) == k + 1
    assert g.is_closed
    assert len(g.roots) == 2 * k + 2
    assert sum(1 for entry in g.roots if not entry.invertible) == 2
    assert check_axioms(g).passed


def test_tail_window():
    g = build_rank2("tail", radius=6)
    assert len(g) == 7
    assert len(g.interior_ids()) == 6
    report = check_axioms(g)
    assert report.passed
    assert report.window_sound
    assert sum(1 for entry in g.roots if not entry.invertible) == 1


def test_tail_angles_accumulate_at_minus_80():
    angles = [tail_angle(i) for i in range(1, 50)]
    assert all(a > b for a, b in zip(angles, angles[1:]))
    assert all(a > -80 for a in angles)
    assert math.isclose(tail_angle(10**6), -80, abs_tol=1e-3)


def test_unknown_rank2_kind():
    with pytest.raises(ParseError):
        build_rank2("spiral")


def test_file_round_trip_is_exact(b3):
    doc = graph_to_document(b3)
    rebuilt = build_from_file(doc)
    assert dump_graph(rebuilt) == dump_graph(b3)
    assert colored_isomorphism(b3, rebuilt) is not None


def test_file_input_rejects_garbage():
    with pytest.raises(ParseError):
        build_from_file({"dim": 2, "backend": "rational"})


def test_generated_graphs_are_checked(monkeypatch):
    sizes = []
    real = generators.check_axioms

    def counting(g):
        sizes.append(len(g))
        return real(g)

    monkeypatch.setattr(generators, "check_axioms", counting)
    build_weyl(cartan_matrix("A", 2))
    build_rank2("segment", k=2)
    build_rank2("tail", radius=3)
    assert sizes == [6, 3, 4]
    build_weyl(cartan_matrix("A", 2), verify=False)
    build_rank2("polygon", m=4, verify=False)
    assert sizes == [6, 3, 4]


def test_failed_checks_stop_generation(monkeypatch):
    failing = check_axioms(triangle())
    monkeypatch.setattr(generators, "check_axioms", lambda g: failing)
    with pytest.raises(AxiomViolationError) as info:
        build_rank2("polygon", m=3)
    assert info.value.report is failing
    assert len(build_rank2("polygon", m=3, verify=False)) == 6
