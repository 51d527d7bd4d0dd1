import pytest

from schemas.backend import Backend
from services.generators import (
    build_cayley,
    build_product,
    build_rank2,
    build_weyl,
    cartan_matrix,
    coxeter_matrix_of_type,
)
from services.graph_model import GraphBuilder, MGraph, Slot, distance


def farthest(g: MGraph, v: int = None) -> int:
    """A vertex at maximal distance from v (the base by default)."""
    v = g.base if v is None else v
    return max(g.vertex_ids(), key=lambda w: (distance(g, v, w), -w))


def triangle() -> MGraph:
    """Three vertices on a cycle; odd cycles admit no realisation."""
    builder = GraphBuilder(2, Backend.RATIONAL)
    a, neg_a = builder.roots.add_pair([1, 0])
    b, neg_b = builder.roots.add_pair([0, 1])
    c, neg_c = builder.roots.add_pair([1, 1])
    builder.add_vertex(0, [Slot(a, to=1), Slot(c, to=2)])
    builder.add_vertex(1, [Slot(neg_a, to=0), Slot(b, to=2)])
    builder.add_vertex(2, [Slot(neg_b, to=1), Slot(neg_c, to=0)])
    return builder.build(0)


@pytest.fixture(scope="session")
def a2():
    return build_weyl(cartan_matrix("A", 2))


@pytest.fixture(scope="session")
def b2():
    return build_weyl(cartan_matrix("B", 2))


@pytest.fixture(scope="session")
def c2():
    return build_weyl(cartan_matrix("C", 2))


@pytest.fixture(scope="session")
def g2():
    return build_weyl(cartan_matrix("G", 2))


@pytest.fixture(scope="session")
def a3():
    return build_weyl(cartan_matrix("A", 3))


@pytest.fixture(scope="session")
def b3():
    return build_weyl(cartan_matrix("B", 3))


@pytest.fixture(scope="session")
def a1_cubed():
    a1 = coxeter_matrix_of_type("A", 1)
    return build_product(a1, a1, a1)


@pytest.fixture(scope="session")
def hexagon():
    return build_rank2("polygon", m=3)


@pytest.fixture(scope="session")
def octagon_float():
    return build_cayley(coxeter_matrix_of_type("B", 2))


@pytest.fixture(scope="session")
def segment3():
    return build_rank2("segment", k=3)


@pytest.fixture(scope="session")
def tail5():
    return build_rank2("tail", radius=5)


@pytest.fixture(scope="session")
def idihedral4():
    return build_rank2("idihedral", radius=4)
