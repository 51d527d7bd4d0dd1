import math
import numpy as np
import pytest

from conftest import farthest
from core.errors import BadFanError, DimError, OutOfWindowError
from schemas.backend import Backend
from services.axioms import check_axioms
from services.dual import (
    Fan2D,
    FanChamber,
    boundary_roots,
    chamber_generators,
    containing_chambers,
    descend,
    dual_reconstruct,
    extract_fan,
    in_D_prime,
    isolation_gap,
    limit_direction,
    limit_gap,
    locate,
    midpoint_fan,
    midpoint_wall_root,
    pairing,
)
from services.graph_model import distance
from services.scalars import canonicalize


def test_base_chamber_and_its_antipode(a2):
    assert locate(a2, (-1, -1)) == a2.base
    assert locate(a2, (1, 1)) == farthest(a2)
    path = descend(a2, (1, 1))
    assert len(path) == 3


def test_chamber_generators_are_the_dual_basis(a3):
    impl = a3.impl
    for v in a3.vertex_ids():
        basis = a3.vertex(v).basis
        for i, generator in enumerate(chamber_generators(a3, v)):
            for j, root in enumerate(basis):
                value = impl.dot(generator.dir, a3.roots.ray(root).dir)
                assert (value > 0) if i == j else (value == 0)


@pytest.mark.parametrize("name", ["a2", "b2", "g2", "a3"])
def test_locate_agrees_with_chamber_membership(name, request):
    g = request.getfixturevalue(name)
    rng = np.random.default_rng(5)
    checked = 0
    for xi in rng.integers(-20, 21, size=(500, g.dim)):
        xi = [int(x) for x in xi]
        if any(pairing(g, xi, entry.id) == 0 for entry in g.roots):
            continue
        assert containing_chambers(g, xi, strict=True) == [locate(g, xi)]
        assert in_D_prime(g, xi)
        checked += 1
    assert checked > 250


def test_functional_dimension_is_checked(a2):
    with pytest.raises(DimError):
        locate(a2, (1, 2, 3))


def test_noninvertible_roots_bound_the_cone(segment3):
    # the infinite edge at the base has its root at 90 degrees
    assert locate(segment3, (0.0, -1.0)) is None
    assert not in_D_prime(segment3, (0.0, -1.0))
    inside = (math.cos(math.radians(60)), math.sin(math.radians(60)))
    assert locate(segment3, inside) is not None
    assert in_D_prime(segment3, inside)


def test_descent_leaves_a_window(idihedral4):
    with pytest.raises(OutOfWindowError):
        locate(idihedral4, (1, 1))
    assert not in_D_prime(idihedral4, (1, 1))
    assert locate(idihedral4, (-1, -1)) == idihedral4.base
    assert in_D_prime(idihedral4, (-1, -1))


def test_boundary_roots_of_a_window(idihedral4, a2):
    assert boundary_roots(a2) == frozenset()
    found = boundary_roots(idihedral4)
    assert len(found) == 4
    for r in found:
        assert idihedral4.roots.neg(r) in found


@pytest.mark.parametrize("name", ["a2", "b2", "g2", "a3", "b3"])
def test_isolated_roots(name, request):
    g = request.getfixturevalue(name)
    for entry in g.roots:
        assert isolation_gap(g, entry.id) > 0.1


def test_hexagon_roots_are_sixty_degrees_apart(hexagon):
    assert len(hexagon.roots) == 6
    for entry in hexagon.roots:
        assert isolation_gap(hexagon, entry.id) == pytest.approx(math.pi / 3)


@pytest.mark.parametrize("name", ["a2", "b2", "g2", "segment3", "tail5"])
def test_fan_round_trip(name, request):
    g = request.getfixturevalue(name)
    rebuilt = dual_reconstruct(extract_fan(g))
    assert rebuilt.vertex_ids() == g.vertex_ids()
    assert sorted(map(sorted, rebuilt.nx_graph.edges)) == sorted(map(sorted, g.nx_graph.edges))
    assert len(rebuilt.roots) == len(g.roots)
    assert len(rebuilt.interior_ids()) == len(g.interior_ids())


def test_rational_fan_round_trip_keeps_rays(a3):
    rebuilt = dual_reconstruct(extract_fan(a3))
    assert {entry.ray.key for entry in rebuilt.roots} == {entry.ray.key for entry in a3.roots}
    assert check_axioms(rebuilt).passed


def test_overlapping_chambers_are_rejected():
    quadrant = ((1, 0), (0, 1))
    fan = Fan2D(2, Backend.RATIONAL, [FanChamber(0, quadrant), FanChamber(1, quadrant)])
    with pytest.raises(BadFanError):
        dual_reconstruct(fan)
    tilted = Fan2D(2, Backend.RATIONAL, [FanChamber(0, quadrant), FanChamber(1, ((1, 1), (-1, 1)))])
    with pytest.raises(BadFanError):
        dual_reconstruct(tilted)


def test_quadrants_make_a_square():
    quadrants = [((1, 0), (0, 1)), ((0, 1), (-1, 0)), ((-1, 0), (0, -1)), ((0, -1), (1, 0))]
    fan = Fan2D(2, Backend.RATIONAL, [FanChamber(c, gens) for c, gens in enumerate(quadrants)])
    g = dual_reconstruct(fan)
    assert len(g) == 4
    assert g.is_closed
    assert len(g.roots) == 4
    assert fan.adjacency() == [(0, 1), (0, 3), (1, 2), (2, 3)]


def test_half_plane_has_infinite_edges():
    fan = Fan2D(2, Backend.RATIONAL, [FanChamber(0, ((1, 0), (0, 1))), FanChamber(1, ((0, 1), (-1, 0)))])
    g = dual_reconstruct(fan)
    assert len(g) == 2
    assert sum(1 for entry in g.roots if not entry.invertible) == 1
    assert check_axioms(g).passed


def test_unsupported_dimension():
    with pytest.raises(BadFanError):
        dual_reconstruct(Fan2D(4, Backend.RATIONAL, [FanChamber(0, ((1, 0, 0, 0),) * 4)]))


@pytest.mark.parametrize("n", range(1, 7))
def test_midpoint_fan(n):
    fan, g = midpoint_fan(n)
    assert len(fan.chambers) == n + 1
    assert len(g) == n + 1
    assert len(g.interior_ids()) == n
    report = check_axioms(g)
    assert report.passed
    assert report.window_sound


def test_midpoint_roots_approach_the_limit():
    gaps = [limit_gap(n) for n in range(1, 12)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    for n, gap in enumerate(gaps, start=1):
        assert gap <= 2.0 ** (-n + 2)
    assert limit_direction().key == (-1, -1, 1)
    assert midpoint_wall_root(1).key == (0, -2, 1)


def test_midpoint_open_wall_is_the_last_root():
    fan, g = midpoint_fan(3)
    root = g.roots.lookup(midpoint_wall_root(3))
    assert root is not None
    assert root in boundary_roots(g)


def test_fixed_midpoint_roots_stay_isolated():
    wall = canonicalize((1, -1, 0), Backend.RATIONAL)
    for n in range(2, 9):
        _, g = midpoint_fan(n)
        root = g.roots.lookup(wall)
        assert root is not None
        assert isolation_gap(g, root) == pytest.approx(math.pi / 4)


def test_midpoint_points_locate_their_triangle():
    _, g = midpoint_fan(2)
    # points (x, y) of the slice z = 1 act as functionals
    assert locate(g, ("1/2", "1/5", "1")) == 0
    assert locate(g, ("1/10", "3/10", "1")) == 1
    assert locate(g, ("1/50", "7/10", "1")) == 2
    with pytest.raises(OutOfWindowError):
        locate(g, ("1/50", "19/20", "1"))
