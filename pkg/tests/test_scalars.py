import math
from fractions import Fraction

import numpy as np
import pytest

from core.errors import BackendMismatchError, DegenerateProjectionError, DimError, ZeroRayError
from schemas.backend import Backend
from services.scalars import (
    FloatBackend,
    SimplicialCone,
    angle_between,
    canonicalize,
    cone_coords,
    get_backend,
    in_cone,
    infer_backend,
    quotient_ray,
)


def test_rational_rays_are_primitive_integer_vectors():
    ray = canonicalize([2, -4, 6], Backend.RATIONAL)
    assert ray.key == (1, -2, 3)
    assert canonicalize([Fraction(1, 2), Fraction(1, 3)], Backend.RATIONAL).key == (3, 2)
    assert canonicalize(["1/2", "-3/4"], Backend.RATIONAL).key == (2, -3)


def test_positive_scaling_gives_the_same_ray():
    assert canonicalize([1, 2], Backend.RATIONAL) == canonicalize([3, 6], Backend.RATIONAL)
    assert canonicalize([1.0, 2.0], Backend.FLOAT) == canonicalize([3.0, 6.0], Backend.FLOAT)
    assert canonicalize([1, 2], Backend.RATIONAL) != canonicalize([-1, -2], Backend.RATIONAL)


def test_negation_flips_the_ray():
    ray = canonicalize([1, -2], Backend.RATIONAL)
    assert (-ray).key == (-1, 2)
    assert -(-ray) == ray


def test_float_rays_are_unit_length():
    ray = canonicalize([3.0, 4.0], Backend.FLOAT)
    assert ray.dir == pytest.approx((0.6, 0.8))


def test_zero_vector_is_rejected():
    with pytest.raises(ZeroRayError):
        canonicalize([0, 0], Backend.RATIONAL)
    with pytest.raises(ZeroRayError):
        canonicalize([0.0, 1e-12], Backend.FLOAT)


def test_backend_inference():
    assert infer_backend([1, Fraction(1, 2)]) is Backend.RATIONAL
    assert infer_backend([1, 0.5]) is Backend.FLOAT


def test_cone_membership():
    cone = SimplicialCone((canonicalize([1, 0], "rational"), canonicalize([1, 1], "rational")))
    assert in_cone(cone, canonicalize([2, 1], "rational"))
    assert in_cone(cone, canonicalize([1, 0], "rational"))
    assert not in_cone(cone, canonicalize([0, 1], "rational"))
    assert cone_coords(cone, canonicalize([2, 1], "rational")) == [1, 1]


def test_cone_rejects_dependent_generators():
    with pytest.raises(DimError):
        SimplicialCone((canonicalize([1, 0], "rational"), canonicalize([2, 0], "rational")))


def test_mixed_backends_are_rejected():
    cone = SimplicialCone((canonicalize([1, 0], "rational"), canonicalize([0, 1], "rational")))
    with pytest.raises(BackendMismatchError):
        in_cone(cone, canonicalize([1.0, 1.0], "float"))


def test_float_tolerance_absorbs_rounding():
    backend = FloatBackend(tol=1e-9)
    assert backend.nonneg(-1e-12)
    assert not backend.negative(-1e-12)
    assert backend.negative(-1e-6)


def test_quotient_ray():
    modulus = canonicalize([1, 0, 0], "rational")
    frame = [canonicalize([0, 1, 0], "rational"), canonicalize([0, 0, 1], "rational")]
    image = quotient_ray(modulus, canonicalize([5, 2, -1], "rational"), frame)
    assert image.key == (2, -1)
    with pytest.raises(DegenerateProjectionError):
        quotient_ray(modulus, canonicalize([-3, 0, 0], "rational"), frame)


def test_angle_between():
    assert angle_between([1, 0], [0, 1]) == pytest.approx(math.pi / 2)
    assert angle_between([1, 0], [-1, 0]) == pytest.approx(math.pi)
    # unit simple roots of A2 meet at 120 degrees in the Killing form
    metric = [[1.0, -0.5], [-0.5, 1.0]]
    assert angle_between([1, 0], [0, 1], metric) == pytest.approx(2 * math.pi / 3)


def test_rational_canonicalize_is_idempotent():
    rng = np.random.default_rng(17)
    for _ in range(1000):
        numerators = rng.integers(-30, 31, size=3)
        if not numerators.any():
            numerators[0] = 1
        denominators = rng.integers(1, 10, size=3)
        ray = canonicalize([Fraction(int(n), int(d)) for n, d in zip(numerators, denominators)], Backend.RATIONAL)
        again = canonicalize(ray.dir, Backend.RATIONAL)
        assert again == ray
        assert again.dir == ray.dir


def test_float_canonicalize_is_idempotent():
    rng = np.random.default_rng(19)
    impl = get_backend(Backend.FLOAT)
    for vec in rng.normal(scale=5.0, size=(1000, 3)):
        ray = canonicalize([float(x) for x in vec], Backend.FLOAT)
        again = canonicalize(ray.dir, Backend.FLOAT)
        assert impl.same(again.dir, ray.dir)
        assert again.dir == pytest.approx(ray.dir, abs=1e-12)


def test_float_keys_absorb_rounding_noise():
    clean = canonicalize([1.0, 0.0], Backend.FLOAT)
    assert canonicalize([1.0, 1e-17], Backend.FLOAT) == clean
    assert canonicalize([1.0, -1e-17], Backend.FLOAT).key == clean.key
    assert canonicalize([3e6, 4e6], Backend.FLOAT).key == (0.6, 0.8)


@pytest.mark.parametrize("name", ["a2", "b2", "g2"])
def test_backends_agree_on_cone_membership(name, request):
    g = request.getfixturevalue(name)

    def as_float(ray):
        return canonicalize([float(x) for x in ray.dir], Backend.FLOAT)

    for v in g.vertex_ids():
        exact = g.cone(v)
        approx = SimplicialCone(tuple(as_float(r) for r in exact.gens))
        for entry in g.roots:
            assert in_cone(exact, entry.ray) == in_cone(approx, as_float(entry.ray))
