import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from geotomo.errors import DegenerateInputError
from geotomo.geometry import (
    AffineLine,
    Hyperplane,
    build_frame,
    ensure_ccw,
    hyperplane_basis,
    polygon_area_centroid,
    polygon_diameter,
    polygon_hausdorff,
    polygon_hausdorff_bruteforce,
    polygon_signed_area,
    random_rotation,
    reflect_point,
    reflect_point_in_line,
    rotation_matrix,
)

from conftest import random_convex_polygon, regular_polygon

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
vec3 = arrays(np.float64, 3, elements=finite)


def test_reflect_across_offset_plane():
    x = np.array([0.2, 0.0, 0.5])
    h = Hyperplane([0, 0, 1.0], 0.1)
    y = reflect_point(x, h)
    assert np.allclose(y, [0.2, 0.0, -0.3], atol=1e-15)
    # the midpoint lies on h and the displacement is normal to it
    assert abs(h.signed_distance(0.5 * (x + y))) < 1e-15
    assert np.linalg.norm(np.cross(y - x, h.normal)) < 1e-15


def test_reflect_rows_and_dimension_check():
    h = Hyperplane([1.0, 0, 0], 0.0)
    pts = np.array([[1.0, 2, 3], [-4, 5, 6]])
    assert np.allclose(reflect_point(pts, h), [[-1, 2, 3], [4, 5, 6]])
    with pytest.raises(DegenerateInputError):
        reflect_point([1.0, 2.0], h)


def test_hyperplane_normalizes_offset_with_normal():
    h = Hyperplane([0, 0, 2.0], 1.0)
    assert np.allclose(h.normal, [0, 0, 1])
    assert h.offset == pytest.approx(0.5)
    with pytest.raises(DegenerateInputError):
        Hyperplane([0, 0, 0], 1.0)


@given(vec3, vec3.filter(lambda n: np.linalg.norm(n) > 1e-3), finite)
def test_reflection_is_an_involution(x, n, d):
    h = Hyperplane(n, d)
    back = reflect_point(reflect_point(x, h), h)
    assert np.linalg.norm(back - x) <= 1e-12 * max(1.0, np.linalg.norm(x), abs(h.offset))


@given(vec3.filter(lambda n: np.linalg.norm(n) > 1e-3))
def test_basis_is_orthonormal_complement(n):
    n = n / np.linalg.norm(n)
    B = hyperplane_basis(n)
    assert B.shape == (2, 3)
    assert np.allclose(B @ B.T, np.eye(2), atol=1e-12)
    assert np.allclose(B @ n, 0.0, atol=1e-12)


def test_basis_for_normal_nearly_along_an_axis():
    n = np.array([1.0, 1e-5, 1e-5])
    n /= np.linalg.norm(n)
    B = hyperplane_basis(n)
    assert np.abs(B @ n).max() <= 1e-12
    assert np.allclose(B @ B.T, np.eye(2), atol=1e-12)


def test_basis_in_four_dimensions():
    n = np.array([1.0, 2.0, -1.0, 0.5])
    n /= np.linalg.norm(n)
    B = hyperplane_basis(n)
    assert B.shape == (3, 4)
    assert np.allclose(B @ B.T, np.eye(3), atol=1e-12)
    assert np.allclose(B @ n, 0.0, atol=1e-12)


def test_frame_for_diagonal_plane():
    n = np.ones(3) / np.sqrt(3)
    f = build_frame(Hyperplane(n, 0.0), [0, 0, 0])
    assert abs(f.u @ n) < 1e-12 and abs(f.v @ n) < 1e-12 and abs(f.u @ f.v) < 1e-12
    xy = np.array([[0.3, -0.7]])
    assert np.allclose(f.to_local(f.to_world(xy)), xy)
    with pytest.raises(DegenerateInputError):
        build_frame(Hyperplane(n, 0.0), [1, 0, 0])


def test_reflect_in_line_2d():
    line = AffineLine([0.0, 1.0], [1.0, 0.0])
    assert np.allclose(reflect_point_in_line([2.0, 3.0], line), [2.0, -1.0])


def test_polygon_area_and_centroid_of_square():
    sq = np.array([[0, 0], [2, 0], [2, 2], [0, 2.0]])
    assert polygon_signed_area(sq) == pytest.approx(4.0)
    assert polygon_signed_area(sq[::-1]) == pytest.approx(-4.0)
    assert np.allclose(polygon_area_centroid(sq), [1, 1])
    assert polygon_signed_area(ensure_ccw(sq[::-1])) > 0


def test_polygon_diameter_matches_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(200):
        P = random_convex_polygon(rng)
        brute = max(np.linalg.norm(a - b) for a in P for b in P)
        assert polygon_diameter(P) == pytest.approx(brute, rel=1e-12)


def test_hausdorff_simple_cases():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1.0]])
    assert polygon_hausdorff(sq, sq) == pytest.approx(0.0, abs=1e-15)
    assert polygon_hausdorff(sq, sq + [0.3, 0.4]) == pytest.approx(0.5)
    # a square against its inscribed diamond: the corners are 0.5/sqrt(2) away
    diamond = np.array([[0.5, 0], [1, 0.5], [0.5, 1], [0, 0.5]])
    assert polygon_hausdorff(sq, diamond) == pytest.approx(0.5 / np.sqrt(2))


def test_hausdorff_agrees_with_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(500):
        P, Q = random_convex_polygon(rng), random_convex_polygon(rng) * 0.7 + rng.normal(size=2) * 0.3
        assert polygon_hausdorff(P, Q) == pytest.approx(polygon_hausdorff_bruteforce(P, Q), abs=1e-10)


def test_hausdorff_of_rotated_regular_polygons():
    # a regular m-gon against its rotation by pi/m: circumradius - inradius
    m = 7
    P, Q = regular_polygon(m), regular_polygon(m, phase=np.pi / m)
    assert polygon_hausdorff(P, Q) == pytest.approx(1 - np.cos(np.pi / m), rel=1e-12)


def test_rotations_are_orthonormal():
    rng = np.random.default_rng(0)
    for dim in (2, 3, 4):
        R = random_rotation(rng, dim)
        assert np.allclose(R @ R.T, np.eye(dim), atol=1e-12)
        assert np.linalg.det(R) == pytest.approx(1.0)
    R = rotation_matrix([0, 0, 1.0], np.pi / 2)
    assert np.allclose(R @ [1, 0, 0], [0, 1, 0])
