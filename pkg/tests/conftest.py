import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from scipy.spatial import ConvexHull

from geotomo.bodies import disc_hull_body, ellipsoid_body, half_ellipse_profile, revolution_body
from geotomo.bodies import BodySpec, make_body

settings.register_profile(
    "geotomo", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("geotomo")

CUBE_VERTICES = [[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]


@pytest.fixture(scope="session")
def ball():
    return ellipsoid_body((1.0, 1.0, 1.0))


@pytest.fixture(scope="session")
def triaxial():
    return ellipsoid_body((2.0, 1.0, 3.0))


@pytest.fixture(scope="session")
def rev_ellipsoid():
    return ellipsoid_body((1.0, 1.0, 2.0))


@pytest.fixture(scope="session")
def lathe_body():
    return revolution_body(half_ellipse_profile(1.0, 1.5))


@pytest.fixture(scope="session")
def disc_hull():
    return disc_hull_body(1.0, 1.0)


@pytest.fixture(scope="session")
def cube():
    return make_body(BodySpec(kind="polytope", vertices=CUBE_VERTICES))


def random_convex_polygon(rng, k=None):
    k = int(rng.integers(3, 12)) if k is None else k
    pts = rng.normal(size=(max(k, 3), 2))
    return pts[ConvexHull(pts).vertices]


def regular_polygon(m, radius=1.0, phase=0.0):
    t = phase + 2.0 * np.pi * np.arange(m) / m
    return radius * np.column_stack([np.cos(t), np.sin(t)])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
