import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from oseenvem.mesh import generate
from oseenvem.verify import polygon_sample

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = __import__("pathlib").Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def polygons():
    return polygon_sample(np.random.default_rng(11), 24)


@pytest.fixture(scope="session")
def small_meshes():
    return {fam: generate(fam, 4) for fam in ("squares", "distorted", "nonconvex", "voronoi")}


def unit_square():
    return np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def regular_polygon(n, radius=1.0, center=(0.0, 0.0)):
    t = 2 * np.pi * np.arange(n) / n
    return np.column_stack([radius * np.cos(t) + center[0], radius * np.sin(t) + center[1]])


L_CELL = np.array([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]], dtype=float)
