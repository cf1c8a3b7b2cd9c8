"""Shared fixtures: surfaces, fields and forms used across the suite."""

import numpy as np
import pytest

from casimirkit.builders import FlatTorus, sphere_octahedron, two_maxima_torus
from casimirkit.surface import classify_vertices


@pytest.fixture(scope="session")
def sphere_z():
    """Refined octahedral sphere with the height field."""
    surf = sphere_octahedron(4)
    field = classify_vertices(surf, surf.vertices[:, 2])
    return surf, field


@pytest.fixture(scope="session")
def flat_torus_32():
    return FlatTorus(32)


@pytest.fixture(scope="session")
def torus_two_band(flat_torus_32):
    """Flat torus with a two-band field whose level cycles wind in x."""
    ft = flat_torus_32
    values = np.cos(ft.y) + 0.5 * np.cos(ft.x)
    field = classify_vertices(ft.surface, values)
    return ft, field


@pytest.fixture(scope="session")
def two_max_torus():
    """Embedded torus fixture with 1 minimum, 3 saddles, 2 maxima."""
    surf, values = two_maxima_torus(64)
    field = classify_vertices(surf, values)
    return surf, field
