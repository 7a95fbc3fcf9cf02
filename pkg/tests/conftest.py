from __future__ import annotations

import numpy as np
import pytest

from holodyn.core import find_fixed_point, henon_chain
from holodyn.manifold import local_stable_graph


@pytest.fixture(scope="session")
def henon075():
    return henon_chain(0.75)


@pytest.fixture(scope="session")
def henon_saddle(henon075):
    return find_fixed_point(henon075, (1.4, 1.4))


@pytest.fixture(scope="session")
def henon_graph(henon075, henon_saddle):
    return local_stable_graph(henon075, henon_saddle, 0.1, mesh=(10, 16), tol=1e-9)


def quadratic_roots(a: complex, b: complex, c: complex) -> tuple[complex, complex]:
    """Independent quadratic-formula oracle for a z^2 + b z + c = 0."""
    import cmath

    disc = cmath.sqrt(b * b - 4 * a * c)
    return (-b + disc) / (2 * a), (-b - disc) / (2 * a)


def finite_difference_jacobian(chain, z, h=1e-5):
    """Central finite differences, the independent check on exact Jacobians."""
    out = np.zeros((2, 2), dtype=complex)
    for k, e in enumerate([(1.0, 0.0), (0.0, 1.0)]):
        zp = (z[0] + h * e[0], z[1] + h * e[1])
        zm = (z[0] - h * e[0], z[1] - h * e[1])
        fp = chain.apply(*zp)
        fm = chain.apply(*zm)
        out[0, k] = (fp[0] - fm[0]) / (2 * h)
        out[1, k] = (fp[1] - fm[1]) / (2 * h)
    return out
