import numpy as np
import pytest

from soi.unitary import special_orthogonal, special_unitary_2, unitary_group


@pytest.fixture
def rng():
    return np.random.default_rng(20211003)


def random_xi(f, rng, size=None):
    lo = np.array([b[0] for b in f.bounds])
    hi = np.array([b[1] for b in f.bounds])
    shape = (f.n_params,) if size is None else (size, f.n_params)
    return lo + (hi - lo) * rng.random(shape)


def random_interior_xi(f, rng, margin=1e-3):
    lo = np.array([b[0] for b in f.bounds]) + margin
    hi = np.array([b[1] for b in f.bounds]) - margin
    return lo + (hi - lo) * rng.random(f.n_params)


FAMILIES = {
    "su2": special_unitary_2,
    "so2": lambda: special_orthogonal(2),
    "so3": lambda: special_orthogonal(3),
    "so4": lambda: special_orthogonal(4),
    "u2": lambda: unitary_group(2),
    "u3": lambda: unitary_group(3),
}
