import numpy as np
import pytest

from orbitext import LabeledSample, mcshane_extend, validate_finite_group


def c2_matrices():
    return [np.eye(2), -np.eye(2)]


def c4_matrices():
    r = np.array([[0.0, -1.0], [1.0, 0.0]])
    return [np.eye(2), r, r @ r, r @ r @ r]


def d4_matrices():
    # the 8 signed permutation symmetries of the square
    mats = c4_matrices()
    flip = np.array([[1.0, 0.0], [0.0, -1.0]])
    return mats + [m @ flip for m in mats]


def s3_matrices():
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    mats = []
    for p in perms:
        m = np.zeros((3, 3))
        for i, j in enumerate(p):
            m[i, j] = 1.0
        mats.append(m)
    return mats


@pytest.fixture
def c2():
    return validate_finite_group(c2_matrices())


@pytest.fixture
def c4():
    return validate_finite_group(c4_matrices())


@pytest.fixture
def d4():
    return validate_finite_group(d4_matrices())


@pytest.fixture
def s3():
    return validate_finite_group(s3_matrices())


def finite_groups():
    """(name, matrices, dim) for the standard finite test groups."""
    return [
        ("c2", c2_matrices(), 2),
        ("c4", c4_matrices(), 2),
        ("d4", d4_matrices(), 2),
        ("s3", s3_matrices(), 3),
    ]


def random_mcshane_field(rng, dim, n_points=20, scale=2.0):
    pts = rng.uniform(-scale, scale, size=(n_points, dim))
    vals = rng.uniform(-1.0, 1.0, size=n_points)
    return mcshane_extend(LabeledSample(pts, vals))
