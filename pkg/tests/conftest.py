import numpy as np
import pytest


def random_unit(rng, n=None):
    v = rng.standard_normal((1 if n is None else n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v[0] if n is None else v


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_pairs(rng):
    def make(n):
        return [(random_unit(rng), random_unit(rng)) for _ in range(n)]

    return make


def random_distribution(rng, shape):
    p = rng.dirichlet(np.ones(int(np.prod(shape))))
    return p.reshape(shape)


def random_table(rng, nx=2, ny=2, outcomes=(2, 2)):
    """Arbitrary (generally signalling) table on labels x0.., y0..."""
    from bellsep.general_model import CorrelationTable

    settings = [(f"x{i}", f"y{j}") for i in range(nx) for j in range(ny)]
    return CorrelationTable(tuple(settings), outcomes, {s: random_distribution(rng, outcomes) for s in settings})


def pr_box_joint(x, y):
    """Popescu-Rohrlich box on labels x0/x1, y0/y1: a b = -1 only for (x1, y1)."""
    p = np.zeros((2, 2))
    if x == "x1" and y == "y1":
        p[0, 1] = p[1, 0] = 0.5
    else:
        p[0, 0] = p[1, 1] = 0.5
    return p


def noisy_pr_table(v):
    from bellsep.catalog import chsh_label_settings
    from bellsep.general_model import CorrelationTable

    return CorrelationTable.from_function(
        chsh_label_settings(), (2, 2), lambda x, y: v * pr_box_joint(x, y) + (1 - v) * 0.25
    )
