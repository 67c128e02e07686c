import math

import numpy as np
import pytest
from scipy import integrate

from bellsep.quantum_core import UnitVector3
from bellsep.singlet_models import (
    SIGN_PAIRS,
    ModelKind,
    SingletModel,
    brans_outcome,
    brans_weight,
    brans_weights,
    degorre_density,
    hall_density,
    hall_envelope,
    local_outcomes,
    singlet_joint,
)
from bellsep.sphere import pair_rule

from conftest import random_unit

Z = np.array([0.0, 0.0, 1.0])
X = np.array([1.0, 0.0, 0.0])


def at_angle(phi):
    return np.array(UnitVector3.from_angles(phi))


# -- Brans -------------------------------------------------------------------

def test_brans_weight_examples():
    for lam in SIGN_PAIRS:
        assert brans_weight(lam, Z, X) == 0.25
    assert brans_weight((1, 1), Z, Z) == 0.0
    assert brans_weight((1, -1), Z, Z) == 0.5
    y = at_angle(np.pi / 3)  # x.y = 0.5
    assert brans_weight((1, 1), Z, y) == pytest.approx(0.125, abs=1e-15)


def test_brans_outcome():
    assert brans_outcome((1, -1)) == (1, -1)
    assert brans_outcome((-1, -1)) == (-1, -1)


def test_brans_reproduction(random_pairs):
    for x, y in random_pairs(10):
        w = brans_weights(x, y)
        assert w.sum() == pytest.approx(1.0, abs=1e-15)
        assert 0 <= w.min() and w.max() <= 0.5
        p = np.zeros((2, 2))
        for lam, wi in zip(SIGN_PAIRS, w):
            a, b = brans_outcome(lam)
            p[int(a < 0), int(b < 0)] += wi
        assert np.max(np.abs(p - singlet_joint(x, y))) < 1e-15


# -- Degorre -----------------------------------------------------------------

def test_degorre_density_examples():
    assert degorre_density(X, Z) == 0.0
    assert degorre_density(Z, Z) == pytest.approx(1 / (2 * np.pi))


def test_degorre_normalization(random_pairs):
    for x, y in random_pairs(50):
        r = pair_rule(x, y)
        assert r.integrate(degorre_density(r.nodes, x)) == pytest.approx(1.0, abs=1e-12)


def test_degorre_joint_against_adaptive_quadrature():
    # Independent route: x as polar axis, the azimuthal fraction where
    # lam.y < 0 is analytic, the polar integral is adaptive.
    phi = 1.1
    x, y = Z, at_angle(phi)

    def integrand(theta):
        t = -np.cos(theta) * np.cos(phi) / (np.sin(theta) * np.sin(phi))
        frac = 1.0 - np.arccos(np.clip(t, -1.0, 1.0)) / np.pi
        return np.cos(theta) / (2 * np.pi) * np.sin(theta) * 2 * np.pi * frac

    val, _ = integrate.quad(integrand, 1e-12, np.pi / 2, epsabs=1e-13, limit=200)
    expected = SingletModel("degorre").exact_joint(x, y)[0, 0]
    assert val == pytest.approx(expected, abs=1e-8)
    assert expected == pytest.approx((1 - math.cos(phi)) / 4, abs=1e-12)


# -- Hall --------------------------------------------------------------------

def hall_normalization_oracle(phi):
    """Lune geometry: lam.x and lam.y differ in sign on a fraction phi/pi of the sphere."""
    c, k, f = math.cos(phi), 1 - 2 * phi / math.pi, phi / math.pi
    plus = (1 + c) / (1 + k) if f < 1 else 0.0
    minus = (1 - c) / (1 - k) if f > 0 else 0.0
    return (1 - f) * plus + f * minus


def test_hall_density_examples(rng):
    y = at_angle(np.pi / 2)
    lam = random_unit(rng, 100)
    assert np.allclose(hall_density(lam, Z, y), 1 / (4 * np.pi))
    assert np.allclose(hall_density(lam, Z, Z), 1 / (4 * np.pi))
    # Zero-denominator branch at antiparallel settings.
    assert np.allclose(hall_density(lam, Z, -Z), 1 / (4 * np.pi))
    assert hall_density(np.array([0.0, 0.0, 1.0]), Z, Z) == pytest.approx(1 / (4 * np.pi))


@pytest.mark.parametrize("phi", [0.0, 0.2, np.pi / 3, np.pi / 2, 2.5, np.pi])
def test_hall_normalization(phi):
    assert hall_normalization_oracle(phi) == pytest.approx(1.0, abs=1e-14)
    r = pair_rule(Z, at_angle(phi))
    assert r.integrate(hall_density(r.nodes, Z, at_angle(phi))) == pytest.approx(1.0, abs=1e-6)


def test_hall_normalization_random(random_pairs):
    for x, y in random_pairs(50):
        r = pair_rule(x, y)
        assert abs(r.integrate(hall_density(r.nodes, x, y)) - 1) < 1e-6


def test_hall_nonnegative_and_envelope(rng):
    for phi in np.linspace(0, np.pi, 13):
        y = at_angle(phi)
        d = hall_density(random_unit(rng, 2000), Z, y) * 4 * np.pi
        assert d.min() >= 0 and d.max() <= hall_envelope(Z, y) + 1e-15


# -- outcome rule ------------------------------------------------------------

def test_local_outcomes_examples():
    assert local_outcomes(Z, Z, Z) == (1, -1)
    assert local_outcomes(Z, Z, -Z) == (1, 1)
    assert local_outcomes(X, Z, Z)[0] == 1


def test_locality_structural(rng):
    lam = random_unit(rng, 500)
    x = random_unit(rng)
    a_ref = local_outcomes(lam, x, random_unit(rng))[0]
    for _ in range(5):
        assert np.array_equal(local_outcomes(lam, x, random_unit(rng))[0], a_ref)
    y = random_unit(rng)
    b_ref = local_outcomes(lam, random_unit(rng), y)[1]
    for _ in range(5):
        assert np.array_equal(local_outcomes(lam, random_unit(rng), y)[1], b_ref)


def test_outcomes_deterministic(rng):
    lam = random_unit(rng, 100)
    x, y = random_unit(rng), random_unit(rng)
    m = SingletModel("hall")
    a1, b1 = m.outcomes(lam, x, y)
    a2, b2 = m.outcomes(lam, x, y)
    assert np.array_equal(a1, a2) and np.array_equal(b1, b2)


# -- exact joint -------------------------------------------------------------

@pytest.mark.parametrize("kind", list(ModelKind))
def test_exact_joint_examples(kind):
    m = SingletModel(kind)
    assert np.allclose(m.exact_joint(Z, X), 0.25, atol=1e-12)
    assert np.allclose(m.exact_joint(Z, Z), [[0, 0.5], [0.5, 0]], atol=1e-12)
    y = at_angle(np.pi / 4)
    assert m.exact_joint(Z, y)[0, 0] == pytest.approx((1 - math.sqrt(2) / 2) / 4, abs=1e-12)
    assert (1 - math.sqrt(2) / 2) / 4 == pytest.approx(0.07322, abs=1e-5)


@pytest.mark.parametrize("kind,tol", [("brans", 1e-12), ("degorre", 1e-6), ("hall", 1e-6)])
def test_exact_joint_reproduces_singlet(kind, tol, random_pairs):
    m = SingletModel(kind)
    for x, y in random_pairs(50):
        p = m.exact_joint(x, y)
        assert np.max(np.abs(p - singlet_joint(x, y))) < tol
        assert p.sum() == pytest.approx(1.0, abs=1e-12)


def test_degorre_joint_from_x_only_density(random_pairs):
    # Integrate the outcome rule against degorre_density(lam, x) directly.
    m = SingletModel("degorre")
    for x, y in random_pairs(10):
        r = pair_rule(x, y)
        a, b = local_outcomes(r.nodes, x, y)
        w = r.weights * degorre_density(r.nodes, x)
        p = np.array([[w[(a == sa) & (b == sb)].sum() for sb in (1, -1)] for sa in (1, -1)])
        assert np.max(np.abs(p - m.exact_joint(x, y))) < 1e-14


def test_degorre_joint_ignores_y_in_density(random_pairs):
    # The same density (no y argument) paired with different y only changes b.
    m = SingletModel("degorre")
    for x, y in random_pairs(5):
        r = pair_rule(x, y)
        assert np.array_equal(m.density(r.nodes, x, y), m.density(r.nodes, x, -y))


# -- samplers ----------------------------------------------------------------

def test_brans_sampler_antiparallel_support(rng):
    lam = SingletModel("brans").sample_hidden(Z, Z, rng, size=10_000)
    assert np.all(lam[:, 0] * lam[:, 1] == -1)
    single = SingletModel("brans").sample_hidden(Z, Z, rng)
    assert single.shape == (2,)


def test_degorre_sampler_moment(rng):
    n = 10**6
    x = random_unit(rng)
    lam = SingletModel("degorre").sample_hidden(x, random_unit(rng), rng, size=n)
    u = np.abs(lam @ x)
    # Density of u = lam.x is |u| on [-1, 1]: E|u| = 2/3, E u^2 = 1/2.
    se = math.sqrt((0.5 - (2 / 3) ** 2) / n)
    assert abs(u.mean() - 2 / 3) < 5 * se
    assert np.allclose(np.linalg.norm(lam, axis=1), 1.0)


def test_hall_sampler_uniform_outcomes(rng):
    n = 10**6
    y = at_angle(np.pi / 2)
    m = SingletModel("hall")
    lam = m.sample_hidden(Z, y, rng, size=n)
    a, b = m.outcomes(lam, Z, y)
    counts = np.bincount(2 * (a < 0) + (b < 0), minlength=4) / n
    se = math.sqrt(0.25 * 0.75 / n)
    assert np.all(np.abs(counts - 0.25) < 5 * se)


def test_hall_sampler_matches_branch_masses(rng):
    n = 400_000
    phi = 0.7
    y = at_angle(phi)
    lam = SingletModel("hall").sample_hidden(Z, y, rng, size=n)
    frac_minus = np.mean((lam @ Z) * (lam @ y) < 0)
    target = (1 - math.cos(phi)) / 2
    assert abs(frac_minus - target) < 5 * math.sqrt(target * (1 - target) / n)
