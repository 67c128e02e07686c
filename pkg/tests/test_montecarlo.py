import math

import numpy as np
import pytest

from bellsep.catalog import chsh_directions
from bellsep.montecarlo import (
    CHUNK_SIZE,
    THREADS_ENV,
    RngSpec,
    default_workers,
    estimate_chsh,
    estimate_correlator,
    estimate_joint,
    sample_counts,
)
from bellsep.singlet_models import SingletModel, singlet_joint

from conftest import random_unit

MODELS = [SingletModel(k) for k in ("brans", "degorre", "hall")]


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind.value)
def test_reproducible(model, rng):
    x, y = random_unit(rng), random_unit(rng)
    c1 = sample_counts(model, x, y, 100_000, RngSpec(42))
    c2 = sample_counts(model, x, y, 100_000, RngSpec(42))
    assert np.array_equal(c1, c2)
    assert c1.sum() == 100_000
    c3 = sample_counts(model, x, y, 100_000, RngSpec(43))
    assert not np.array_equal(c1, c3)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind.value)
def test_worker_count_invariant(model, rng):
    x, y = random_unit(rng), random_unit(rng)
    n = 3 * CHUNK_SIZE + 17
    ref = sample_counts(model, x, y, n, RngSpec(5), workers=1)
    for w in (2, 3, 8):
        assert np.array_equal(sample_counts(model, x, y, n, RngSpec(5), workers=w), ref)


def test_env_cap(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert default_workers() == 3
    monkeypatch.delenv(THREADS_ENV)
    assert default_workers() >= 1


def test_substreams_distinct():
    s = RngSpec(1)
    keys = {s.substream(i).stream_index for i in range(10)} | {s.stream_index}
    assert len(keys) == 11
    a = s.substream(0).chunk_generator(0).random(4)
    b = s.substream(1).chunk_generator(0).random(4)
    assert not np.array_equal(a, b)


def test_rng_spec_validation():
    with pytest.raises(ValueError):
        RngSpec(-1)
    with pytest.raises(ValueError):
        RngSpec(2**64)
    with pytest.raises(ValueError):
        sample_counts(MODELS[0], [0, 0, 1], [0, 0, 1], 0, RngSpec())


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind.value)
def test_convergence_coverage(model, rng):
    # Demand 5 SE agreement in at least 99 of 100 random setting pairs at n = 1e5.
    n = 100_000
    hits = 0
    for t in range(100):
        x, y = random_unit(rng), random_unit(rng)
        exact = singlet_joint(x, y)
        est = estimate_joint(model, x, y, n, RngSpec(1000 + t))
        se = np.sqrt(exact * (1 - exact) / n)
        if np.all(np.abs(est.probs - exact) < 5 * se + 1e-12):
            hits += 1
    assert hits >= 99


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind.value)
def test_joint_within_five_se(model, rng):
    for _ in range(3):
        x, y = random_unit(rng), random_unit(rng)
        est = estimate_joint(model, x, y, 200_000, RngSpec(int(rng.integers(2**32))))
        exact = singlet_joint(x, y)
        assert np.all(np.abs(est.probs - exact) <= 5 * est.std_errors + 1e-12)


def test_correlator_se_formula():
    z = np.array([0.0, 0.0, 1.0])
    e = estimate_correlator(MODELS[0], z, z, 10_000, RngSpec(0))
    assert e.value == -1.0 and e.std_error == 0.0
    e = estimate_correlator(MODELS[0], z, [1.0, 0, 0], 10_000, RngSpec(0))
    assert e.std_error == pytest.approx(math.sqrt((1 - e.value**2) / 10_000))


def test_chsh_estimate():
    est = estimate_chsh(MODELS[1], chsh_directions(), 200_000, RngSpec(9))
    assert abs(est.s.value - 2 * math.sqrt(2)) < 5 * est.s.std_error
    d = est.to_dict()
    assert set(d["correlators"]) == {"E(x,y)", "E(x,y')", "E(x',y)", "E(x',y')"}
