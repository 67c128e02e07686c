import math

import numpy as np
import pytest
from scipy.optimize import linprog

from bellsep.bell_polytope import (
    CHSH_SIGN_PATTERNS,
    chsh_value,
    chsh_variants,
    correlator,
    detect_signalling,
    deterministic_strategies,
    fine_joint,
    max_chsh,
    mixture_table,
    pair_marginal,
    separability_feasible,
)
from bellsep.catalog import (
    chsh_label_settings,
    chsh_labels,
    singlet_chsh_table,
    signalling_table,
    singlet_table,
    uniform_table,
)
from bellsep.general_model import CorrelationTable, FiniteLhvModel, build_general_brans

from conftest import noisy_pr_table, random_table, random_unit

LABELS = chsh_labels()
SETTINGS = chsh_label_settings()


def random_mixture(rng, k=None):
    strategies = deterministic_strategies(("x0", "x1"), ("y0", "y1"))
    if k is None:
        w = rng.dirichlet(np.ones(len(strategies)))
    else:
        w = np.zeros(len(strategies))
        w[rng.choice(len(strategies), k, replace=False)] = rng.dirichlet(np.ones(k))
    return mixture_table(strategies, w, SETTINGS)


def linprog_feasible(table):
    strategies = deterministic_strategies(table.x_settings, table.y_settings)
    a = [[st.joint(*s)[i, j] for st in strategies] for s in table.settings for i in range(2) for j in range(2)]
    b = [table[s][i, j] for s in table.settings for i in range(2) for j in range(2)]
    a.append([1.0] * len(strategies))
    b.append(1.0)
    res = linprog(np.zeros(len(strategies)), A_eq=np.array(a), b_eq=np.array(b), bounds=(0, None), method="highs")
    return res.status == 0


# -- correlators and CHSH ----------------------------------------------------

def test_correlator_examples():
    assert correlator([[0.5, 0], [0, 0.5]]) == 1.0
    assert correlator([[0, 0.5], [0.5, 0]]) == -1.0
    assert correlator(np.full((2, 2), 0.25)) == 0.0
    with pytest.raises(ValueError):
        correlator(np.full((3, 3), 1 / 9))


def test_singlet_chsh_optimal():
    t = singlet_chsh_table()
    assert chsh_value(t, LABELS) == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    best, arg = max_chsh(t)
    assert best == pytest.approx(2 * math.sqrt(2), abs=1e-12)


def test_quarter_angles_need_relabelling():
    # With angles 0, pi/2, 3pi/4, pi/4 the plain combination cancels;
    # a sign variant reaches the quantum maximum.
    t = singlet_chsh_table((0.0, np.pi / 2, 3 * np.pi / 4, np.pi / 4))
    assert chsh_value(t, LABELS) == pytest.approx(0.0, abs=1e-12)
    assert max(chsh_variants(t, LABELS)) == pytest.approx(2 * math.sqrt(2), abs=1e-12)


def test_chsh_missing_pair():
    t = CorrelationTable.from_function([("x0", "y0")], (2, 2), lambda x, y: np.full((2, 2), 0.25))
    with pytest.raises(KeyError):
        chsh_value(t, LABELS)


def test_sign_patterns():
    assert len(set(CHSH_SIGN_PATTERNS)) == 8
    for p in CHSH_SIGN_PATTERNS:
        assert abs(sum(p)) == 2


def test_deterministic_strategies_reach_two():
    values = [max(chsh_variants(s.table(SETTINGS), LABELS)) for s in deterministic_strategies(("x0", "x1"), ("y0", "y1"))]
    assert len(values) == 16 and max(values) == 2.0


def test_random_mixtures_obey_bound(rng):
    for _ in range(200):
        t = random_mixture(rng, k=int(rng.integers(1, 17)))
        assert max(chsh_variants(t, LABELS)) <= 2 + 1e-9


def test_pr_box():
    assert chsh_value(noisy_pr_table(1.0), LABELS) == pytest.approx(4.0)


# -- separability LP ---------------------------------------------------------

def test_singlet_infeasible_with_certificate():
    res = separability_feasible(singlet_chsh_table())
    assert not res.feasible
    assert res.certificate_table_value - res.certificate_strategy_max > 0.1
    d = res.to_dict()
    assert set(d["certificate"]) == {"coefficients", "offset", "value_on_table", "max_over_strategies"}


def test_deterministic_strategies_point_mass():
    strategies = deterministic_strategies(("x0", "x1"), ("y0", "y1"))
    for i, st in enumerate(strategies):
        res = separability_feasible(st.table(SETTINGS))
        assert res.feasible and res.reconstruction_error < 1e-12
        assert res.witness[i] == pytest.approx(1.0) and np.sum(res.witness) == pytest.approx(1.0)


def test_uniform_feasible():
    res = separability_feasible(uniform_table())
    assert res.feasible and res.reconstruction_error < 1e-12


def test_signalling_infeasible():
    assert not separability_feasible(signalling_table()).feasible


def test_random_mixtures_feasible(rng):
    for _ in range(100):
        t = random_mixture(rng)
        res = separability_feasible(t)
        assert res.feasible and res.reconstruction_error < 1e-8
        recon = mixture_table(res.strategies, res.witness, SETTINGS)
        for s in SETTINGS:
            assert np.max(np.abs(recon[s] - t[s])) < 1e-8


def test_feasibility_matches_chsh_and_linprog(rng):
    tables = [noisy_pr_table(v) for v in np.linspace(0, 1, 21)]
    for _ in range(40):
        ang = rng.uniform(0, 2 * np.pi, 4)
        tables.append(singlet_chsh_table(tuple(ang)))
        dirs = random_unit(rng, 4)
        tables.append(singlet_table({"x0": dirs[0], "x1": dirs[1]}, {"y0": dirs[2], "y1": dirs[3]}))
    for t in tables:
        feasible = separability_feasible(t).feasible
        assert feasible == (max(chsh_variants(t, LABELS)) <= 2 + 1e-8)
        assert feasible == linprog_feasible(t)


def test_certificate_separates_on_infeasible(rng):
    for v in (0.8, 0.9, 1.0):
        t = noisy_pr_table(v)
        res = separability_feasible(t)
        assert not res.feasible
        assert res.certificate_table_value > res.certificate_strategy_max + 1e-9


def test_random_signalling_tables_infeasible(rng):
    for _ in range(20):
        t = random_table(rng)
        assert separability_feasible(t).feasible == linprog_feasible(t)
        if detect_signalling(t):
            assert not separability_feasible(t).feasible


def test_three_settings(rng):
    strategies = deterministic_strategies(("x0", "x1", "x2"), ("y0", "y1", "y2"))
    settings = [(f"x{i}", f"y{j}") for i in range(3) for j in range(3)]
    t = mixture_table(strategies, rng.dirichlet(np.ones(len(strategies))), settings)
    assert separability_feasible(t).feasible


def test_rejects_non_binary(rng):
    with pytest.raises(ValueError, match="binary"):
        separability_feasible(random_table(rng, outcomes=(3, 3)))


# -- signalling detection ----------------------------------------------------

def test_detect_signalling():
    v = detect_signalling(signalling_table())
    assert v and all(x.side == "B" for x in v)
    assert v[0].max_deviation == pytest.approx(1.0)
    assert detect_signalling(singlet_chsh_table()) == []
    assert detect_signalling(uniform_table()) == []


def test_detect_signalling_qutrit(rng):
    from bellsep.catalog import qudit_scenario

    rho, povms = qudit_scenario(3, 2)
    assert detect_signalling(build_general_brans(rho, povms).implied_table()) == []


# -- Fine joint --------------------------------------------------------------

def _local_model(rng, n_lam=6):
    settings = tuple(SETTINGS)
    lam = tuple(range(n_lam))
    a = {x: rng.integers(0, 2, n_lam) for x in ("x0", "x1")}
    b = {y: rng.integers(0, 2, n_lam) for y in ("y0", "y1")}
    w = np.tile(rng.dirichlet(np.ones(n_lam)), (4, 1))
    rule = np.stack([np.stack([a[x], b[y]], axis=1) for x, y in settings])
    return FiniteLhvModel(lam, settings, w, rule)


def test_fine_joint_marginals(rng):
    for _ in range(10):
        m = _local_model(rng)
        f = fine_joint(m, ["x0", "x1"], ["y0", "y1"])
        assert f.shape == (2, 2, 2, 2) and f.sum() == pytest.approx(1.0)
        for j, x in enumerate(("x0", "x1")):
            for k, y in enumerate(("y0", "y1")):
                assert np.allclose(pair_marginal(f, 2, j, k), m.implied_joint(x, y), atol=1e-15)


def test_fine_joint_refuses_measurement_dependence():
    m = build_general_brans(*_singlet_pair())
    with pytest.raises(ValueError, match="measurement"):
        fine_joint(m, ["x0"], ["y0"])


def _singlet_pair():
    from bellsep.catalog import singlet_scenario

    rho, povms, *_ = singlet_scenario(2)
    return rho, povms
