"""Correlators, CHSH, Fine joint distributions and local-polytope membership.

Binary outcomes use index 0 for ``+1`` and index 1 for ``-1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .general_model import CorrelationTable, FiniteLhvModel, check_properties
from .simplex import dedupe_rows, phase1

FEASIBILITY_TOL = 1e-8
SIGNALLING_TOL = 1e-9
MAX_LOCAL_SETTINGS = 4
SIGNS = np.array([1, -1])


def correlator(dist) -> float:
    """``E = sum_{a,b} a b p(a, b)`` for a 2x2 distribution."""
    p = np.asarray(dist, dtype=float)
    if p.shape != (2, 2):
        raise ValueError(f"correlator needs outcomes in {{+1, -1}} on both sides, got shape {p.shape}")
    return float(np.sum(np.outer(SIGNS, SIGNS) * p))


@dataclass(frozen=True)
class ChshSettings:
    x: object
    x_prime: object
    y: object
    y_prime: object

    def pairs(self) -> list[tuple]:
        return [(self.x, self.y), (self.x, self.y_prime), (self.x_prime, self.y), (self.x_prime, self.y_prime)]


def _require_pairs(table: CorrelationTable, s: ChshSettings) -> None:
    missing = [p for p in s.pairs() if p not in table.probs]
    if missing:
        raise KeyError(f"table lacks setting pairs {missing!r}")


def chsh_correlators(table: CorrelationTable, s: ChshSettings) -> list[float]:
    _require_pairs(table, s)
    return [correlator(table[p]) for p in s.pairs()]


def chsh_value(table: CorrelationTable, s: ChshSettings) -> float:
    """``E(x,y) + E(x,y') + E(x',y) - E(x',y')``."""
    e = chsh_correlators(table, s)
    return e[0] + e[1] + e[2] - e[3]


# Sign patterns with exactly one minus, and their negatives.
CHSH_SIGN_PATTERNS = tuple(
    tuple(sgn * v for v in pat)
    for pat in ((1, 1, 1, -1), (1, 1, -1, 1), (1, -1, 1, 1), (-1, 1, 1, 1))
    for sgn in (1, -1)
)


def chsh_variants(table: CorrelationTable, s: ChshSettings) -> list[float]:
    """The eight CHSH expressions obtained by relabelling settings and outcomes."""
    e = np.array(chsh_correlators(table, s))
    return [float(np.dot(p, e)) for p in CHSH_SIGN_PATTERNS]


def max_chsh(table: CorrelationTable) -> tuple[float, ChshSettings | None]:
    """Largest CHSH variant over all pairs of local settings present in the table."""
    best, arg = -np.inf, None
    for x, xp in itertools.combinations(table.x_settings, 2):
        for y, yp in itertools.combinations(table.y_settings, 2):
            s = ChshSettings(x, xp, y, yp)
            if any(p not in table.probs for p in s.pairs()):
                continue
            v = max(chsh_variants(table, s))
            if v > best:
                best, arg = v, s
    return float(best), arg


@dataclass(frozen=True)
class DeterministicStrategy:
    """Fixed outcome ``a(x)`` for every x-setting and ``b(y)`` for every y-setting."""

    a: dict
    b: dict

    def joint(self, x, y) -> np.ndarray:
        p = np.zeros((2, 2))
        p[int(self.a[x] < 0), int(self.b[y] < 0)] = 1.0
        return p

    def table(self, settings) -> CorrelationTable:
        return CorrelationTable.from_function(settings, (2, 2), self.joint)

    def key(self) -> str:
        return " ".join([f"a({x})={v:+d}" for x, v in self.a.items()] + [f"b({y})={v:+d}" for y, v in self.b.items()])


def deterministic_strategies(x_settings, y_settings) -> list[DeterministicStrategy]:
    out = []
    for av in itertools.product((1, -1), repeat=len(x_settings)):
        for bv in itertools.product((1, -1), repeat=len(y_settings)):
            out.append(DeterministicStrategy(dict(zip(x_settings, av)), dict(zip(y_settings, bv))))
    return out


def mixture_table(strategies, weights, settings) -> CorrelationTable:
    w = np.asarray(weights, dtype=float)
    return CorrelationTable.from_function(settings, (2, 2), lambda x, y: sum(wi * s.joint(x, y) for wi, s in zip(w, strategies)))


@dataclass
class SeparabilityResult:
    """Verdict of the local-polytope membership test.

    When feasible, ``witness`` holds strategy weights that reproduce the
    table. When not, ``certificate`` holds coefficients ``c[(x, y)]`` (2x2
    arrays) and ``offset`` of a linear functional ``F(p) = sum c p + offset``
    whose value on the table exceeds its maximum over deterministic strategies.
    """

    feasible: bool
    phase1_value: float
    strategies: list = field(repr=False)
    witness: np.ndarray | None = field(default=None, repr=False)
    reconstruction_error: float | None = None
    certificate: dict | None = field(default=None, repr=False)
    offset: float = 0.0
    certificate_table_value: float | None = None
    certificate_strategy_max: float | None = None
    pivots: int = 0

    def functional(self, table: CorrelationTable) -> float:
        return float(sum(np.sum(c * table[s]) for s, c in self.certificate.items()) + self.offset)

    def to_dict(self) -> dict:
        out = {"feasible": self.feasible, "phase1_value": self.phase1_value, "pivots": self.pivots}
        if self.feasible:
            out["witness"] = [
                {"strategy": s.key(), "weight": float(w)} for s, w in zip(self.strategies, self.witness) if w > 0.0
            ]
            out["reconstruction_error"] = self.reconstruction_error
        else:
            out["certificate"] = {
                "coefficients": {f"{x}:{y}": c.tolist() for (x, y), c in self.certificate.items()},
                "offset": self.offset,
                "value_on_table": self.certificate_table_value,
                "max_over_strategies": self.certificate_strategy_max,
            }
        return out


def separability_feasible(table: CorrelationTable, tol: float = FEASIBILITY_TOL) -> SeparabilityResult:
    """Is ``table`` a convex mixture of deterministic local strategies?

    Solved as a phase-1 linear program over strategy weights.
    """
    if tuple(table.outcomes) != (2, 2):
        raise ValueError(f"separability test supports binary outcomes only, table has {table.outcomes}")
    xs, ys = table.x_settings, table.y_settings
    if len(xs) > MAX_LOCAL_SETTINGS or len(ys) > MAX_LOCAL_SETTINGS:
        raise ValueError(f"at most {MAX_LOCAL_SETTINGS} settings per side are supported")
    strategies = deterministic_strategies(xs, ys)

    rows, rhs, labels = [], [], []
    for s in table.settings:
        for ia, ib in itertools.product(range(2), range(2)):
            rows.append([st.joint(*s)[ia, ib] for st in strategies])
            rhs.append(table[s][ia, ib])
            labels.append((s, ia, ib))
    rows.append([1.0] * len(strategies))
    rhs.append(1.0)
    labels.append(None)
    a_full = np.array(rows)
    b_full = np.array(rhs)
    a, b, kept = dedupe_rows(a_full, b_full)

    res = phase1(a, b)
    if res.value <= tol:
        q = np.clip(res.x, 0.0, None)
        recon = a_full @ q
        return SeparabilityResult(
            True, res.value, strategies, q, float(np.max(np.abs(recon - b_full))), pivots=res.pivots
        )

    coeffs = {s: np.zeros((2, 2)) for s in table.settings}
    offset = 0.0
    for yi, k in zip(res.dual, kept):
        lab = labels[k]
        if lab is None:
            offset += yi
        else:
            s, ia, ib = lab
            coeffs[s][ia, ib] += yi
    out = SeparabilityResult(False, res.value, strategies, certificate=coeffs, offset=float(offset), pivots=res.pivots)
    out.certificate_table_value = out.functional(table)
    out.certificate_strategy_max = max(out.functional(st.table(table.settings)) for st in strategies)
    return out


def fine_joint(model: FiniteLhvModel, x_list, y_list) -> np.ndarray:
    """Formal joint distribution of all outcomes ``(a_1..a_m, b_1..b_n)``.

    Only defined for measurement-independent models with local responses.
    Returns an array with one axis per setting (x settings first), indexed by
    outcome index.
    """
    props = check_properties(model)
    if not props.measurement_independence:
        raise ValueError("Fine joint distribution requires measurement-independent weights; this model is measurement dependent")
    if not props.parameter_independence:
        raise ValueError("Fine joint distribution requires local responses; this model violates parameter independence")
    p_lam = model.weights[0]
    d1, d2 = model.outcomes

    def response(side, label):
        for i, s in enumerate(model.settings):
            if s[side] == label:
                return model.outcome_rule[i, :, side]
        raise KeyError(f"setting {label!r} does not occur on side {'AB'[side]}")

    ra = [response(0, x) for x in x_list]
    rb = [response(1, y) for y in y_list]
    out = np.zeros((d1,) * len(x_list) + (d2,) * len(y_list))
    for l, w in enumerate(p_lam):
        out[tuple(r[l] for r in ra) + tuple(r[l] for r in rb)] += w
    return out


def pair_marginal(fine: np.ndarray, m: int, j: int, k: int) -> np.ndarray:
    """Marginal of a Fine joint on ``(x_j, y_k)``; ``m`` is the number of x settings."""
    keep = (j, m + k)
    other = tuple(i for i in range(fine.ndim) if i not in keep)
    return fine.sum(axis=other)


@dataclass(frozen=True)
class SignallingViolation:
    side: str
    setting: object
    distant_settings: tuple
    max_deviation: float

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "setting": self.setting,
            "distant_settings": list(self.distant_settings),
            "max_deviation": self.max_deviation,
        }


def detect_signalling(table: CorrelationTable, tol: float = SIGNALLING_TOL) -> list[SignallingViolation]:
    """Settings pairs where one side's marginal depends on the distant setting."""
    out = []
    for side, name in ((1, "B"), (0, "A")):
        local = table.y_settings if side == 1 else table.x_settings
        for v in local:
            distant = [s[1 - side] for s in table.settings if s[side] == v]
            margs = {}
            for d in distant:
                s = (d, v) if side == 1 else (v, d)
                margs[d] = table[s].sum(axis=1 - side)
            for d1, d2 in itertools.combinations(distant, 2):
                dev = float(np.max(np.abs(margs[d1] - margs[d2])))
                if dev > tol:
                    out.append(SignallingViolation(name, v, (d1, d2), dev))
    return out
