"""Finite local deterministic models built from arbitrary correlation data.

Settings and outcomes are opaque labels here. Outcomes are stored by index:
side A has ``d1`` outcomes and side B has ``d2``. For binary sides, index 0
is the outcome ``+1`` (label 1) and index 1 is ``-1`` (label 2).
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .quantum_core import DensityOperator, PovmFamily, ValidationError, born_probability

NORM_TOL = 1e-10
PROPERTY_TOL = 1e-10
REPRODUCTION_TOL = 1e-9


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CorrelationTable:
    """Joint outcome distributions ``p(a, b | x, y)`` on a finite list of settings.

    ``probs[(x, y)]`` is a ``(d1, d2)`` array.
    """

    settings: tuple
    outcomes: tuple[int, int]
    probs: Mapping = field(repr=False)

    def __post_init__(self):
        settings = tuple(tuple(s) for s in self.settings)
        if not settings:
            raise ValidationError("table has no settings")
        if len(set(settings)) != len(settings):
            raise ValidationError("duplicate settings in table")
        d1, d2 = (int(d) for d in self.outcomes)
        if d1 < 1 or d2 < 1:
            raise ValidationError(f"invalid outcome counts {self.outcomes!r}")
        probs = {}
        for s in settings:
            if s not in self.probs:
                raise ValidationError(f"no distribution for setting {s!r}")
            p = np.asarray(self.probs[s], dtype=float)
            if p.shape != (d1, d2):
                raise ValidationError(f"distribution for {s!r} has shape {p.shape}, expected {(d1, d2)}")
            if not np.all(np.isfinite(p)) or p.min() < -NORM_TOL:
                raise ValidationError(f"distribution for {s!r} has negative or non-finite entries")
            if abs(p.sum() - 1.0) > NORM_TOL:
                raise ValidationError(f"distribution for {s!r} sums to {p.sum()!r}")
            probs[s] = _readonly(p)
        object.__setattr__(self, "settings", settings)
        object.__setattr__(self, "outcomes", (d1, d2))
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, setting) -> np.ndarray:
        return self.probs[tuple(setting)]

    @property
    def x_settings(self) -> tuple:
        return tuple(dict.fromkeys(s[0] for s in self.settings))

    @property
    def y_settings(self) -> tuple:
        return tuple(dict.fromkeys(s[1] for s in self.settings))

    def as_array(self) -> np.ndarray:
        """Stacked ``(n_settings, d1, d2)`` array in ``settings`` order."""
        return np.stack([self.probs[s] for s in self.settings])

    @classmethod
    def from_function(cls, settings: Sequence, outcomes: tuple[int, int], fn) -> "CorrelationTable":
        """Build a table from ``fn(x, y) -> (d1, d2) array``."""
        settings = [tuple(s) for s in settings]
        return cls(tuple(settings), outcomes, {s: fn(*s) for s in settings})


@dataclass(frozen=True)
class FiniteLhvModel:
    """Hidden-variable weights plus a deterministic outcome rule.

    ``weights[s, l]`` is ``p(lambda_l | settings[s])``. ``outcome_rule[s, l]``
    holds the outcome indices ``(i_a, i_b)`` produced by ``lambda_l`` at
    ``settings[s]``.
    """

    lambda_domain: tuple
    settings: tuple
    weights: np.ndarray = field(repr=False)
    outcome_rule: np.ndarray = field(repr=False)
    outcomes: tuple[int, int] = (2, 2)
    preparation: str = "P"

    def __post_init__(self):
        lam = tuple(self.lambda_domain)
        settings = tuple(tuple(s) for s in self.settings)
        w = np.asarray(self.weights, dtype=float)
        rule = np.asarray(self.outcome_rule, dtype=int)
        if w.shape != (len(settings), len(lam)):
            raise ValidationError(f"weights have shape {w.shape}, expected {(len(settings), len(lam))}")
        if rule.shape != (len(settings), len(lam), 2):
            raise ValidationError(f"outcome rule has shape {rule.shape}, expected {(len(settings), len(lam), 2)}")
        if w.min() < -NORM_TOL:
            raise ValidationError("negative hidden-variable weight")
        bad = np.abs(w.sum(axis=1) - 1.0) > NORM_TOL
        if bad.any():
            s = settings[int(np.argmax(bad))]
            raise ValidationError(f"weights at setting {s!r} do not sum to 1")
        d1, d2 = self.outcomes
        if rule.min() < 0 or rule[..., 0].max() >= d1 or rule[..., 1].max() >= d2:
            raise ValidationError("outcome rule produces indices outside the outcome sets")
        object.__setattr__(self, "lambda_domain", lam)
        object.__setattr__(self, "settings", settings)
        object.__setattr__(self, "weights", _readonly(w))
        rule = rule.copy()
        rule.setflags(write=False)
        object.__setattr__(self, "outcome_rule", rule)
        object.__setattr__(self, "outcomes", (int(d1), int(d2)))

    def _index(self, lam, x, y) -> tuple[int, int]:
        return self.settings.index((x, y)), self.lambda_domain.index(lam)

    def weight(self, lam, x, y) -> float:
        s, l = self._index(lam, x, y)
        return float(self.weights[s, l])

    def outcome(self, lam, x, y) -> tuple[int, int]:
        s, l = self._index(lam, x, y)
        return tuple(int(v) for v in self.outcome_rule[s, l])

    def implied_joint(self, x, y) -> np.ndarray:
        """``sum_lambda p(lambda | x, y) delta(a, A) delta(b, B)``."""
        s = self.settings.index((x, y))
        out = np.zeros(self.outcomes)
        np.add.at(out, (self.outcome_rule[s, :, 0], self.outcome_rule[s, :, 1]), self.weights[s])
        return out

    def implied_table(self) -> CorrelationTable:
        return CorrelationTable(self.settings, self.outcomes, {s: self.implied_joint(*s) for s in self.settings})

    def to_dict(self) -> dict:
        return {
            "preparation": self.preparation,
            "lambda_domain": [list(l) if isinstance(l, tuple) else l for l in self.lambda_domain],
            "settings": [list(s) for s in self.settings],
            "outcomes": list(self.outcomes),
            "weights": {f"{x}:{y}": self.weights[i].tolist() for i, (x, y) in enumerate(self.settings)},
            "outcome_rule": {f"{x}:{y}": self.outcome_rule[i].tolist() for i, (x, y) in enumerate(self.settings)},
        }


def _outcome_pairs(d1: int, d2: int) -> list[tuple[int, int]]:
    return list(itertools.product(range(d1), range(d2)))


def _identity_rule(n_settings: int, d1: int, d2: int) -> np.ndarray:
    pairs = np.array(_outcome_pairs(d1, d2), dtype=int)
    return np.broadcast_to(pairs, (n_settings, d1 * d2, 2)).copy()


def build_general_brans(rho: DensityOperator, povms: PovmFamily, preparation: str = "P") -> FiniteLhvModel:
    """Local deterministic model reproducing ``tr[rho E^{xy}_{ab}]``.

    The hidden variable is a joint outcome label ``(l1, l2)`` in
    ``{1..d1} x {1..d2}``; its weight at ``(x, y)`` is the Born probability of
    that outcome and it deterministically yields ``a = l1``, ``b = l2``.
    """
    if not isinstance(povms, PovmFamily):
        raise ValidationError("povms must be a validated PovmFamily")
    d1, d2 = povms.d1, povms.d2
    if rho.dim != d1 * d2:
        raise ValidationError(f"state dimension {rho.dim} does not match d1*d2 = {d1 * d2}")
    pairs = _outcome_pairs(d1, d2)
    lam = tuple((a + 1, b + 1) for a, b in pairs)
    w = np.array([[born_probability(rho, povms.effect(x, y, l1, l2)) for l1, l2 in lam] for x, y in povms.settings])
    return FiniteLhvModel(lam, povms.settings, w, _identity_rule(len(povms.settings), d1, d2), (d1, d2), preparation)


def build_signalling_model(table: CorrelationTable, preparation: str = "P") -> FiniteLhvModel:
    """Local deterministic model reproducing any correlation table, signalling or not.

    The hidden variable ranges over joint outcomes and is distributed exactly
    as the observed outcomes are.
    """
    if not isinstance(table, CorrelationTable):
        raise ValidationError("expected a CorrelationTable")
    d1, d2 = table.outcomes
    pairs = _outcome_pairs(d1, d2)
    lam = tuple((a + 1, b + 1) for a, b in pairs)
    w = np.array([[table[s][a, b] for a, b in pairs] for s in table.settings])
    return FiniteLhvModel(lam, table.settings, w, _identity_rule(len(table.settings), d1, d2), (d1, d2), preparation)


@dataclass(frozen=True)
class ReproductionReport:
    max_abs_error: float
    passed: bool
    worst: tuple | None = None

    def to_dict(self) -> dict:
        return {"max_abs_error": self.max_abs_error, "pass": self.passed, "worst": list(self.worst) if self.worst else None}


def verify_reproduction(model: FiniteLhvModel, table: CorrelationTable, tol: float = REPRODUCTION_TOL) -> ReproductionReport:
    """Compare the model-implied joint distributions against ``table``."""
    if set(model.settings) != set(table.settings):
        raise ValidationError("model and table have different settings")
    if tuple(model.outcomes) != tuple(table.outcomes):
        raise ValidationError(f"outcome sets differ: {model.outcomes} vs {table.outcomes}")
    err, worst = 0.0, None
    for s in table.settings:
        diff = np.abs(model.implied_joint(*s) - table[s])
        i = np.unravel_index(int(np.argmax(diff)), diff.shape)
        if diff[i] > err or worst is None:
            err, worst = float(diff[i]), (s, tuple(int(v) for v in i))
    return ReproductionReport(err, err < tol, worst)


@dataclass(frozen=True)
class Properties:
    """Which of the three Bell-separability ingredients a model satisfies."""

    outcome_independence: bool
    parameter_independence: bool
    measurement_independence: bool

    # Common aliases: completeness = outcome independence,
    # locality = parameter independence.
    @property
    def statistical_completeness(self) -> bool:
        return self.outcome_independence

    @property
    def statistical_locality(self) -> bool:
        return self.parameter_independence

    @property
    def bell_separable(self) -> bool:
        return self.outcome_independence and self.parameter_independence and self.measurement_independence

    def to_dict(self) -> dict:
        return {
            "outcome_independence": self.outcome_independence,
            "parameter_independence": self.parameter_independence,
            "measurement_independence": self.measurement_independence,
        }


def _conditional_outcomes(model: FiniteLhvModel) -> np.ndarray:
    """``p(a, b | lambda, x, y)`` as a one-hot array of shape (S, L, d1, d2)."""
    d1, d2 = model.outcomes
    s, l = model.weights.shape
    p = np.zeros((s, l, d1, d2))
    si, li = np.meshgrid(np.arange(s), np.arange(l), indexing="ij")
    p[si, li, model.outcome_rule[..., 0], model.outcome_rule[..., 1]] = 1.0
    return p


def check_properties(model: FiniteLhvModel, tol: float = PROPERTY_TOL) -> Properties:
    """Test outcome independence, parameter independence and measurement independence."""
    p = _conditional_outcomes(model)
    pa = p.sum(axis=3)
    pb = p.sum(axis=2)
    outcome_ind = bool(np.max(np.abs(p - pa[..., :, None] * pb[..., None, :])) <= tol)

    param_ind = True
    settings = model.settings
    for side, marg in ((0, pa), (1, pb)):
        groups: dict = {}
        for i, s in enumerate(settings):
            groups.setdefault(s[side], []).append(i)
        for idx in groups.values():
            ref = marg[idx[0]]
            if any(np.max(np.abs(marg[j] - ref)) > tol for j in idx[1:]):
                param_ind = False

    meas_ind = bool(np.max(np.abs(model.weights - model.weights[0])) <= tol)
    return Properties(outcome_ind, param_ind, meas_ind)


@dataclass(frozen=True)
class MuModel:
    """Causal model: ``lambda`` generates ``mu = (mu1, mu2)``, then ``x = mu1`` and ``y = mu2``.

    ``p_mu_given_lambda[l, m]`` is ``p(mu_m | lambda_l)`` for the retained
    hidden variables; ``excluded`` lists hidden variables of zero marginal
    probability, for which the conditional is undefined.
    """

    lambda_domain: tuple
    mu_domain: tuple
    p_mu_given_lambda: np.ndarray = field(repr=False)
    p_lambda: np.ndarray = field(repr=False)
    excluded: tuple = ()

    def p_x_given_mu(self, x, mu) -> float:
        return 1.0 if mu[0] == x else 0.0

    def p_y_given_mu(self, y, mu) -> float:
        return 1.0 if mu[1] == y else 0.0

    def p_settings_given_lambda(self, lam) -> dict:
        """``p(x, y | lambda) = sum_mu p(x|mu) p(y|mu) p(mu|lambda)``."""
        l = self.lambda_domain.index(lam)
        out = {}
        for x, y in self.mu_domain:
            out[(x, y)] = sum(
                self.p_x_given_mu(x, mu) * self.p_y_given_mu(y, mu) * self.p_mu_given_lambda[l, m]
                for m, mu in enumerate(self.mu_domain)
            )
        return out

    def joint(self) -> np.ndarray:
        """``p(lambda, x, y)`` as an (L, S) array over ``mu_domain`` settings."""
        return self.p_lambda[:, None] * self.p_mu_given_lambda

    def to_dict(self) -> dict:
        return {
            "lambda_domain": [list(l) if isinstance(l, tuple) else l for l in self.lambda_domain],
            "mu_domain": [list(m) for m in self.mu_domain],
            "p_mu_given_lambda": self.p_mu_given_lambda.tolist(),
            "p_lambda": self.p_lambda.tolist(),
            "excluded": [list(l) if isinstance(l, tuple) else l for l in self.excluded],
        }


def _weights_array(weights, settings=None) -> tuple[tuple, tuple, np.ndarray]:
    if isinstance(weights, FiniteLhvModel):
        return weights.lambda_domain, weights.settings, np.asarray(weights.weights)
    # Mapping (lambda, x, y) -> probability.
    keys = list(weights)
    lam = tuple(dict.fromkeys(k[0] for k in keys))
    sets = tuple(dict.fromkeys((k[1], k[2]) for k in keys)) if settings is None else tuple(tuple(s) for s in settings)
    w = np.array([[float(weights.get((l, x, y), 0.0)) for l in lam] for x, y in sets])
    return lam, sets, w


def bayes_settings_given_lambda(weights, p_xy: Mapping) -> dict:
    """``p0(x, y | lambda) = p(lambda | x, y) p(x, y) / p0(lambda)``, computed directly.

    Returns ``{lambda: {(x, y): prob}}`` for hidden variables with positive
    marginal.
    """
    lam, settings, w = _weights_array(weights)
    pxy = np.array([float(p_xy.get(s, 0.0)) for s in settings])
    out = {}
    for j, l in enumerate(lam):
        pl = float(np.dot(w[:, j], pxy))
        if pl > 0.0:
            out[l] = {s: w[i, j] * pxy[i] / pl for i, s in enumerate(settings)}
    return out


def causal_decomposition(weights, p_xy: Mapping) -> MuModel:
    """Causal model for measurement-dependent weights under a settings distribution.

    ``weights`` is a :class:`FiniteLhvModel` or a mapping
    ``(lambda, x, y) -> p(lambda | x, y)``; ``p_xy`` maps ``(x, y)`` to its
    probability. Settings with zero probability are dropped.
    """
    lam, settings, w = _weights_array(weights)
    pxy_all = np.array([float(p_xy.get(s, 0.0)) for s in settings])
    if pxy_all.min() < 0 or abs(pxy_all.sum() - 1.0) > NORM_TOL:
        raise ValidationError("p_xy must be a probability distribution over the model settings")
    keep_s = pxy_all > 0.0
    mu_domain = tuple(s for s, k in zip(settings, keep_s) if k)
    w = w[keep_s]
    pxy = pxy_all[keep_s]

    numer = w.T * pxy[None, :]  # (L, M): p0(lambda | mu) p0(mu)
    denom = numer.sum(axis=1)
    keep_l = denom > 0.0
    excluded = tuple(l for l, k in zip(lam, keep_l) if not k)
    if excluded:
        warnings.warn(f"hidden variables with zero probability excluded: {excluded!r}", stacklevel=2)
    cond = numer[keep_l] / denom[keep_l, None]
    return MuModel(
        tuple(l for l, k in zip(lam, keep_l) if k),
        mu_domain,
        _readonly(cond),
        _readonly(denom[keep_l]),
        excluded,
    )
