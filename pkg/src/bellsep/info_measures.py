"""Entropies, mutual information and the measurement-dependence capacity.

All quantities are in bits. Differential entropies on the sphere are taken
relative to the solid-angle measure, so the uniform density has entropy
``log2(4 pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .general_model import FiniteLhvModel
from .quantum_core import UnitVector3, as_direction
from .singlet_models import (
    SIGN_PAIRS,
    ModelKind,
    SingletModel,
    brans_weights,
    degorre_density,
    hall_density,
)
from .sphere import DEFAULT_AZIMUTH_ORDER, DEFAULT_POLAR_ORDER, axis_rule, pair_rule

NORM_TOL = 1e-10
NEG_TOL = 1e-12
GOLDEN_XTOL = 1e-4
GOLDEN_MAX_ITER = 200
LOG2_4PI = math.log2(4.0 * math.pi)


def _xlog2x(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = p[pos] * np.log2(p[pos])
    return out


def _check_distribution(p, what: str = "distribution") -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{what} contains NaN or infinite entries")
    if p.size and p.min() < -NEG_TOL:
        raise ValueError(f"{what} has a negative weight {p.min()!r}")
    if abs(p.sum() - 1.0) > NORM_TOL:
        raise ValueError(f"{what} is not normalized (sum {p.sum()!r})")
    return np.clip(p, 0.0, None)


def shannon_entropy(dist) -> float:
    """Shannon entropy in bits, with ``0 log 0 = 0``."""
    p = _check_distribution(np.ravel(dist))
    return float(max(0.0, -_xlog2x(p).sum()))


def binary_correlation_entropy(a: float) -> float:
    """Entropy of ``{(1 + a)/2, (1 - a)/2}`` for ``a`` in [-1, 1]."""
    if not -1.0 <= a <= 1.0:
        raise ValueError(f"correlation must lie in [-1, 1], got {a!r}")
    return shannon_entropy([(1.0 + a) / 2.0, (1.0 - a) / 2.0])


def brans_conditional_entropy(x, y) -> float:
    """Entropy of the Brans weights at ``(x, y)``: ``1 + h(x.y)``."""
    c = float(np.clip(np.dot(as_direction(x), as_direction(y)), -1.0, 1.0))
    return 1.0 + binary_correlation_entropy(c)


def sphere_conditional_entropy(
    model, x, y, polar_order: int = DEFAULT_POLAR_ORDER, azimuth_order: int = DEFAULT_AZIMUTH_ORDER
) -> float:
    """Differential entropy (bits) of a sphere model's hidden-variable density at ``(x, y)``."""
    kind = model.kind if isinstance(model, SingletModel) else ModelKind(model)
    if kind is ModelKind.DEGORRE:
        # The density is a function of lam.x only: integrate about x.
        rule = axis_rule(x, polar_order, azimuth_order)
        p = degorre_density(rule.nodes, x)
    elif kind is ModelKind.HALL:
        rule = pair_rule(x, y, polar_order, azimuth_order)
        p = hall_density(rule.nodes, x, y)
    else:
        raise ValueError("sphere_conditional_entropy needs the Degorre or Hall model")
    return -rule.integrate(_xlog2x(p))


def mutual_information(joint) -> float:
    """Mutual information between the hidden variable and the settings.

    ``joint`` is either a 2-D array indexed ``[lambda, setting]`` or a
    mapping ``(lambda, setting) -> probability``.
    """
    if isinstance(joint, Mapping):
        lams = list(dict.fromkeys(k[0] for k in joint))
        sets = list(dict.fromkeys(k[1] for k in joint))
        arr = np.zeros((len(lams), len(sets)))
        for (l, s), p in joint.items():
            arr[lams.index(l), sets.index(s)] += p
    else:
        arr = np.asarray(joint, dtype=float)
        if arr.ndim != 2:
            raise ValueError("joint must be a 2-D array [lambda, setting]")
    arr = _check_distribution(arr, "joint distribution")
    h_l = -_xlog2x(arr.sum(axis=1)).sum()
    h_s = -_xlog2x(arr.sum(axis=0)).sum()
    h_ls = -_xlog2x(arr).sum()
    return float(h_l + h_s - h_ls)


def general_dimension_bound(d1: int, d2: int) -> float:
    """``log2(d1 d2)``: ceiling on the capacity of the generalized Brans model."""
    if int(d1) < 1 or int(d2) < 1:
        raise ValueError(f"dimensions must be positive, got ({d1}, {d2})")
    return math.log2(int(d1) * int(d2))


@dataclass
class CmdReport:
    """Bound ``h_max - inf_hxy`` on the measurement-dependence capacity, plus
    its exact value where an achieving settings distribution is known."""

    model: str
    h_max: float
    inf_hxy: float
    exact_value: float | None = None
    achieving_pxy_description: str | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def upper_bound(self) -> float:
        return self.h_max - self.inf_hxy

    def to_dict(self) -> dict:
        out = {
            "model": self.model,
            "h_max": self.h_max,
            "inf_hxy": self.inf_hxy,
            "upper_bound": self.upper_bound,
        }
        if self.exact_value is not None:
            out["exact_value"] = self.exact_value
        if self.achieving_pxy_description:
            out["achieving_pxy"] = self.achieving_pxy_description
        out["notes"] = list(self.notes)
        return out


def golden_section_minimize(f, lo: float, hi: float, xtol: float = GOLDEN_XTOL, max_iter: int = GOLDEN_MAX_ITER):
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < xtol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    else:
        raise RuntimeError(f"golden-section search did not converge in {max_iter} iterations")
    x = 0.5 * (a + b)
    return x, f(x)


def _pair_at_angle(phi: float) -> tuple[np.ndarray, np.ndarray]:
    return np.array([0.0, 0.0, 1.0]), np.array(UnitVector3.from_angles(phi))


def brans_two_point_joint() -> np.ndarray:
    """``p(lambda, x, y)`` for the Brans weights with settings ``(z, z)`` and ``(z, -z)`` equally likely."""
    z = np.array([0.0, 0.0, 1.0])
    return 0.5 * np.column_stack([brans_weights(z, z), brans_weights(z, -z)])


def degorre_marginal_density(lam=(0.0, 0.0, 1.0), polar_order: int = DEFAULT_POLAR_ORDER) -> float:
    """Hidden-variable marginal at ``lam`` when ``x`` is uniform on the sphere.

    ``p(lam) = int dx / (4 pi) |lam.x| / (2 pi)``, evaluated by quadrature over ``x``.
    """
    lam = as_direction(lam)
    rule = axis_rule(lam, polar_order)
    return rule.integrate(degorre_density(rule.nodes, lam)) / (4.0 * np.pi)


def cmd_report(
    model,
    settings_domain=None,
    polar_order: int = DEFAULT_POLAR_ORDER,
    azimuth_order: int = DEFAULT_AZIMUTH_ORDER,
) -> CmdReport:
    """Measurement-dependence capacity report for a singlet or finite model.

    For a :class:`FiniteLhvModel` the infimum runs over its settings (or over
    ``settings_domain`` if given). For the sphere models it runs over the
    angle between the directions, by rotational invariance.
    """
    if isinstance(model, FiniteLhvModel):
        settings = model.settings if settings_domain is None else [tuple(s) for s in settings_domain]
        rows = [model.weights[model.settings.index(s)] for s in settings]
        hs = [shannon_entropy(r) for r in rows]
        return CmdReport(
            model=f"finite:{model.preparation}",
            h_max=math.log2(len(model.lambda_domain)),
            inf_hxy=float(min(hs)),
            notes=[f"infimum over {len(settings)} settings"],
        )

    kind = model.kind if isinstance(model, SingletModel) else ModelKind(model)
    if kind is ModelKind.BRANS:
        z = np.array([0.0, 0.0, 1.0])
        # 1 + h(x.y) is smallest at x.y = +-1.
        inf_h = min(brans_conditional_entropy(z, z), brans_conditional_entropy(z, -z))
        return CmdReport(
            model=kind.value,
            h_max=math.log2(len(SIGN_PAIRS)),
            inf_hxy=inf_h,
            exact_value=mutual_information(brans_two_point_joint()),
            achieving_pxy_description="p(x,y) = [delta(x+y) + delta(x-y)]/(8 pi); evaluated on the two-point version {(z,z), (z,-z)}",
        )

    if kind is ModelKind.DEGORRE:
        x, y = _pair_at_angle(np.pi / 3)
        h_xy = sphere_conditional_entropy(kind, x, y, polar_order, azimuth_order)
        marginal = degorre_marginal_density(polar_order=polar_order)
        # The marginal is rotation invariant, hence constant: H(Lambda) = -log2 p.
        exact = -math.log2(marginal) - h_xy
        return CmdReport(
            model=kind.value,
            h_max=LOG2_4PI,
            inf_hxy=h_xy,
            exact_value=exact,
            achieving_pxy_description="p(x,y) = p(y)/(4 pi): x uniform on the sphere, y arbitrary",
            notes=["conditional entropy is independent of (x, y)"],
        )

    phi, neg_h = golden_section_minimize(
        lambda t: sphere_conditional_entropy(kind, *_pair_at_angle(t), polar_order, azimuth_order),
        0.0,
        0.5 * np.pi,
    )
    return CmdReport(
        model=kind.value,
        h_max=LOG2_4PI,
        inf_hxy=neg_h,
        notes=[
            f"infimum at angle {phi:.6f} rad (the entropy is symmetric under angle -> pi - angle)",
            "attainment of the bound by some p(x,y) is not established here",
        ],
    )
