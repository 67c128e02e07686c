"""Rotations and product quadrature on the unit sphere.

The quadrature rule is built in a frame adapted to a pair of directions
``(x, y)``: the polar axis is ``x cross y`` and azimuth is measured from
``x`` in the plane of the two directions. In that frame the signs of
``lam.x`` and ``lam.y`` depend on the azimuth alone, so the four great
semicircle boundaries where the singlet-model integrands jump become fixed
azimuthal breakpoints. Each azimuthal arc between breakpoints gets its own
Gauss-Legendre rule, which makes piecewise-smooth integrands converge like
smooth ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .quantum_core import as_direction

DEFAULT_POLAR_ORDER = 64
DEFAULT_AZIMUTH_ORDER = 128


def rotation_from_z(x) -> np.ndarray:
    """Rotation matrix taking the +z axis onto the unit vector ``x``.

    Rodrigues rotation about ``z cross x``; the antipodal case ``x = -z`` is a
    rotation by pi about the +x axis.
    """
    x = as_direction(x)
    z = np.array([0.0, 0.0, 1.0])
    c = float(np.dot(z, x))
    if c > 1.0 - 1e-15:
        return np.eye(3)
    if c < -1.0 + 1e-15:
        return np.diag([1.0, -1.0, -1.0])
    k = np.cross(z, x)
    s = np.linalg.norm(k)
    k = k / s
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + s * kx + (1.0 - c) * (kx @ kx)


def angle_between(x, y) -> float:
    x = as_direction(x)
    y = as_direction(y)
    return float(np.arctan2(np.linalg.norm(np.cross(x, y)), np.dot(x, y)))


def pair_frame(x, y) -> tuple[np.ndarray, float]:
    """Orthonormal frame ``(e1, e2, e3)`` as rows, and the angle between x and y.

    ``e1 = x``; ``y = cos(phi) e1 + sin(phi) e2``; ``e3 = e1 cross e2``.
    """
    x = as_direction(x)
    y = as_direction(y)
    phi = angle_between(x, y)
    perp = y - np.dot(x, y) * x
    n = np.linalg.norm(perp)
    if n < 1e-12:
        # Parallel or antiparallel: any direction orthogonal to x will do.
        trial = np.eye(3)[int(np.argmin(np.abs(x)))]
        perp = trial - np.dot(trial, x) * x
        n = np.linalg.norm(perp)
    e2 = perp / n
    e3 = np.cross(x, e2)
    return np.vstack([x, e2, e3]), phi


@dataclass(frozen=True)
class SphereRule:
    """Nodes on the unit sphere and solid-angle weights summing to 4 pi."""

    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=32)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(n)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def _azimuth_breaks(phi: float) -> np.ndarray:
    raw = np.mod([np.pi / 2, 3 * np.pi / 2, phi + np.pi / 2, phi + 3 * np.pi / 2], 2 * np.pi)
    raw = np.sort(raw)
    keep = [raw[0]]
    for b in raw[1:]:
        if b - keep[-1] > 1e-13:
            keep.append(b)
    if 2 * np.pi - (keep[-1] - keep[0]) < 1e-13 and len(keep) > 1:
        keep.pop()
    return np.array(keep)


def pair_rule(x, y, polar_order: int = DEFAULT_POLAR_ORDER, azimuth_order: int = DEFAULT_AZIMUTH_ORDER) -> SphereRule:
    """Product rule adapted to the sign boundaries of ``lam.x`` and ``lam.y``.

    ``polar_order`` Gauss-Legendre nodes in the polar angle, and
    ``azimuth_order`` nodes in total over the azimuthal arcs.
    """
    if polar_order < 1 or azimuth_order < 4:
        raise ValueError("quadrature orders too small")
    frame, phi = pair_frame(x, y)

    tp, wp = _gauss_legendre(polar_order)
    theta = 0.5 * np.pi * (tp + 1.0)
    w_theta = 0.5 * np.pi * wp * np.sin(theta)

    breaks = _azimuth_breaks(phi)
    arcs = list(zip(breaks, np.append(breaks[1:], breaks[0] + 2 * np.pi)))
    per_arc = max(1, azimuth_order // len(arcs))
    ta, wa = _gauss_legendre(per_arc)
    psi_parts, wpsi_parts = [], []
    for lo, hi in arcs:
        half = 0.5 * (hi - lo)
        psi_parts.append(lo + half * (ta + 1.0))
        wpsi_parts.append(half * wa)
    psi = np.concatenate(psi_parts)
    w_psi = np.concatenate(wpsi_parts)

    st = np.sin(theta)[:, None]
    local = np.stack(
        [st * np.cos(psi)[None, :], st * np.sin(psi)[None, :], np.broadcast_to(np.cos(theta)[:, None], (theta.size, psi.size))],
        axis=-1,
    ).reshape(-1, 3)
    nodes = local @ frame
    weights = (w_theta[:, None] * w_psi[None, :]).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SphereRule(nodes, weights)


def axis_rule(axis, polar_order: int = DEFAULT_POLAR_ORDER, azimuth_order: int = DEFAULT_AZIMUTH_ORDER) -> SphereRule:
    """Product rule with ``axis`` as the polar axis, for integrands of ``lam.axis`` alone.

    Each hemisphere gets ``polar_order // 2`` Gauss-Legendre nodes in ``s``
    with ``|cos theta| = s^2``, which clusters nodes at the equator and tames
    ``|u| log |u|``-type kinks there; the azimuth is uniform.
    """
    if polar_order < 2 or azimuth_order < 1:
        raise ValueError("quadrature orders too small")
    t, w = _gauss_legendre(polar_order // 2)
    s = 0.5 * (t + 1.0)
    u = np.concatenate([s**2, -(s**2)])
    w_u = np.tile(w * s, 2)  # 0.5 w * du/ds, du/ds = 2 s
    psi = 2 * np.pi * (np.arange(azimuth_order) + 0.5) / azimuth_order
    st = np.sqrt(1.0 - u * u)[:, None]
    local = np.stack(
        [st * np.cos(psi)[None, :], st * np.sin(psi)[None, :], np.broadcast_to(u[:, None], (u.size, psi.size))],
        axis=-1,
    ).reshape(-1, 3)
    nodes = local @ rotation_from_z(axis).T
    weights = np.repeat(w_u * 2 * np.pi / azimuth_order, azimuth_order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SphereRule(nodes, weights)


def uniform_sphere(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` points uniform on the sphere (normalized Gaussians)."""
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
