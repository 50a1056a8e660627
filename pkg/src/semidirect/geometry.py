"""Levi-Civita connection, geodesics and curvature of the canonical metric.

In the orthonormal left-invariant frame the connection coefficients are
constants built from the entries of A:

    D_E1 E1 = a E3            D_E1 E2 = (b+c)/2 E3    D_E1 E3 = -a E1 - (b+c)/2 E2
    D_E2 E1 = (b+c)/2 E3      D_E2 E2 = d E3          D_E2 E3 = -(b+c)/2 E1 - d E2
    D_E3 E1 = (c-b)/2 E2      D_E3 E2 = (b-c)/2 E1    D_E3 E3 = 0

Because the coefficients are constant, the curvature tensor is algebraic in
them and geodesics are integrated in frame components (one matrix
exponential per step for the basis change back to coordinates).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .group import as_matrix2, frame_to_coord, metric_at

__all__ = [
    "CancellationError",
    "DegeneratePlaneError",
    "GeodesicBlowupError",
    "Path",
    "frame_connection",
    "frame_connection_coords",
    "christoffel_coords",
    "covariant_derivative",
    "frame_brackets",
    "curvature_operator",
    "sectional_curvature",
    "geodesic_integrate",
]


class CancellationError(ValueError):
    """Finite-difference step so small that rounding noise dominates."""


class DegeneratePlaneError(ValueError):
    """Plane vectors are (numerically) linearly dependent."""


class GeodesicBlowupError(RuntimeError):
    def __init__(self, step: int):
        super().__init__(f"non-finite geodesic state at step {step}")
        self.step = step


def frame_connection(A) -> np.ndarray:
    """Connection table Gamma[i, j, k] with D_{Ei} Ej = sum_k Gamma[i,j,k] Ek."""
    A = as_matrix2(A)
    a, b, c, d = A.a, A.b, A.c, A.d
    s = (b + c) / 2
    gam = np.zeros((3, 3, 3))
    gam[0, 0, 2] = a
    gam[0, 1, 2] = s
    gam[0, 2, 0] = -a
    gam[0, 2, 1] = -s
    gam[1, 0, 2] = s
    gam[1, 1, 2] = d
    gam[1, 2, 0] = -s
    gam[1, 2, 1] = -d
    gam[2, 0, 1] = (c - b) / 2
    gam[2, 1, 0] = (b - c) / 2
    return gam


def frame_brackets(A) -> np.ndarray:
    """Structure constants cb[i, j, k] with [Ei, Ej] = sum_k cb[i,j,k] Ek."""
    gam = frame_connection(A)
    return gam - gam.transpose(1, 0, 2)


def covariant_derivative(tangent, field, field_rate, A) -> np.ndarray:
    """D_T V along a curve, all in frame components.

    ``field_rate`` carries the parameter derivatives of the frame components
    of V; the connection term sum_{ij} T_i V_j D_{Ei} Ej is added.
    """
    gam = frame_connection(A)
    t = np.asarray(tangent, dtype=float)
    v = np.asarray(field, dtype=float)
    rate = np.asarray(field_rate, dtype=float)
    return rate + np.einsum("i,j,ijk->k", t, v, gam)


def frame_connection_coords(p, A) -> np.ndarray:
    """Exact coordinate Christoffel symbols Gamma[i, j, k] at p.

    Obtained by conjugating the constant frame table with the frame matrix
    P(x3) = block(e^{x3 A}, 1); the only x3-dependence enters through
    d/dx3 P^{-1} = block(-A e^{-x3 A}, 0).
    """
    from .group import exp_zA

    A = as_matrix2(A)
    x3 = float(np.asarray(p, dtype=float)[2])
    gam = frame_connection(A)
    E = exp_zA(A, x3)
    En = exp_zA(A, -x3)
    P = np.zeros((3, 3))
    P[:2, :2] = E
    P[2, 2] = 1.0
    Pinv = np.zeros((3, 3))
    Pinv[:2, :2] = En
    Pinv[2, 2] = 1.0
    dPinv = np.zeros((3, 3))
    dPinv[:2, :2] = -A.mat @ En

    out = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            frame = np.einsum("a,b,abk->k", Pinv[:, i], Pinv[:, j], gam)
            if i == 2:
                frame = frame + dPinv[:, j]
            out[i, j] = P @ frame
    return out


def christoffel_coords(p, A, h: float = 1e-4) -> np.ndarray:
    """Coordinate Christoffel symbols by central differences of the metric.

    Cross-validates the frame table; raises CancellationError when halving
    the step increases the change in the result (rounding noise dominates).
    """
    if not h > 0:
        raise ValueError("step h must be positive")
    g_h = _christoffel_fd(p, A, h)
    g_half = _christoffel_fd(p, A, h / 2)
    g_double = _christoffel_fd(p, A, 2 * h)
    fine = np.max(np.abs(g_h - g_half))
    coarse = np.max(np.abs(g_double - g_h))
    if fine > 1.5 * coarse + 1e-12:
        raise CancellationError(
            f"step {h:g} too small: |G(h)-G(h/2)| = {fine:.3g} exceeds "
            f"|G(2h)-G(h)| = {coarse:.3g}"
        )
    return g_half


def _christoffel_fd(p, A, h):
    p = np.asarray(p, dtype=float)
    dg = np.zeros((3, 3, 3))
    for l in range(3):
        e = np.zeros(3)
        e[l] = h
        dg[l] = (metric_at(p + e, A) - metric_at(p - e, A)) / (2 * h)
    ginv = np.linalg.inv(metric_at(p, A))
    # Gamma^k_ij = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij}); dg[l] = d_l g
    s = dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0)
    return 0.5 * np.einsum("kl,ijl->ijk", ginv, s)


def curvature_operator(A, x, y, z) -> np.ndarray:
    """R(X, Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z for constant frame vectors."""
    gam = frame_connection(A)
    cb = frame_brackets(A)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)

    def nab(u, w):
        return np.einsum("i,j,ijk->k", u, w, gam)

    bracket = np.einsum("i,j,ijk->k", x, y, cb)
    return nab(x, nab(y, z)) - nab(y, nab(x, z)) - nab(bracket, z)


def sectional_curvature(A, v, w) -> float:
    """Sectional curvature of the plane spanned by frame vectors v, w.

    Exact (algebraic) since the frame connection coefficients are constants.
    Values are validated against the paper's constant-curvature family only;
    for other A they are exposed without further correctness claims.
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    gram = (v @ v) * (w @ w) - (v @ w) ** 2
    if gram < 1e-12:
        raise DegeneratePlaneError(f"Gram determinant {gram:.3g} < 1e-12")
    r = curvature_operator(A, v, w, w)
    return float((r @ v) / gram)


@dataclass(frozen=True)
class Path:
    """Sampled geodesic: arclength parameters, points, frame velocities."""

    t: np.ndarray
    points: np.ndarray
    velocities: np.ndarray

    def speeds(self) -> np.ndarray:
        return np.linalg.norm(self.velocities, axis=1)


def geodesic_integrate(start_point, start_velocity, length: float, steps: int, A) -> Path:
    """Integrate the geodesic ODE with classical RK4.

    State is (coordinates, frame velocity); coordinate rates come from the
    frame-to-coordinate change, velocity rates from -sum v_i v_j D_{Ei}Ej.
    The initial velocity is normalized to unit speed.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not length > 0:
        raise ValueError("length must be positive")
    p = np.asarray(start_point, dtype=float).copy()
    v = np.asarray(start_velocity, dtype=float).copy()
    speed = np.linalg.norm(v)
    if speed == 0:
        raise ValueError("velocity must be nonzero")
    v = v / speed
    gam = frame_connection(A)

    def rates(state):
        x, vel = state[:3], state[3:]
        dx = frame_to_coord(vel, x, A)
        dv = -np.einsum("i,j,ijk->k", vel, vel, gam)
        return np.concatenate([dx, dv])

    h = length / steps
    y = np.concatenate([p, v])
    t = np.empty(steps + 1)
    pts = np.empty((steps + 1, 3))
    vels = np.empty((steps + 1, 3))
    t[0], pts[0], vels[0] = 0.0, y[:3], y[3:]
    for k in range(steps):
        k1 = rates(y)
        k2 = rates(y + 0.5 * h * k1)
        k3 = rates(y + 0.5 * h * k2)
        k4 = rates(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise GeodesicBlowupError(k + 1)
        t[k + 1] = (k + 1) * h
        pts[k + 1] = y[:3]
        vels[k + 1] = y[3:]
    return Path(t=t, points=pts, velocities=vels)
