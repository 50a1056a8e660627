"""The Lie group R^2 x|_A R: group law, invariant frames, canonical metric.

A point is an array (x1, x2, x3).  The 2x2 matrix A = [[a, b], [c, d]]
determines both the group operation

    (p, z) * (q, w) = (p + e^{zA} q, z + w),      p, q in R^2,

and the canonical left-invariant metric, defined as the one that makes the
left-invariant frame {E1, E2, E3} orthonormal.  In coordinates the frame is

    E1 = a11(x3) dx1 + a21(x3) dx2,   E2 = a12(x3) dx1 + a22(x3) dx2,
    E3 = dx3,        where  e^{x3 A} = [[a11, a12], [a21, a22]],

so the coordinate metric has upper 2x2 block (e^{-x3 A})^T (e^{-x3 A}),
g33 = 1 and no cross terms.  All operations here are pure functions; point
arguments broadcast over leading axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Matrix2",
    "GroupConstants",
    "as_matrix2",
    "exp_zA",
    "multiply",
    "inverse",
    "identity_point",
    "left_frame_at",
    "right_frame_at",
    "metric_at",
    "metric_blocks",
    "coord_to_frame",
    "frame_to_coord",
    "group_constants",
    "left_translation_differential",
    "rotation_isometry",
]

# |discriminant| below this is treated as a repeated eigenvalue
_DISCRIMINANT_TOL = 1e-12

_UNIMODULAR_TOL = 1e-14


@dataclass(frozen=True)
class Matrix2:
    """2x2 real matrix A = [[a, b], [c, d]] with trace(A) >= 0 enforced.

    When the supplied entries have a + d < 0 the whole matrix is replaced by
    -A (an orientation flip of the group) and ``flipped`` records that the
    replacement happened so callers can report it.
    """

    a: float
    b: float
    c: float
    d: float
    flipped: bool = False

    def __post_init__(self):
        vals = [float(self.a), float(self.b), float(self.c), float(self.d)]
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("matrix entries must be finite")
        flip = vals[0] + vals[3] < 0.0
        if flip:
            vals = [-v for v in vals]
        for name, v in zip("abcd", vals):
            object.__setattr__(self, name, v)
        object.__setattr__(self, "flipped", bool(self.flipped) or flip)

    @classmethod
    def of(cls, rows) -> "Matrix2":
        """Build from any 2x2 array-like [[a, b], [c, d]]."""
        m = np.asarray(rows, dtype=float)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def zero(cls) -> "Matrix2":
        """A = 0: the abelian group R^3 with the Euclidean metric."""
        return cls(0.0, 0.0, 0.0, 0.0)

    @classmethod
    def nil3(cls) -> "Matrix2":
        """The Heisenberg group Nil3 (A = [[0, 1], [0, 0]])."""
        return cls(0.0, 1.0, 0.0, 0.0)

    @classmethod
    def hyperbolic3(cls) -> "Matrix2":
        """Hyperbolic three-space (A = identity)."""
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def mat(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def h0(self) -> float:
        """Critical mean curvature H0 = trace(A)/2 of the group."""
        return 0.5 * self.trace

    @property
    def unimodular(self) -> bool:
        return abs(self.trace) < _UNIMODULAR_TOL


def as_matrix2(A) -> Matrix2:
    if isinstance(A, Matrix2):
        return A
    return Matrix2.of(A)


@dataclass(frozen=True)
class GroupConstants:
    trace: float
    h0: float
    unimodular: bool


def group_constants(A) -> GroupConstants:
    """Trace, critical mean curvature H0 = trace/2 and unimodularity of A.

    The group is unimodular exactly when the normal R^2 subgroup is a
    minimal surface, i.e. trace(A) = 0.
    """
    A = as_matrix2(A)
    return GroupConstants(trace=A.trace, h0=A.h0, unimodular=A.unimodular)


def exp_zA(A, z):
    """Closed-form matrix exponential e^{zA} for 2x2 A.

    ``z`` may be a scalar or an array; the result has shape z.shape + (2, 2).
    Branches on the discriminant of the characteristic polynomial: distinct
    real eigenvalues (hyperbolic functions), complex pair (trigonometric),
    or repeated eigenvalue within 1e-12 (e^{zA} = e^{lam z}(I + z(A - lam I))).
    """
    A = as_matrix2(A)
    zarr = np.asarray(z, dtype=float)
    lam = 0.5 * (A.a + A.d)
    # B = A - lam*I is traceless, B^2 = q*I with q = discriminant/4
    q = 0.25 * (A.a - A.d) ** 2 + A.b * A.c
    B = np.array([[A.a - lam, A.b], [A.c, A.d - lam]])
    if 4.0 * abs(q) <= _DISCRIMINANT_TOL:
        coef_i = np.ones_like(zarr)
        coef_b = zarr
    elif q > 0.0:
        s = math.sqrt(q)
        coef_i = np.cosh(s * zarr)
        coef_b = np.sinh(s * zarr) / s
    else:
        w = math.sqrt(-q)
        coef_i = np.cos(w * zarr)
        coef_b = np.sin(w * zarr) / w
    scale = np.exp(lam * zarr)
    out = np.empty(zarr.shape + (2, 2))
    out[..., 0, 0] = scale * (coef_i + coef_b * B[0, 0])
    out[..., 0, 1] = scale * (coef_b * B[0, 1])
    out[..., 1, 0] = scale * (coef_b * B[1, 0])
    out[..., 1, 1] = scale * (coef_i + coef_b * B[1, 1])
    return out


def identity_point() -> np.ndarray:
    return np.zeros(3)


def multiply(p, q, A) -> np.ndarray:
    """Group operation p * q = (p12 + e^{p3 A} q12, p3 + q3); broadcasts."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    p, q = np.broadcast_arrays(p, q)
    E = exp_zA(A, p[..., 2])
    xy = p[..., :2] + np.einsum("...ij,...j->...i", E, q[..., :2])
    x3 = p[..., 2] + q[..., 2]
    return np.concatenate([xy, x3[..., None]], axis=-1)


def inverse(p, A) -> np.ndarray:
    """Group inverse (-e^{-p3 A} p12, -p3)."""
    p = np.asarray(p, dtype=float)
    E = exp_zA(A, -p[..., 2])
    xy = -np.einsum("...ij,...j->...i", E, p[..., :2])
    return np.concatenate([xy, -p[..., 2:]], axis=-1)


def left_frame_at(p, A) -> np.ndarray:
    """Left-invariant frame at p as a 3x3 matrix whose columns are E1, E2, E3
    expanded in the coordinate basis.  Depends only on p[...,2]."""
    p = np.asarray(p, dtype=float)
    E = exp_zA(A, p[..., 2])
    out = np.zeros(p.shape[:-1] + (3, 3))
    out[..., :2, :2] = E
    out[..., 2, 2] = 1.0
    return out


def right_frame_at(p, A) -> np.ndarray:
    """Right-invariant frame at p (columns F1 = dx1, F2 = dx2, F3)."""
    A = as_matrix2(A)
    p = np.asarray(p, dtype=float)
    out = np.zeros(p.shape[:-1] + (3, 3))
    out[..., 0, 0] = 1.0
    out[..., 1, 1] = 1.0
    out[..., 0, 2] = A.a * p[..., 0] + A.b * p[..., 1]
    out[..., 1, 2] = A.c * p[..., 0] + A.d * p[..., 1]
    out[..., 2, 2] = 1.0
    return out


def metric_blocks(A, x3) -> np.ndarray:
    """Upper 2x2 block (e^{-x3 A})^T e^{-x3 A} of the metric; x3 may be an array."""
    En = exp_zA(A, -np.asarray(x3, dtype=float))
    e11, e12 = En[..., 0, 0], En[..., 0, 1]
    e21, e22 = En[..., 1, 0], En[..., 1, 1]
    g = np.empty_like(En)
    g[..., 0, 0] = e11 * e11 + e21 * e21
    g[..., 0, 1] = e11 * e12 + e21 * e22
    g[..., 1, 0] = g[..., 0, 1]
    g[..., 1, 1] = e12 * e12 + e22 * e22
    return g


def metric_at(p, A) -> np.ndarray:
    """Coordinate metric tensor at p: block(metric_blocks, 1), g13 = g23 = 0."""
    p = np.asarray(p, dtype=float)
    g2 = metric_blocks(A, p[..., 2])
    g = np.zeros(p.shape[:-1] + (3, 3))
    g[..., :2, :2] = g2
    g[..., 2, 2] = 1.0
    return g


def coord_to_frame(w, p, A) -> np.ndarray:
    """Components of a coordinate vector w in the orthonormal frame at p."""
    w = np.asarray(w, dtype=float)
    p = np.asarray(p, dtype=float)
    En = exp_zA(A, -p[..., 2])
    v12 = np.einsum("...ij,...j->...i", En, w[..., :2])
    return np.concatenate([v12, w[..., 2:]], axis=-1)


def frame_to_coord(v, p, A) -> np.ndarray:
    """Coordinate components of a frame vector v at p (inverse of coord_to_frame)."""
    v = np.asarray(v, dtype=float)
    p = np.asarray(p, dtype=float)
    E = exp_zA(A, p[..., 2])
    w12 = np.einsum("...ij,...j->...i", E, v[..., :2])
    return np.concatenate([w12, v[..., 2:]], axis=-1)


def left_translation_differential(g, A) -> np.ndarray:
    """Differential of the left translation q -> g*q: block(e^{g3 A}, 1).

    Constant in q, so it maps coordinate vectors at p to coordinate vectors
    at g*p.
    """
    g = np.asarray(g, dtype=float)
    E = exp_zA(A, g[..., 2])
    out = np.zeros(g.shape[:-1] + (3, 3))
    out[..., :2, :2] = E
    out[..., 2, 2] = 1.0
    return out


def rotation_isometry(p) -> np.ndarray:
    """The isometry (x1, x2, x3) -> (-x1, -x2, x3).

    Exposed as a utility; no claim is made about the full isometry group of
    a particular A.
    """
    p = np.asarray(p, dtype=float)
    return p * np.array([-1.0, -1.0, 1.0])
