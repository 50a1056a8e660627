"""Conformal first-order jets of immersed surfaces.

A conformal immersion f with conformal coordinate z = u + i v has

    f_z = A1 E1 + A2 E2 + A3 E3,        A1^2 + A2^2 + A3^2 = 0,

with complex frame components A1, A2, A3 and A3 = (x3)_z.  The jet stores
these together with a unit normal N and the conformal factor
lam = |A1|^2 + |A2|^2 + |A3|^2 (the induced metric is 2*lam*|dz|^2).

The z-bar derivative of A3 has the closed form

    A3_zbar = -a|A1|^2 - d|A2|^2 - (b+c)/2 (A1 conj(A2) + conj(A1) A2)
              + H N3 (|A1|^2 + |A2|^2 + |A3|^2),

where H is the mean curvature and N3 = <N, E3>; the last term is
<D_{f_zbar} f_z, E3> and the identity holds pointwise for every conformal
immersion, CMC or not.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import frame_connection
from .group import as_matrix2, coord_to_frame

__all__ = [
    "ConformalJet",
    "DegenerateJetError",
    "conformal_defect",
    "jet_normal",
    "a3_zbar_rhs",
    "mean_curvature_from_jet",
    "jet_from_first_derivatives",
    "isotropic_normal_component",
]


class DegenerateJetError(ValueError):
    """Conformal factor too small to define curvature data."""


def conformal_defect(a1, a2, a3):
    """|A1^2 + A2^2 + A3^2|: zero exactly for conformal (isotropic) jets."""
    a1 = np.asarray(a1, dtype=complex)
    a2 = np.asarray(a2, dtype=complex)
    a3 = np.asarray(a3, dtype=complex)
    d = np.abs(a1 * a1 + a2 * a2 + a3 * a3)
    return float(d) if d.ndim == 0 else d


def jet_normal(a1, a2, a3):
    """Unit normal -i (A x conj(A)) / lam of an isotropic triple.

    Returned in frame components with shape (..., 3); requires lam > 0.
    """
    a = np.stack(np.broadcast_arrays(
        np.asarray(a1, dtype=complex),
        np.asarray(a2, dtype=complex),
        np.asarray(a3, dtype=complex)), axis=-1)
    lam = np.sum(np.abs(a) ** 2, axis=-1)
    cross = np.cross(a, np.conj(a))
    n = np.real(-1j * cross) / lam[..., None]
    return n


def isotropic_normal_component(a1, a2, a3):
    """N3 = 2 Im(A1 conj(A2)) / lam, the E3-component of the jet normal."""
    a1 = np.asarray(a1, dtype=complex)
    a2 = np.asarray(a2, dtype=complex)
    a3 = np.asarray(a3, dtype=complex)
    lam = np.abs(a1) ** 2 + np.abs(a2) ** 2 + np.abs(a3) ** 2
    return 2.0 * np.imag(a1 * np.conj(a2)) / lam


@dataclass
class ConformalJet:
    """First-order data of a conformal immersion at one point.

    The normal is stored, not derived, so nearly-degenerate jets remain
    representable; ``validate`` checks consistency.
    """

    point: np.ndarray
    a1: complex
    a2: complex
    a3: complex
    normal: np.ndarray
    lam: float = field(default=0.0)

    def __post_init__(self):
        self.point = np.asarray(self.point, dtype=float)
        self.normal = np.asarray(self.normal, dtype=float)
        if not self.lam:
            self.lam = float(abs(self.a1) ** 2 + abs(self.a2) ** 2 + abs(self.a3) ** 2)

    @property
    def n3(self) -> float:
        return float(self.normal[2])

    def f_z(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3], dtype=complex)

    def validate(self, tol_conformal: float = 1e-10) -> None:
        """Check isotropy, unit normal, normal-tangent orthogonality, lam > 0."""
        if not self.lam > 0:
            raise ValueError("conformal factor must be positive")
        defect = conformal_defect(self.a1, self.a2, self.a3)
        if defect > tol_conformal:
            raise ValueError(f"conformality defect {defect:.3g} > {tol_conformal:.3g}")
        if abs(np.linalg.norm(self.normal) - 1.0) > 1e-12:
            raise ValueError("normal is not unit length")
        fz = self.f_z()
        for tangent in (np.real(fz), np.imag(fz)):
            if abs(float(tangent @ self.normal)) > 1e-10 * max(1.0, np.linalg.norm(tangent)):
                raise ValueError("normal not orthogonal to the tangent plane")
        stored = abs(self.a1) ** 2 + abs(self.a2) ** 2 + abs(self.a3) ** 2
        if abs(stored - self.lam) > 1e-10 * max(1.0, stored):
            raise ValueError("stored conformal factor inconsistent with components")


def a3_zbar_rhs(jet: ConformalJet, H: float, A):
    """Closed form for A3_zbar of an H-surface at the jet's point."""
    A = as_matrix2(A)
    m1 = abs(jet.a1) ** 2
    m2 = abs(jet.a2) ** 2
    cross = jet.a1 * np.conj(jet.a2) + np.conj(jet.a1) * jet.a2
    lam = m1 + m2 + abs(jet.a3) ** 2
    return complex(-A.a * m1 - A.d * m2 - 0.5 * (A.b + A.c) * cross + H * jet.n3 * lam)


def mean_curvature_from_jet(jet: ConformalJet, dA_dzbar, A) -> float:
    """Mean curvature H = <D_{f_zbar} f_z, N> / lam extracted from a jet.

    ``dA_dzbar`` holds the plain z-bar derivatives of the three frame
    components; the connection correction sum conj(A_i) A_j D_{Ei}Ej is added
    here.  For a genuine conformal immersion the resulting vector is real and
    parallel to N.
    """
    lam = jet.lam
    if lam < 1e-14:
        raise DegenerateJetError(f"conformal factor {lam:.3g} < 1e-14")
    gam = frame_connection(A)
    fz = jet.f_z()
    correction = np.einsum("i,j,ijk->k", np.conj(fz), fz, gam)
    v = np.asarray(dA_dzbar, dtype=complex) + correction
    return float(np.real(v @ jet.normal)) / lam


def jet_from_first_derivatives(point, f_u, f_v, A, normal=None) -> ConformalJet:
    """Build a jet from coordinate partials f_u, f_v of a parameterization.

    Converts to frame components, forms f_z = (f_u - i f_v)/2, and derives
    the normal from the isotropy cross-product formula unless one is given.
    """
    point = np.asarray(point, dtype=float)
    fu = coord_to_frame(np.asarray(f_u, dtype=float), point, A)
    fv = coord_to_frame(np.asarray(f_v, dtype=float), point, A)
    fz = 0.5 * (fu - 1j * fv)
    a1, a2, a3 = (complex(fz[k]) for k in range(3))
    if normal is None:
        normal = jet_normal(a1, a2, a3)
    return ConformalJet(point=point, a1=a1, a2=a2, a3=a3, normal=np.asarray(normal, dtype=float))
