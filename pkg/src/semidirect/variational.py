"""Barrier experiment: minimize T = Area + 2 H0 Volume in a slab.

An annular mesh spans two boundary circles {x1^2 + x2^2 = R^2, x3 = delta}
inside the slab 0 <= x3 <= eps.  Projected gradient descent with Armijo
backtracking moves interior vertex heights only (the mesh stays a graph
over a fixed polar grid), clamping them to the slab after every step;
boundary vertices never move.  Stationary points are H0-surfaces: leaves
x3 = const are exactly stationary for this discretization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .group import Matrix2, as_matrix2
from .lemma import c1_constant
from .mesh import (
    TriMesh,
    mesh_area,
    mesh_area_gradient,
    mesh_volume_below,
    mesh_volume_gradient,
    discrete_mean_curvature,
    vertex_masses,
)

__all__ = [
    "SlabConfig",
    "BoundaryCircles",
    "MinimizeReport",
    "FlatnessGrowthReport",
    "LineSearchError",
    "make_annulus_mesh",
    "functional_T",
    "grad_T",
    "minimize",
    "flatness",
    "flatness_and_growth_report",
]


class LineSearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class SlabConfig:
    """Slab 0 <= x3 <= eps together with the group matrix."""

    eps: float
    A: Matrix2

    def __post_init__(self):
        object.__setattr__(self, "A", as_matrix2(self.A))
        object.__setattr__(self, "eps", float(self.eps))
        if not self.eps > 0.0:
            raise ValueError("slab height eps must be positive")

    @property
    def h0(self) -> float:
        return self.A.h0

    @property
    def lemma_compatible(self) -> bool:
        """eps < C1/2, the regime needed to couple with the subharmonicity lemma."""
        return self.eps < 0.5 * c1_constant(self.A, self.h0)


@dataclass(frozen=True)
class BoundaryCircles:
    """Inner and outer boundary circles (radius, height), discretized with
    n_seg segments each."""

    r_in: float
    h_in: float
    r_out: float
    h_out: float
    n_seg: int

    def __post_init__(self):
        if not (self.r_in > 0 and self.r_out > 0):
            raise ValueError("circle radii must be positive")
        if self.n_seg < 8:
            raise ValueError("n_seg must be >= 8")

    def check_heights(self, eps: float) -> None:
        for h in (self.h_in, self.h_out):
            if not (0.0 <= h <= eps):
                raise ValueError(f"boundary height {h:g} outside the slab [0, {eps:g}]")


def make_annulus_mesh(circles: BoundaryCircles, rings: int) -> TriMesh:
    """Structured annulus between the two circles, heights interpolated
    linearly in the radial coordinate; boundary vertices are pinned by
    construction (they are the mesh boundary)."""
    if rings < 1:
        raise ValueError("rings must be >= 1")
    if circles.r_in >= circles.r_out:
        raise ValueError(f"overlapping radii: R_in = {circles.r_in:g} >= R_out = {circles.r_out:g}")
    n = circles.n_seg
    t = np.linspace(0.0, 1.0, rings + 1)
    radii = circles.r_in + t * (circles.r_out - circles.r_in)
    heights = circles.h_in + t * (circles.h_out - circles.h_in)
    theta = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    verts = np.empty(((rings + 1) * n, 3))
    for i in range(rings + 1):
        sl = slice(i * n, (i + 1) * n)
        verts[sl, 0] = radii[i] * np.cos(theta)
        verts[sl, 1] = radii[i] * np.sin(theta)
        verts[sl, 2] = heights[i]
    faces = []
    for i in range(rings):
        for j in range(n):
            a = i * n + j
            b = i * n + (j + 1) % n
            c = (i + 1) * n + (j + 1) % n
            d = (i + 1) * n + j
            # oriented so the projected signed area is positive (upward normal)
            faces.append((a, d, c))
            faces.append((a, c, b))
    return TriMesh(verts, np.array(faces, dtype=np.int64))


def functional_T(mesh, cfg: SlabConfig) -> float:
    """T = Area + 2 H0 Volume (volume between the mesh and the leaf x3 = 0)."""
    return mesh_area(mesh, cfg.A) + 2.0 * cfg.h0 * mesh_volume_below(mesh, cfg.A)


def grad_T(mesh, cfg: SlabConfig) -> np.ndarray:
    """Analytic coordinate gradient of functional_T at every vertex."""
    return mesh_area_gradient(mesh, cfg.A) + 2.0 * cfg.h0 * mesh_volume_gradient(mesh, cfg.A)


@dataclass(frozen=True)
class MinimizeReport:
    t_value: float
    area: float
    volume: float
    grad_sup: float
    h_mean: float
    h_max_dev: float
    flatness: float
    iterations: int
    converged: bool
    tol_grad: float
    step_final: float
    area_vs_r: tuple = field(default=())


def flatness(mesh: TriMesh, probe_radius: float, target_height: float) -> float:
    """max |x3 - target| over interior vertices with x1^2 + x2^2 <= probe^2."""
    r2 = mesh.vertices[:, 0] ** 2 + mesh.vertices[:, 1] ** 2
    sel = (r2 <= probe_radius ** 2) & mesh.interior_mask
    if not np.any(sel):
        raise ValueError(f"no interior vertices inside probe radius {probe_radius:g}")
    return float(np.max(np.abs(mesh.vertices[sel, 2] - target_height)))


def _projected_gradient(gz, mass, z, eps, interior):
    pg = np.zeros_like(gz)
    pg[interior] = gz[interior] / mass[interior]
    at_bottom = (z <= 0.0) & (pg > 0.0)
    at_top = (z >= eps) & (pg < 0.0)
    pg[at_bottom | at_top] = 0.0
    return pg


def minimize(mesh: TriMesh, cfg: SlabConfig, tol_grad: float | None = None,
             max_iter: int = 20000, probe_radius: float | None = None,
             probe_height: float | None = None, log=None) -> tuple[TriMesh, MinimizeReport]:
    """Projected gradient descent on interior vertex heights.

    The descent direction is the height component of grad_T divided by the
    barycentric vertex mass (so the step is resolution-independent); after
    each trial the heights are clamped to [0, eps].  Armijo backtracking
    (shrink 0.5, slope fraction 1e-4) guarantees T is non-increasing across
    accepted steps, which is asserted.  Terminates when the sup norm of the
    mass-normalized projected gradient drops below tol_grad (default
    1e-6 * initial T) or after max_iter iterations.

    ``log`` may be a callable receiving (iteration, T, grad_sup, flatness).
    """
    V = mesh.vertices.copy()
    F = mesh.faces
    interior = mesh.interior_mask
    eps = cfg.eps
    if V[:, 2].min() < -1e-12 or V[:, 2].max() > eps + 1e-12:
        raise ValueError("initial mesh leaves the slab")
    if probe_radius is None:
        r2 = V[:, 0] ** 2 + V[:, 1] ** 2
        probe_radius = 2.0 * math.sqrt(r2.min())
    if probe_height is None:
        probe_height = eps

    def evaluate(verts):
        area = mesh_area((verts, F), cfg.A)
        vol = mesh_volume_below((verts, F), cfg.A)
        return area, vol, area + 2.0 * cfg.h0 * vol

    def gradient(verts):
        g = mesh_area_gradient((verts, F), cfg.A) + 2.0 * cfg.h0 * mesh_volume_gradient((verts, F), cfg.A)
        return g[:, 2]

    area, vol, t_val = evaluate(V)
    if tol_grad is None:
        tol_grad = 1e-6 * t_val
    gz = gradient(V)
    mass = vertex_masses((V, F), cfg.A)
    pg = _projected_gradient(gz, mass, V[:, 2], eps, interior)
    sup = float(np.max(np.abs(pg)))

    step = 1.0
    iterations = 0
    probe_cache = None

    def probe_flatness(verts):
        nonlocal probe_cache
        if probe_cache is None:
            r2 = verts[:, 0] ** 2 + verts[:, 1] ** 2
            probe_cache = (r2 <= probe_radius ** 2) & interior
            if not np.any(probe_cache):
                raise ValueError(f"no interior vertices inside probe radius {probe_radius:g}")
        return float(np.max(np.abs(verts[probe_cache, 2] - probe_height)))

    if log is not None:
        log(0, t_val, sup, probe_flatness(V))

    while sup > tol_grad and iterations < max_iter:
        direction = pg
        accepted = False
        for _ in range(50):
            z_new = V[:, 2].copy()
            z_new[interior] = np.clip(V[interior, 2] - step * direction[interior], 0.0, eps)
            predicted = float(gz @ (V[:, 2] - z_new))
            if predicted <= 0.0:
                break
            V_new = V.copy()
            V_new[:, 2] = z_new
            area_new, vol_new, t_new = evaluate(V_new)
            if t_new <= t_val - 1e-4 * predicted:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            if predicted <= 0.0:
                break  # clamp leaves no feasible descent: converged on the boundary
            raise LineSearchError(
                f"line search failed 50 times at iteration {iterations} "
                f"(T = {t_val:.6g}, step = {step:.3g}, predicted = {predicted:.3g})")
        assert t_new <= t_val + 1e-12, "energy increased on an accepted step"
        V, area, vol, t_val = V_new, area_new, vol_new, t_new
        gz = gradient(V)
        mass = vertex_masses((V, F), cfg.A)
        pg = _projected_gradient(gz, mass, V[:, 2], eps, interior)
        sup = float(np.max(np.abs(pg)))
        step = min(step * 2.0, 1.0e3)
        iterations += 1
        if log is not None:
            log(iterations, t_val, sup, probe_flatness(V))

    out = TriMesh(V, F)
    h_disc, _ = discrete_mean_curvature(out, cfg.A)
    h_int = h_disc[interior]
    report = MinimizeReport(
        t_value=t_val,
        area=area,
        volume=vol,
        grad_sup=sup,
        h_mean=float(np.mean(h_int)),
        h_max_dev=float(np.max(np.abs(h_int - cfg.h0))),
        flatness=probe_flatness(V),
        iterations=iterations,
        converged=bool(sup <= tol_grad),
        tol_grad=float(tol_grad),
        step_final=float(step),
    )
    return out, report


@dataclass(frozen=True)
class FlatnessGrowthReport:
    radii: tuple
    flatness_values: tuple
    areas: tuple
    c_fit: float
    fit_residual: float
    flatness_monotone: bool
    area_ratio_band: float


def flatness_and_growth_report(runs, cfg: SlabConfig, probe_radius: float,
                               target_height: float | None = None) -> FlatnessGrowthReport:
    """Aggregate a series of minimized annuli over increasing outer radii R.

    ``runs`` is a sequence of (R, TriMesh) sorted by R (at least three).
    Reports per-R flatness over the probe disk, the least-squares fit of
    Area(R) against R^2, whether flatness is non-increasing within 10%
    noise, and the spread of Area(R)/R^2 across the series.
    """
    if len(runs) < 3:
        raise ValueError("need at least 3 radii for the growth report")
    if target_height is None:
        target_height = cfg.eps
    radii = [float(r) for r, _ in runs]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    flats = [flatness(m, probe_radius, target_height) for _, m in runs]
    areas = [mesh_area(m, cfg.A) for _, m in runs]
    r2 = np.asarray(radii) ** 2
    a = np.asarray(areas)
    c_fit = float((r2 @ a) / (r2 @ r2))
    residual = float(np.max(np.abs(a - c_fit * r2)) / np.max(a))
    monotone = all(f2 <= f1 * 1.10 for f1, f2 in zip(flats, flats[1:]))
    ratios = a / r2
    band = float(ratios.max() / ratios.min())
    return FlatnessGrowthReport(
        radii=tuple(radii),
        flatness_values=tuple(flats),
        areas=tuple(areas),
        c_fit=c_fit,
        fit_residual=residual,
        flatness_monotone=bool(monotone),
        area_ratio_band=band,
    )
