"""Machine checks of the subharmonicity estimate for phi = 1/x3.

On an H-surface with |H| <= H0 = trace(A)/2 contained in 0 < x3 <= C1,
where

    C1 = 2 / (|H| + |a - d|/2 + |b + c|/2),

the function phi = 1/x3 is subharmonic.  The quantity x3^3 * phi_{z zbar}
decomposes into four terms,

    term1 = (2 - H N3 x3) |A3|^2
    term2 = x3 ((a + d)/2 - H N3) (|A1|^2 + |A2|^2)
    term3 = x3 (a - d)/2 (|A1|^2 - |A2|^2)
    term4 = x3 (b + c)/2 (A1 conj(A2) + conj(A1) A2),

and is bounded below by (2 - x3 (|H| + |a-d|/2 + |b+c|/2)) |A3|^2 via the
isotropy inequalities |A3|^4 >= (|A1|^2 - |A2|^2)^2 and
|A3|^4 >= (A1 conj(A2) + conj(A1) A2)^2.

This module evaluates the decomposition on single jets and on fuzzed batches
of synthetic isotropic triples, and runs a discrete verifier that tests
Delta_Sigma(1/x3) >= -K*h on CMC-certified meshes (the conformal statement
phi_{z zbar} >= 0 and the coordinate-free one differ by a positive factor,
so the signs agree; a discrete check can only certify it up to O(h)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .group import Matrix2, as_matrix2
from .jets import ConformalJet, isotropic_normal_component
from .mesh import TriMesh, discrete_mean_curvature, laplace_beltrami, metric_edge_lengths

__all__ = [
    "LemmaConfig",
    "LemmaBreakdown",
    "SubharmonicReport",
    "c1_constant",
    "lemma_breakdown",
    "breakdown_terms",
    "lower_bound",
    "lower_bound_arrays",
    "isotropic_triples",
    "fuzz_lower_bound",
    "verify_subharmonic_on_mesh",
]

_CMC_CERTIFICATE_TOL = 0.05


@dataclass(frozen=True)
class LemmaConfig:
    """Matrix A and target mean curvature H; |H| <= trace(A)/2 is the
    hypothesis regime, runs outside it are allowed but flagged."""

    A: Matrix2
    H: float
    tol_conformal: float = 1e-10

    def __post_init__(self):
        object.__setattr__(self, "A", as_matrix2(self.A))
        object.__setattr__(self, "H", float(self.H))

    @property
    def in_regime(self) -> bool:
        return abs(self.H) <= self.A.h0 + 1e-12

    @property
    def c1(self) -> float:
        return c1_constant(self.A, self.H)


def c1_constant(A, H: float) -> float:
    """Height threshold C1 = 2/(|H| + |a-d|/2 + |b+c|/2); +inf when the
    denominator vanishes (then the bound holds for all x3 > 0)."""
    A = as_matrix2(A)
    denom = abs(H) + 0.5 * abs(A.a - A.d) + 0.5 * abs(A.b + A.c)
    if denom == 0.0:
        return math.inf
    return 2.0 / denom


@dataclass(frozen=True)
class LemmaBreakdown:
    term1: float
    term2: float
    term3: float
    term4: float
    total: float = field(default=math.nan)

    def __post_init__(self):
        if math.isnan(self.total):
            object.__setattr__(self, "total", self.term1 + self.term2 + self.term3 + self.term4)


def breakdown_terms(a1, a2, a3, n3, x3, H: float, A):
    """Vectorized four-term decomposition of x3^3 * phi_{z zbar}.

    Returns (term1, term2, term3, term4); inputs broadcast.
    """
    A = as_matrix2(A)
    a1 = np.asarray(a1, dtype=complex)
    a2 = np.asarray(a2, dtype=complex)
    a3 = np.asarray(a3, dtype=complex)
    n3 = np.asarray(n3, dtype=float)
    x3 = np.asarray(x3, dtype=float)
    m1 = np.abs(a1) ** 2
    m2 = np.abs(a2) ** 2
    m3 = np.abs(a3) ** 2
    cross = 2.0 * np.real(a1 * np.conj(a2))
    term1 = (2.0 - H * n3 * x3) * m3
    term2 = x3 * (0.5 * (A.a + A.d) - H * n3) * (m1 + m2)
    term3 = x3 * 0.5 * (A.a - A.d) * (m1 - m2)
    term4 = x3 * 0.5 * (A.b + A.c) * cross
    return term1, term2, term3, term4


def lemma_breakdown(jet: ConformalJet, cfg: LemmaConfig) -> LemmaBreakdown:
    """Evaluate the four displayed terms at a jet; requires x3 > 0 and a
    conformality defect within the configured tolerance."""
    x3 = float(jet.point[2])
    if not x3 > 0.0:
        raise ValueError(f"jet height x3 = {x3:g} must be positive")
    jet.validate(tol_conformal=cfg.tol_conformal)
    t1, t2, t3, t4 = breakdown_terms(jet.a1, jet.a2, jet.a3, jet.n3, x3, cfg.H, cfg.A)
    return LemmaBreakdown(float(t1), float(t2), float(t3), float(t4))


def lower_bound_arrays(a3, x3, H: float, A):
    """(2 - x3 (|H| + |a-d|/2 + |b+c|/2)) |A3|^2, vectorized."""
    A = as_matrix2(A)
    denom = abs(H) + 0.5 * abs(A.a - A.d) + 0.5 * abs(A.b + A.c)
    m3 = np.abs(np.asarray(a3, dtype=complex)) ** 2
    return (2.0 - np.asarray(x3, dtype=float) * denom) * m3


def lower_bound(jet: ConformalJet, cfg: LemmaConfig) -> float:
    x3 = float(jet.point[2])
    if not x3 > 0.0:
        raise ValueError(f"jet height x3 = {x3:g} must be positive")
    return float(lower_bound_arrays(jet.a3, x3, cfg.H, cfg.A))


def isotropic_triples(rng: np.random.Generator, n: int):
    """Synthetic isotropic triples: random complex A1, A2 and
    A3 = +-i sqrt(A1^2 + A2^2) (principal branch, both signs exercised)."""
    a1 = rng.normal(size=n) + 1j * rng.normal(size=n)
    a2 = rng.normal(size=n) + 1j * rng.normal(size=n)
    sign = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    a3 = sign * 1j * np.sqrt(a1 * a1 + a2 * a2)
    return a1, a2, a3


def fuzz_lower_bound(A, H: float, samples: int, seed: int, batch: int = 100_000,
                     adversarial_n3: bool = False) -> dict:
    """Fuzz the decomposition against its lower bound over in-regime jets.

    Draws isotropic triples, heights x3 in (0, C1] (or (0, 4] when C1 is
    infinite), and N3 from the jet normal (or swept over {-1, 0, 1} in
    adversarial mode).  Batches use consecutive seeds and merge in seed
    order, so the result is reproducible for a given (seed, samples).
    """
    A = as_matrix2(A)
    c1 = c1_constant(A, H)
    x3_cap = min(c1, 4.0)
    min_total = math.inf
    min_margin = math.inf
    violations = 0
    done = 0
    index = 0
    while done < samples:
        take = min(batch, samples - done)
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))
        a1, a2, a3 = isotropic_triples(rng, take)
        x3 = rng.uniform(0.0, x3_cap, size=take)
        x3 = np.maximum(x3, 1e-12)
        if adversarial_n3:
            n3 = rng.choice(np.array([-1.0, 0.0, 1.0]), size=take)
        else:
            n3 = isotropic_normal_component(a1, a2, a3)
        t1, t2, t3, t4 = breakdown_terms(a1, a2, a3, n3, x3, H, A)
        total = t1 + t2 + t3 + t4
        lb = lower_bound_arrays(a3, x3, H, A)
        margin = total - lb
        min_total = min(min_total, float(total.min()))
        min_margin = min(min_margin, float(margin.min()))
        violations += int(np.count_nonzero(margin < -1e-9))
        done += take
        index += 1
    return {
        "samples": samples,
        "min_total": min_total,
        "min_margin": min_margin,
        "violations": violations,
        "C1": c1,
    }


@dataclass(frozen=True)
class SubharmonicReport:
    n_interior: int
    mean_edge_length: float
    threshold: float
    min_laplacian: float
    violating_fraction: float
    h_interior_max_dev: float
    passed: bool


def verify_subharmonic_on_mesh(mesh: TriMesh, cfg: LemmaConfig, K: float = 10.0) -> SubharmonicReport:
    """Check Delta_Sigma(1/x3) >= -K*h at interior vertices of a CMC mesh.

    Preconditions: every vertex satisfies 0 < x3 <= C1, and the mesh is
    certified as an H-surface by discrete mean curvature within 0.05 of
    cfg.H on the interior.  h is the mean metric edge length; the fraction
    of interior vertices with a negative discrete Laplacian is reported as
    well (it should vanish under refinement).
    """
    z = mesh.vertices[:, 2]
    if z.min() <= 0.0:
        raise ValueError(f"mesh has vertices at x3 = {z.min():g} <= 0")
    c1 = cfg.c1
    if z.max() > c1 + 1e-12:
        raise ValueError(f"mesh exceeds the C1 height bound: {z.max():g} > {c1:g}")
    h_disc, _ = discrete_mean_curvature(mesh, cfg.A)
    interior = mesh.interior_mask
    dev = float(np.max(np.abs(h_disc[interior] - cfg.H)))
    if dev > _CMC_CERTIFICATE_TOL:
        raise ValueError(
            f"CMC certificate failed: max |H - {cfg.H:g}| = {dev:.3g} > {_CMC_CERTIFICATE_TOL}")
    phi = 1.0 / z
    lap = laplace_beltrami(mesh, phi, cfg.A)
    h_edge = float(np.mean(metric_edge_lengths(mesh, cfg.A)))
    threshold = -K * h_edge
    lap_int = lap[interior]
    min_lap = float(lap_int.min()) if lap_int.size else 0.0
    frac = float(np.mean(lap_int < 0.0)) if lap_int.size else 0.0
    return SubharmonicReport(
        n_interior=int(np.count_nonzero(interior)),
        mean_edge_length=h_edge,
        threshold=threshold,
        min_laplacian=min_lap,
        violating_fraction=frac,
        h_interior_max_dev=dev,
        passed=bool(min_lap >= threshold),
    )
