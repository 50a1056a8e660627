#!/usr/bin/env python3
"""The subharmonicity estimate for phi = 1/x3, numerically.

On an H-surface with |H| <= H0 = trace(A)/2 lying in 0 < x3 <= C1, the
four-term decomposition of x3^3 phi_{z zbar} dominates
(2 - x3(|H| + |a-d|/2 + |b+c|/2)) |A3|^2.  We fuzz the bound over random
isotropic jets, watch it degenerate just above C1, and run the discrete
verifier on a catenoid patch (flat space: C1 is infinite).
"""

import numpy as np

from semidirect import Matrix2
from semidirect.lemma import (
    LemmaConfig,
    c1_constant,
    fuzz_lower_bound,
    isotropic_triples,
    lower_bound_arrays,
    verify_subharmonic_on_mesh,
)

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "tests"))
from shapes import catenoid_mesh  # noqa: E402

print("C1 thresholds:")
for name, A, h_val in (("Nil3, H = 0", Matrix2.nil3(), 0.0),
                       ("H3, H = 1", Matrix2.hyperbolic3(), 1.0),
                       ("flat R^3, H = 0", Matrix2.zero(), 0.0)):
    print(f"  {name:18s} C1 = {c1_constant(A, h_val):g}")

print("\nfuzzing the lower bound (jet normals), 1e5 samples each:")
for name, A, h_val in (("Nil3", Matrix2.nil3(), 0.0),
                       ("H3", Matrix2.hyperbolic3(), 1.0),
                       ("generic", Matrix2(1.1, 0.6, -0.2, 0.5), 0.4)):
    res = fuzz_lower_bound(A, h_val, samples=100_000, seed=42)
    print(f"  {name:8s} min total = {res['min_total']:+.4e}, "
          f"min margin = {res['min_margin']:+.4e}, violations = {res['violations']}")

print("\nsharpness: just above C1 the bound itself goes negative:")
cfg = LemmaConfig(A=Matrix2.nil3(), H=0.0)
rng = np.random.default_rng(1)
a1, a2, a3 = isotropic_triples(rng, 10_000)
for factor in (0.99, 1.0, 1.01):
    lb = lower_bound_arrays(a3, factor * cfg.c1, cfg.H, cfg.A)
    print(f"  x3 = {factor:.2f} C1: min lower bound = {lb.min():+.3e}")

print("\ndiscrete verifier on a catenoid patch (minimal surface in x3 > 0):")
mesh = catenoid_mesh(96, 32)
rep = verify_subharmonic_on_mesh(mesh, LemmaConfig(A=Matrix2.zero(), H=0.0), K=10.0)
print(f"  interior vertices: {rep.n_interior}, mean edge: {rep.mean_edge_length:.3f}")
print(f"  min Delta(1/x3) = {rep.min_laplacian:+.4e} vs threshold {rep.threshold:+.4e}"
      f" -> passed = {rep.passed}; fraction below zero = {rep.violating_fraction:.3f}")
