#!/usr/bin/env python3
"""Geodesics and curvature probes.

Integrates unit-speed geodesics with RK4 in frame components (the
connection coefficients are constants there), checks energy conservation,
and samples sectional curvatures, including the family A = I + b*J whose
canonical metric is hyperbolic space for every b.
"""

import numpy as np

from semidirect import Matrix2, geodesic_integrate, sectional_curvature
from semidirect.geometry import frame_connection

np.set_printoptions(precision=5, suppress=True)

NIL = Matrix2.nil3()

print("connection table of Nil3 (D_Ei Ej = sum_k Gamma[i,j,k] Ek):")
print(frame_connection(NIL))

print("\ngeodesic spray in Nil3 from the origin:")
for v0 in ([1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [1.0, 1.0, 0.5]):
    path = geodesic_integrate(np.zeros(3), v0, length=4.0, steps=2000, A=NIL)
    drift = np.abs(path.speeds() - 1.0).max()
    print(f"  v0 = {v0}: endpoint {path.points[-1]}, speed drift {drift:.2e}")

print("\nvertical lines are geodesics for every A:")
path = geodesic_integrate(np.zeros(3), [0.0, 0.0, 1.0], 2.0, 100, Matrix2(1.1, 0.5, 0.2, 0.9))
print(f"  endpoint after length 2: {path.points[-1]}")

rng = np.random.default_rng(0)
print("\nsectional curvature samples:")
for name, A in (("flat R^3", Matrix2.zero()),
                ("H3", Matrix2.hyperbolic3()),
                ("I + 0.5 J (isometric to H3)", Matrix2(1.0, 0.5, -0.5, 1.0)),
                ("Nil3", NIL),
                ("generic", Matrix2(1.2, 0.7, -0.3, 0.4))):
    ks = [sectional_curvature(A, rng.normal(size=3), rng.normal(size=3)) for _ in range(5)]
    print(f"  {name:30s} K = {np.round(ks, 5)}")
