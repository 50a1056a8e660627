#!/usr/bin/env python3
"""Tour of the group layer: the matrix A, its exponential, frames, metric.

Three groups are compared: the Heisenberg group Nil3, hyperbolic space
(A = identity), and a generic non-unimodular example.  Everything the
metric knows is encoded in e^{x3 A}.
"""

import numpy as np

from semidirect import (
    Matrix2,
    exp_zA,
    group_constants,
    left_frame_at,
    left_translation_differential,
    metric_at,
    multiply,
    right_frame_at,
)
from semidirect.lemma import c1_constant

np.set_printoptions(precision=5, suppress=True)

examples = {
    "Nil3 (Heisenberg)": Matrix2.nil3(),
    "hyperbolic space": Matrix2.hyperbolic3(),
    "generic non-unimodular": Matrix2(1.2, 0.7, -0.3, 0.4),
}

for name, A in examples.items():
    consts = group_constants(A)
    print(f"== {name}: A = {A.mat.tolist()}")
    print(f"   trace = {consts.trace:g}, H0 = {consts.h0:g}, "
          f"unimodular = {consts.unimodular}, C1(H=H0) = {c1_constant(A, consts.h0):g}")

    # the exponential picks its branch from the discriminant of A
    print(f"   e^(0.5 A) =\n{exp_zA(A, 0.5)}")

    p = np.array([0.3, -0.4, 0.8])
    frame = left_frame_at(p, A)
    g = metric_at(p, A)
    print(f"   frame columns at {p} (E1, E2, E3):\n{frame}")
    print(f"   orthonormality residual: {np.abs(frame.T @ g @ frame - np.eye(3)).max():.2e}")

    # left translations are isometries: push a vector forward and re-measure
    g_el = np.array([0.5, 1.0, -0.7])
    u = np.array([0.2, -1.1, 0.4])
    dl = left_translation_differential(g_el, A)
    before = u @ metric_at(p, A) @ u
    after = (dl @ u) @ metric_at(multiply(g_el, p, A), A) @ (dl @ u)
    print(f"   |u|^2 before/after translation: {before:.6f} / {after:.6f}")

    # the right-invariant frame commutes with left translations instead
    print(f"   F3 at (1, 1, 0): {right_frame_at(np.array([1.0, 1.0, 0.0]), A)[:, 2]}")
    print()
