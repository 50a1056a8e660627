"""Numerical geometry of the metric Lie groups R^2 x|_A R.

The group law, invariant frames, canonical left-invariant metric and
Levi-Civita connection are implemented in closed form from the defining
2x2 matrix A; on top of them sit geodesic integration, conformal-jet
identities with the subharmonicity estimate for 1/x3, and a variational
harness that minimizes Area + 2 H0 Volume over annular meshes in a slab.
"""

from .group import (
    Matrix2,
    GroupConstants,
    as_matrix2,
    exp_zA,
    multiply,
    inverse,
    identity_point,
    left_frame_at,
    right_frame_at,
    metric_at,
    coord_to_frame,
    frame_to_coord,
    group_constants,
    left_translation_differential,
    rotation_isometry,
)
from .geometry import (
    Path,
    frame_connection,
    frame_connection_coords,
    christoffel_coords,
    covariant_derivative,
    sectional_curvature,
    geodesic_integrate,
)
from .jets import (
    ConformalJet,
    conformal_defect,
    jet_normal,
    a3_zbar_rhs,
    mean_curvature_from_jet,
    jet_from_first_derivatives,
)
from .mesh import (
    TriMesh,
    grid_mesh,
    mesh_area,
    mesh_volume_below,
    laplace_beltrami,
    discrete_mean_curvature,
    left_translate_mesh,
    save_obj,
    load_obj,
    save_scalar_field,
    load_scalar_field,
)
from .lemma import (
    LemmaConfig,
    LemmaBreakdown,
    c1_constant,
    lemma_breakdown,
    lower_bound,
    isotropic_triples,
    fuzz_lower_bound,
    verify_subharmonic_on_mesh,
)
from .variational import (
    SlabConfig,
    BoundaryCircles,
    MinimizeReport,
    make_annulus_mesh,
    functional_T,
    grad_T,
    minimize,
    flatness_and_growth_report,
)

__version__ = "0.1.0"
