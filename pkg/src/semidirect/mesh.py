"""Triangle meshes with vertices in group coordinates, measured by the
pulled-back canonical metric.

Faces are flat triangles in coordinates; metric quantities evaluate the
coordinate metric at quadrature points (barycenter by default, the three
edge midpoints as an option).  Per-face accumulations are vectorized and
reduce in a fixed order, so results are bit-stable across runs.

Mesh file format is an OBJ subset: ``v x1 x2 x3`` and ``f i j k`` (1-based)
lines plus ``#`` comments.  Scalar fields are CSV ``vertex_index,value``.
"""

from __future__ import annotations

import numpy as np

from .group import as_matrix2, exp_zA, metric_blocks, multiply

__all__ = [
    "TriMesh",
    "MeshError",
    "DegenerateFaceError",
    "NonGraphMeshError",
    "ZeroMassError",
    "grid_mesh",
    "mesh_area",
    "face_metric_areas",
    "mesh_area_gradient",
    "mesh_volume_below",
    "mesh_volume_gradient",
    "vertex_masses",
    "mixed_voronoi_masses",
    "metric_edge_lengths",
    "laplace_beltrami",
    "discrete_mean_curvature",
    "left_translate_mesh",
    "save_obj",
    "load_obj",
    "save_scalar_field",
    "load_scalar_field",
]

_AREA_FLOOR = 1e-14


class MeshError(ValueError):
    pass


class DegenerateFaceError(MeshError):
    pass


class NonGraphMeshError(MeshError):
    pass


class ZeroMassError(MeshError):
    pass


class TriMesh:
    """Immutable triangulated surface: vertices (n, 3), faces (m, 3).

    Construction checks index validity, manifold edges and consistent
    orientation; boundary vertices are exactly those on an open edge.
    """

    def __init__(self, vertices, faces):
        v = np.ascontiguousarray(np.asarray(vertices, dtype=float))
        f = np.ascontiguousarray(np.asarray(faces, dtype=np.int64))
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshError(f"vertices must be (n, 3), got {v.shape}")
        if f.ndim != 2 or f.shape[1] != 3:
            raise MeshError(f"faces must be (m, 3), got {f.shape}")
        if not np.all(np.isfinite(v)):
            raise MeshError("non-finite vertex coordinates")
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise MeshError("face index out of range")
        if np.any(f[:, 0] == f[:, 1]) or np.any(f[:, 1] == f[:, 2]) or np.any(f[:, 2] == f[:, 0]):
            raise MeshError("face with a repeated vertex")
        self.vertices = v
        self.faces = f
        self._init_edges()

    def _init_edges(self):
        he = self.faces[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
        keyed = he[:, 0] * len(self.vertices) + he[:, 1]
        if len(np.unique(keyed)) != len(keyed):
            raise MeshError("repeated directed edge: mesh not consistently oriented")
        und = np.sort(he, axis=1)
        edges, counts = np.unique(und, axis=0, return_counts=True)
        if counts.max(initial=0) > 2:
            raise MeshError("edge shared by more than two faces")
        self.edges = edges
        open_edges = edges[counts == 1]
        mask = np.zeros(len(self.vertices), dtype=bool)
        mask[open_edges.ravel()] = True
        self.boundary_mask = mask

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def interior_mask(self) -> np.ndarray:
        return ~self.boundary_mask

    def with_vertices(self, vertices) -> "TriMesh":
        return TriMesh(vertices, self.faces)

    def with_heights(self, x3) -> "TriMesh":
        v = self.vertices.copy()
        v[:, 2] = np.asarray(x3, dtype=float)
        return TriMesh(v, self.faces)


def grid_mesh(u, v, position) -> TriMesh:
    """Structured patch over a (u, v) grid; position(u, v) -> (x1, x2, x3).

    ``position`` is evaluated on the meshgrid (broadcasting); quads are split
    into two consistently oriented triangles.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    pts = np.stack(position(uu, vv), axis=-1).reshape(-1, 3)
    nu, nv = len(u), len(v)

    def vid(i, j):
        return i * nv + j

    faces = []
    for i in range(nu - 1):
        for j in range(nv - 1):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            faces.append((a, b, c))
            faces.append((a, c, d))
    return TriMesh(pts, np.array(faces, dtype=np.int64))


# ---------------------------------------------------------------------------
# metric area


def _corners(V, F):
    return V[F[:, 0]], V[F[:, 1]], V[F[:, 2]]


def _scatter_add(out, idx, contrib):
    """Accumulate per-face contributions onto vertices in index order
    (bincount: deterministic, bit-stable across runs)."""
    n = len(out)
    if contrib.ndim == 1:
        out += np.bincount(idx, weights=contrib, minlength=n)
    else:
        for c in range(contrib.shape[1]):
            out[:, c] += np.bincount(idx, weights=contrib[:, c], minlength=n)


def _gram(u, v, g2):
    """<u, v> with the block metric: 2x2 block g2 on (x1, x2), 1 on x3."""
    g11, g12, g22 = g2[..., 0, 0], g2[..., 0, 1], g2[..., 1, 1]
    return (g11 * u[..., 0] * v[..., 0]
            + g12 * (u[..., 0] * v[..., 1] + u[..., 1] * v[..., 0])
            + g22 * u[..., 1] * v[..., 1]
            + u[..., 2] * v[..., 2])


def _face_area_quantities(V, F, A, z):
    p0, p1, p2 = _corners(V, F)
    u = p1 - p0
    w = p2 - p0
    g2 = metric_blocks(A, z)
    e = _gram(u, u, g2)
    f = _gram(u, w, g2)
    g = _gram(w, w, g2)
    q = e * g - f * f
    return u, w, g2, e, f, g, q


def face_metric_areas(mesh_or_arrays, A, quadrature: int = 1, check: bool = True) -> np.ndarray:
    """Metric area of each face via 1-point (barycenter) or 3-point
    (edge-midpoint) quadrature in the height variable."""
    V, F = _as_arrays(mesh_or_arrays)
    if quadrature not in (1, 3):
        raise ValueError("quadrature must be 1 or 3")
    z = V[F, 2]
    if quadrature == 1:
        q = _face_area_quantities(V, F, A, z.mean(axis=1))[-1]
        areas = 0.5 * np.sqrt(np.maximum(q, 0.0))
    else:
        zmid = 0.5 * (z + np.roll(z, -1, axis=1))  # (m, 3) edge midpoints
        acc = np.zeros(len(F))
        for k in range(3):
            q = _face_area_quantities(V, F, A, zmid[:, k])[-1]
            acc += 0.5 * np.sqrt(np.maximum(q, 0.0))
        areas = acc / 3.0
    if check and areas.size and areas.min() <= _AREA_FLOOR:
        bad = int(np.argmin(areas))
        raise DegenerateFaceError(f"face {bad} has metric area {areas[bad]:.3g} <= {_AREA_FLOOR:g}")
    return areas


def mesh_area(mesh, A, quadrature: int = 1) -> float:
    """Total metric area; O(h^2) under refinement for smooth surfaces."""
    return float(np.sum(face_metric_areas(mesh, A, quadrature)))


def _as_arrays(mesh_or_arrays):
    if isinstance(mesh_or_arrays, TriMesh):
        return mesh_or_arrays.vertices, mesh_or_arrays.faces
    V, F = mesh_or_arrays
    return np.asarray(V, dtype=float), np.asarray(F, dtype=np.int64)


def mesh_area_gradient(mesh_or_arrays, A) -> np.ndarray:
    """Analytic gradient of mesh_area (1-point quadrature) in coordinates.

    Chain rule through the edge vectors and the metric evaluated at the face
    barycenter; dG/dz = -(A^T G + G A).
    """
    A = as_matrix2(A)
    V, F = _as_arrays(mesh_or_arrays)
    z = V[F, 2].mean(axis=1)
    u, w, g2, e, f, g, q = _face_area_quantities(V, F, A, z)
    areas = 0.5 * np.sqrt(np.maximum(q, _AREA_FLOOR ** 2))
    if areas.min(initial=np.inf) <= _AREA_FLOOR:
        bad = int(np.argmin(areas))
        raise DegenerateFaceError(f"face {bad} degenerate in gradient")

    g11, g12, g22 = g2[:, 0, 0], g2[:, 0, 1], g2[:, 1, 1]
    gu = np.stack([g11 * u[:, 0] + g12 * u[:, 1],
                   g12 * u[:, 0] + g22 * u[:, 1],
                   u[:, 2]], axis=1)
    gw = np.stack([g11 * w[:, 0] + g12 * w[:, 1],
                   g12 * w[:, 0] + g22 * w[:, 1],
                   w[:, 2]], axis=1)
    qu = 2.0 * (g[:, None] * gu - f[:, None] * gw)
    qw = 2.0 * (e[:, None] * gw - f[:, None] * gu)

    # dG/dz = -(A^T G + G A), symmetric since G is
    a_, b_, c_, d_ = A.a, A.b, A.c, A.d
    d11 = -2.0 * (a_ * g11 + c_ * g12)
    d12 = -(a_ * g12 + c_ * g22 + g11 * b_ + g12 * d_)
    d22 = -2.0 * (g12 * b_ + g22 * d_)

    def bil(x, y):
        return (d11 * x[:, 0] * y[:, 0]
                + d12 * (x[:, 0] * y[:, 1] + x[:, 1] * y[:, 0])
                + d22 * x[:, 1] * y[:, 1])

    qz = g * bil(u, u) + e * bil(w, w) - 2.0 * f * bil(u, w)

    scale = 1.0 / (8.0 * areas)
    zpart = np.zeros((len(F), 3))
    zpart[:, 2] = qz / 3.0
    d1 = (qu + zpart) * scale[:, None]
    d2 = (qw + zpart) * scale[:, None]
    d0 = (-(qu + qw) + zpart) * scale[:, None]

    grad = np.zeros_like(V)
    for k, contrib in ((0, d0), (1, d1), (2, d2)):
        _scatter_add(grad, F[:, k], contrib)
    return grad


# ---------------------------------------------------------------------------
# volume below the surface


def _height_antiderivative(tau, z):
    """F(z) = int_0^z e^{-tau s} ds = (1 - e^{-tau z})/tau, limit z as tau -> 0."""
    if tau == 0.0:
        return np.asarray(z, dtype=float)
    return (1.0 - np.exp(-tau * np.asarray(z, dtype=float))) / tau


def _projected_signed_areas(V, F):
    p0, p1, p2 = _corners(V, F)
    return 0.5 * ((p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1])
                  - (p2[:, 0] - p0[:, 0]) * (p1[:, 1] - p0[:, 1]))


def mesh_volume_below(mesh_or_arrays, A, base_height=None) -> float:
    """Riemannian volume between the mesh and the leaf x3 = 0.

    The volume density e^{-trace(A) x3} is integrated exactly in the height;
    the remaining planar integral uses the 3-point edge-midpoint rule per
    projected triangle.  The mesh must be graph-like over the x1 x2 plane
    (all projected faces positively oriented) unless ``base_height`` is
    supplied, in which case the signed sum relative to that leaf is returned.
    """
    A = as_matrix2(A)
    V, F = _as_arrays(mesh_or_arrays)
    sa = _projected_signed_areas(V, F)
    base = base_height
    if base is None:
        if sa.size and sa.min() <= 0.0:
            raise NonGraphMeshError(
                "mesh does not project positively to the x3 = 0 plane; "
                "supply base_height for a signed volume")
        base = 0.0
    tau = A.trace
    z = V[F, 2]
    zmid = 0.5 * (z + np.roll(z, -1, axis=1))
    fq = _height_antiderivative(tau, zmid).mean(axis=1) - _height_antiderivative(tau, base)
    return float(np.sum(sa * fq))


def mesh_volume_gradient(mesh_or_arrays, A) -> np.ndarray:
    """Analytic coordinate gradient of mesh_volume_below (base height 0)."""
    A = as_matrix2(A)
    V, F = _as_arrays(mesh_or_arrays)
    tau = A.trace
    p0, p1, p2 = _corners(V, F)
    sa = _projected_signed_areas(V, F)
    z = V[F, 2]
    zmid = 0.5 * (z + np.roll(z, -1, axis=1))
    fq = _height_antiderivative(tau, zmid).mean(axis=1)
    fprime = np.exp(-tau * zmid) if tau != 0.0 else np.ones_like(zmid)

    grad = np.zeros_like(V)
    # planar part: d(sa)/d(x, y) times the height factor
    d_sa = np.zeros((len(F), 3, 2))
    d_sa[:, 0, 0] = p1[:, 1] - p2[:, 1]
    d_sa[:, 0, 1] = p2[:, 0] - p1[:, 0]
    d_sa[:, 1, 0] = p2[:, 1] - p0[:, 1]
    d_sa[:, 1, 1] = p0[:, 0] - p2[:, 0]
    d_sa[:, 2, 0] = p0[:, 1] - p1[:, 1]
    d_sa[:, 2, 1] = p1[:, 0] - p0[:, 0]
    d_sa *= 0.5
    # height part: vertex k sits on edge midpoints k and k-1, each with weight 1/2
    d_fq = np.zeros((len(F), 3))
    for k in range(3):
        d_fq[:, k] = (fprime[:, k] + fprime[:, (k - 1) % 3]) / 6.0
    for k in range(3):
        contrib = np.zeros((len(F), 3))
        contrib[:, :2] = d_sa[:, k] * fq[:, None]
        contrib[:, 2] = sa * d_fq[:, k]
        _scatter_add(grad, F[:, k], contrib)
    return grad


# ---------------------------------------------------------------------------
# vertex masses and discrete operators


def vertex_masses(mesh_or_arrays, A) -> np.ndarray:
    """Barycentric metric vertex areas: one third of each incident face."""
    V, F = _as_arrays(mesh_or_arrays)
    areas = face_metric_areas((V, F), A)
    mass = np.zeros(len(V))
    for k in range(3):
        _scatter_add(mass, F[:, k], areas / 3.0)
    return mass


def metric_edge_lengths(mesh_or_arrays, A) -> np.ndarray:
    """Per-face metric edge lengths (m, 3); column k is the edge opposite
    corner k, measured with the metric at the edge midpoint."""
    V, F = _as_arrays(mesh_or_arrays)
    out = np.zeros((len(F), 3))
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        vec = V[F[:, j]] - V[F[:, i]]
        zmid = 0.5 * (V[F[:, i], 2] + V[F[:, j], 2])
        g2 = metric_blocks(A, zmid)
        out[:, k] = np.sqrt(_gram(vec, vec, g2))
    return out


def _heron(l0, l1, l2):
    s = 0.5 * (l0 + l1 + l2)
    return np.sqrt(np.maximum(s * (s - l0) * (s - l1) * (s - l2), 0.0))


def mixed_voronoi_masses(mesh_or_arrays, A) -> np.ndarray:
    """Mixed Voronoi vertex areas from metric edge lengths (Voronoi cell for
    non-obtuse triangles, area/2 at the obtuse corner and area/4 elsewhere)."""
    V, F = _as_arrays(mesh_or_arrays)
    L = metric_edge_lengths((V, F), A)
    L2 = L ** 2
    area = _heron(L[:, 0], L[:, 1], L[:, 2])
    if area.size and area.min() <= _AREA_FLOOR:
        bad = int(np.argmin(area))
        raise DegenerateFaceError(f"face {bad} degenerate (metric Heron area)")
    # cot at corner k = (l_i^2 + l_j^2 - l_k^2) / (4 area)
    cot = np.empty_like(L)
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        cot[:, k] = (L2[:, i] + L2[:, j] - L2[:, k]) / (4.0 * area)
    obtuse_corner = np.argmin(cot, axis=1)
    any_obtuse = cot.min(axis=1) < 0.0

    mass = np.zeros(len(V))
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        voronoi = (L2[:, i] * cot[:, i] + L2[:, j] * cot[:, j]) / 8.0
        fallback = np.where(obtuse_corner == k, 0.5 * area, 0.25 * area)
        _scatter_add(mass, F[:, k], np.where(any_obtuse, fallback, voronoi))
    return mass


def laplace_beltrami(mesh, f, A) -> np.ndarray:
    """Cotangent Laplace-Beltrami of a vertex field, metric edge lengths,
    mixed Voronoi mass; interior vertices only (boundary entries are 0).

    Row sums vanish by construction, so constants are in the kernel exactly.
    """
    V, F = mesh.vertices, mesh.faces
    f = np.asarray(f, dtype=float)
    if f.shape != (len(V),):
        raise ValueError("field length must equal vertex count")
    L = metric_edge_lengths((V, F), A)
    area = _heron(L[:, 0], L[:, 1], L[:, 2])
    if area.size and area.min() <= _AREA_FLOOR:
        bad = int(np.argmin(area))
        raise DegenerateFaceError(f"face {bad} degenerate (metric Heron area)")
    L2 = L ** 2
    # difference form sum_j w_ij (f_j - f_i): constants drop out exactly
    lap = np.zeros(len(V))
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        w = 0.5 * (L2[:, i] + L2[:, j] - L2[:, k]) / (4.0 * area)
        _scatter_add(lap, F[:, i], w * (f[F[:, j]] - f[F[:, i]]))
        _scatter_add(lap, F[:, j], w * (f[F[:, i]] - f[F[:, j]]))
    mass = mixed_voronoi_masses((V, F), A)
    interior = mesh.interior_mask
    if np.any(mass[interior] < _AREA_FLOOR):
        raise ZeroMassError("mixed Voronoi mass underflow at an interior vertex")
    out = np.zeros(len(V))
    out[interior] = lap[interior] / mass[interior]
    return out


def discrete_mean_curvature(mesh, A):
    """Per-vertex mean curvature and unit mean-curvature direction.

    H is the metric norm of the area gradient over twice the mixed Voronoi
    vertex mass, signed positive when the mean curvature vector (minus the
    area-gradient direction) has positive E3 component; this matches the
    convention in which a leaf has H = trace(A)/2 with respect to E3.
    Boundary vertices get H = nan and normal E3.
    """
    A = as_matrix2(A)
    V, F = mesh.vertices, mesh.faces
    grad = mesh_area_gradient((V, F), A)
    mass = mixed_voronoi_masses((V, F), A)
    interior = mesh.interior_mask
    if np.any(mass[interior] < _AREA_FLOOR):
        raise ZeroMassError("zero vertex mass at an interior vertex")
    # covector -> frame components: (e^{zA})^T on the 2-block, identity on x3
    E = exp_zA(A, V[:, 2])
    w = np.empty_like(grad)
    w[:, 0] = E[:, 0, 0] * grad[:, 0] + E[:, 1, 0] * grad[:, 1]
    w[:, 1] = E[:, 0, 1] * grad[:, 0] + E[:, 1, 1] * grad[:, 1]
    w[:, 2] = grad[:, 2]
    mcv = np.zeros_like(w)
    mcv[interior] = -w[interior] / (2.0 * mass[interior, None])
    mag = np.linalg.norm(mcv, axis=1)
    h = np.where(mcv[:, 2] >= 0.0, mag, -mag)
    h[~interior] = np.nan
    normals = np.zeros_like(mcv)
    normals[:, 2] = 1.0
    ok = mag > 1e-14
    normals[ok] = mcv[ok] / mag[ok, None]
    return h, normals


def left_translate_mesh(mesh: TriMesh, g, A) -> TriMesh:
    """Left-translate every vertex by the group element g (an isometry)."""
    g = np.asarray(g, dtype=float)
    return TriMesh(multiply(g, mesh.vertices, A), mesh.faces)


# ---------------------------------------------------------------------------
# file formats


def save_obj(mesh: TriMesh, path) -> None:
    lines = ["# semidirect mesh"]
    for v in mesh.vertices:
        lines.append(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}")
    for f in mesh.faces:
        lines.append(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_obj(path) -> TriMesh:
    verts, faces = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "v":
                if len(parts) != 4:
                    raise MeshError(f"{path}:{lineno}: malformed vertex line")
                verts.append([float(x) for x in parts[1:]])
            elif parts[0] == "f":
                if len(parts) != 4:
                    raise MeshError(f"{path}:{lineno}: only triangles are supported")
                faces.append([int(x) - 1 for x in parts[1:]])
            else:
                raise MeshError(f"{path}:{lineno}: unsupported OBJ element {parts[0]!r}")
    return TriMesh(np.array(verts, dtype=float), np.array(faces, dtype=np.int64))


def save_scalar_field(values, path) -> None:
    values = np.asarray(values, dtype=float)
    lines = ["vertex_index,value"]
    for i, val in enumerate(values):
        lines.append(f"{i},{val:.17g}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_scalar_field(path, n_vertices=None) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        rows = [line.strip() for line in fh if line.strip()]
    if not rows or rows[0] != "vertex_index,value":
        raise ValueError(f"{path}: missing scalar field header")
    idx, vals = [], []
    for row in rows[1:]:
        i, v = row.split(",")
        idx.append(int(i))
        vals.append(float(v))
    n = n_vertices if n_vertices is not None else (max(idx) + 1 if idx else 0)
    out = np.full(n, np.nan)
    out[np.asarray(idx, dtype=int)] = vals
    if np.any(np.isnan(out)):
        raise ValueError(f"{path}: field does not cover every vertex")
    return out
