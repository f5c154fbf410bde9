"""P1 finite-element Neumann eigensolver on triangulated convex polygons.

Neumann conditions are natural for the weak form, so no boundary handling is
needed anywhere: assemble stiffness and mass on a Delaunay mesh and solve the
generalized symmetric pencil. Conforming elements approximate eigenvalues
from above, which the verification pipeline accounts for with a 2% slack.
"""

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, eigsh, splu
from scipy.spatial import Delaunay

from .geometry import ConvexPolygon

__all__ = [
    "TriangleMesh",
    "NeumannSpectrum",
    "MeshError",
    "SolverError",
    "SpectrumRangeError",
    "mesh_polygon",
    "assemble",
    "solve_eigs",
    "counting_function",
    "neumann_spectrum",
]

_MIN_ANGLE_DEG = 15.0


class MeshError(RuntimeError):
    """Mesh generation produced a degenerate or low-quality triangulation."""


class SolverError(RuntimeError):
    """Eigenpairs failed to reach the residual tolerance."""


class SpectrumRangeError(ValueError):
    """Counting query beyond the trustworthy part of the computed spectrum."""


@dataclass
class TriangleMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    h: float
    n_boundary: int = 0

    def areas(self):
        v = self.vertices[self.triangles]
        d1 = v[:, 1] - v[:, 0]
        d2 = v[:, 2] - v[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def min_angle(self):
        """Smallest interior angle over all triangles, in degrees."""
        v = self.vertices[self.triangles]
        angles = []
        for i in range(3):
            a = v[:, (i + 1) % 3] - v[:, i]
            b = v[:, (i + 2) % 3] - v[:, i]
            na = np.hypot(a[:, 0], a[:, 1])
            nb = np.hypot(b[:, 0], b[:, 1])
            cosang = np.clip(np.einsum("tj,tj->t", a, b) / (na * nb), -1.0, 1.0)
            angles.append(np.degrees(np.arccos(cosang)))
        return float(np.min(angles))

    def max_edge(self):
        v = self.vertices[self.triangles]
        lengths = [
            np.hypot(*(v[:, (i + 1) % 3] - v[:, i]).T) for i in range(3)
        ]
        return float(np.max(lengths))

    def to_off(self):
        """OFF-style text dump for debugging."""
        buf = io.StringIO()
        buf.write("OFF\n")
        buf.write(f"{len(self.vertices)} {len(self.triangles)} 0\n")
        for x, y in self.vertices:
            buf.write(f"{x:.17g} {y:.17g} 0\n")
        for a, b, c in self.triangles:
            buf.write(f"3 {a} {b} {c}\n")
        return buf.getvalue()


@dataclass
class NeumannSpectrum:
    """Sorted Neumann eigenvalues with mesh metadata."""

    eigenvalues: np.ndarray
    mesh_h: float
    domain_area: float
    vectors: np.ndarray | None = field(default=None, repr=False)

    def to_csv_rows(self):
        return [(k + 1, mu) for k, mu in enumerate(self.eigenvalues)]


def _boundary_points(p: ConvexPolygon, h):
    pts = []
    v = p.vertices
    for i in range(len(v)):
        a, b = v[i], v[(i + 1) % len(v)]
        seg = np.hypot(*(b - a))
        n = max(1, int(math.ceil(seg / h)))
        for k in range(n):
            pts.append(a + (b - a) * (k / n))
    return np.array(pts)


def _interior_points(p: ConvexPolygon, h, margin=0.5):
    xmin, xmax, ymin, ymax = p.bbox
    dy = h * math.sqrt(3.0) / 2.0
    rows = np.arange(ymin + dy, ymax, dy)
    pts = []
    for i, y in enumerate(rows):
        x0 = xmin + (0.25 + 0.5 * (i % 2)) * h
        xs = np.arange(x0, xmax, h)
        pts.append(np.column_stack((xs, np.full(len(xs), y))))
    if not pts:
        return np.empty((0, 2))
    pts = np.concatenate(pts)
    # keep points clear of the boundary so Delaunay does not form slivers
    diff = pts[:, None, :] - p.vertices[None, :, :]
    signed = np.einsum("pej,ej->pe", diff, p._normals)
    keep = signed.min(axis=1) >= margin * h
    return pts[keep]


def _lloyd_pass(points, n_boundary):
    tri = Delaunay(points)
    simplices = tri.simplices
    v = points[simplices]
    d1 = v[:, 1] - v[:, 0]
    d2 = v[:, 2] - v[:, 0]
    areas = 0.5 * np.abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    centroids = v.mean(axis=1)
    acc = np.zeros_like(points)
    wsum = np.zeros(len(points))
    for corner in range(3):
        idx = simplices[:, corner]
        np.add.at(acc, idx, centroids * areas[:, None])
        np.add.at(wsum, idx, areas)
    moved = points.copy()
    interior = np.arange(len(points)) >= n_boundary
    ok = interior & (wsum > 0)
    moved[ok] = acc[ok] / wsum[ok, None]
    return moved


def mesh_polygon(p: ConvexPolygon, h, smoothing_passes=1) -> TriangleMesh:
    """Delaunay mesh of the polygon with target edge length h.

    Boundary edges are subdivided at spacing h (those vertices stay on the
    boundary), the interior is seeded with a hexagonal point lattice, and one
    Lloyd-style smoothing pass evens out the transition ring. h is clamped to
    diameter/4 so very coarse requests still produce a usable mesh.
    """
    if h <= 0:
        raise ValueError("mesh size h must be positive")
    if p.area < h * h:
        raise MeshError(f"polygon area {p.area} is degenerate at mesh size {h}")
    h_eff = min(float(h), p.diameter / 4.0)

    boundary = _boundary_points(p, h_eff)
    interior = _interior_points(p, h_eff)
    points = np.concatenate((boundary, interior)) if len(interior) else boundary
    n_boundary = len(boundary)

    for _ in range(max(0, smoothing_passes)):
        points = _lloyd_pass(points, n_boundary)

    tri = Delaunay(points)
    simplices = tri.simplices.copy()
    v = points[simplices]
    d1 = v[:, 1] - v[:, 0]
    d2 = v[:, 2] - v[:, 0]
    signed = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    flip = signed < 0
    simplices[flip] = simplices[flip][:, [0, 2, 1]]
    # drop numerically flat triangles from collinear boundary chains
    keep = np.abs(signed) > 1e-14 * p.diameter**2
    simplices = simplices[keep]

    mesh = TriangleMesh(vertices=points, triangles=simplices, h=h_eff, n_boundary=n_boundary)

    # quality gate; one extra smoothing pass before giving up
    if mesh.min_angle() < _MIN_ANGLE_DEG:
        if smoothing_passes < 3:
            return mesh_polygon(p, h, smoothing_passes=smoothing_passes + 1)
        raise MeshError(
            f"mesh quality too low: min angle {mesh.min_angle():.2f} deg < {_MIN_ANGLE_DEG}"
        )
    if mesh.max_edge() > 1.5 * h_eff * (1 + 1e-9):
        raise MeshError(f"mesh contains edges above 1.5h: {mesh.max_edge():.4g}")
    if abs(mesh.areas().sum() - p.area) > 1e-9 * max(p.area, 1.0):
        raise MeshError("triangulation does not cover the polygon")
    return mesh


def assemble(mesh: TriangleMesh):
    """P1 stiffness K (grad-grad) and consistent mass M over the mesh."""
    tris = mesh.triangles
    v = mesh.vertices[tris]  # (T, 3, 2)
    x = v[..., 0]
    y = v[..., 1]
    area2 = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    if np.any(area2 <= 0):
        raise MeshError("assembly requires positively oriented triangles")
    area = 0.5 * area2

    # gradients of the barycentric basis functions
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1) / area2[:, None]
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1) / area2[:, None]

    k_local = area[:, None, None] * (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :])
    m_pattern = (np.ones((3, 3)) + np.eye(3)) / 12.0
    m_local = area[:, None, None] * m_pattern[None, :, :]

    rows = np.repeat(tris, 3, axis=1).ravel()
    cols = np.tile(tris, (1, 3)).ravel()
    n = len(mesh.vertices)
    K = sparse.coo_matrix((k_local.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sparse.coo_matrix((m_local.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    return K, M


def _dense_pencil(K, M, m):
    from scipy.linalg import eigh

    vals, vecs = eigh(K.toarray(), M.toarray(), subset_by_index=[0, m - 1])
    return vals, vecs


def _residuals(K, M, vals, vecs):
    KU = K @ vecs
    MU = M @ vecs
    res = KU - MU * vals[None, :]
    return np.linalg.norm(res, axis=0) / np.linalg.norm(MU, axis=0)


def solve_eigs(K, M, m_lowest, mesh_h=float("nan"), domain_area=float("nan")) -> NeumannSpectrum:
    """Smallest m_lowest eigenvalues of K u = mu M u.

    Dense LAPACK under 2000 unknowns; otherwise shift-invert Lanczos at
    sigma = -1 (safely below the nonnegative spectrum) with a shared sparse
    factorization and a block Rayleigh-Ritz refinement to push residuals down.
    """
    n = K.shape[0]
    if m_lowest < 1:
        raise ValueError("m_lowest must be >= 1")
    if m_lowest > n // 2:
        raise ValueError(f"m_lowest={m_lowest} exceeds half the problem size {n}")

    if n <= 2000:
        vals, vecs = _dense_pencil(K, M, m_lowest)
    else:
        sigma = -1.0
        k = min(m_lowest + 5, n - 1)
        shifted = (K - sigma * M).tocsc()
        lu = splu(shifted)
        op = LinearOperator((n, n), matvec=lu.solve)
        # fixed starting vector keeps repeated runs byte-identical
        v0 = np.random.default_rng(1234).standard_normal(n)
        vals, vecs = eigsh(
            K, k=k, M=M.tocsc(), sigma=sigma, which="LM", OPinv=op, tol=0, v0=v0
        )
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]

        # one block inverse-iteration + Rayleigh-Ritz pass sharpens clusters
        W = lu.solve(M @ vecs)
        KW = W.T @ (K @ W)
        MW = W.T @ (M @ W)
        from scipy.linalg import eigh as dense_eigh

        small_vals, small_vecs = dense_eigh(KW, MW)
        vecs = W @ small_vecs
        vals = small_vals
        vals, vecs = vals[:m_lowest], vecs[:, :m_lowest]
        # renormalize in the M-inner product
        norms = np.sqrt(np.einsum("ij,ij->j", vecs, M @ vecs))
        vecs = vecs / norms[None, :]

    res = _residuals(K, M, vals, vecs)
    if np.any(res > 1e-8):
        worst = int(np.argmax(res))
        raise SolverError(
            f"eigenpair {worst} residual {res[worst]:.3e} exceeds tolerance 1e-8"
        )
    if np.any(vals < -1e-8):
        raise SolverError(f"negative eigenvalue {vals.min()} in a Neumann pencil")
    return NeumannSpectrum(
        eigenvalues=np.sort(vals)[:m_lowest],
        mesh_h=mesh_h,
        domain_area=domain_area,
        vectors=vecs,
    )


def counting_function(s: NeumannSpectrum, lam) -> int:
    """N(lam): number of computed eigenvalues <= lam (mu_1 = 0 included).

    Discrete eigenvalues sit above the true ones, so counts are only reported
    while lam stays below 80% of the largest computed eigenvalue; beyond that
    the tail is unresolved and the query is refused.
    """
    if lam < 0:
        return 0
    eigs = s.eigenvalues
    if len(eigs) == 0:
        raise SpectrumRangeError("empty spectrum")
    trust = 0.8 * float(eigs[-1])
    if lam > trust:
        raise SpectrumRangeError(
            f"lambda={lam} beyond the trusted range {trust:.6g} "
            f"(largest computed eigenvalue {eigs[-1]:.6g}); compute more eigenvalues"
        )
    # ties at lam count as <= lam
    return int(np.sum(eigs <= lam + 1e-9))


def neumann_spectrum(p: ConvexPolygon, h, m_lowest) -> NeumannSpectrum:
    """Mesh, assemble and solve in one call."""
    mesh = mesh_polygon(p, h)
    K, M = assemble(mesh)
    return solve_eigs(K, M, m_lowest, mesh_h=mesh.h, domain_area=p.area)
