"""Convex planar domains as polygons: area, membership, ray exits, radial caps."""

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConvexPolygon",
    "RadialCap",
    "polygon_area",
    "convex_hull",
    "load_polygon",
    "unit_square",
    "rectangle",
    "equilateral_triangle",
    "regular_polygon",
]

# Collinear-vertex tolerance; fine polygonal approximations of smooth domains
# produce nearly collinear consecutive edges and must pass validation.
_CONVEXITY_TOL = 1e-12
_BOUNDARY_TOL = 1e-12


def _cross2(a, b):
    """z-component of the cross product of stacked 2D vectors."""
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


class ConvexPolygon:
    """Counterclockwise convex polygon; the domain for all bound computations."""

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValueError("vertices must be an (n>=3, 2) array")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertices must be finite")
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        scale = lengths.max()
        if np.any(lengths <= 1e-14 * max(scale, 1.0)):
            raise ValueError("repeated vertices")
        crosses = _cross2(edges, np.roll(edges, -1, axis=0))
        norm = lengths * np.roll(lengths, -1)
        if np.any(crosses < -_CONVEXITY_TOL * norm):
            raise ValueError("vertices are not in convex counterclockwise order")
        area2 = float(np.sum(_cross2(v, np.roll(v, -1, axis=0))))
        if area2 <= 0:
            raise ValueError("polygon must have positive signed area (counterclockwise)")

        self.vertices = v
        self._edges = edges
        self._edge_lengths = lengths
        # inward unit normals: rotate each edge direction by +90 degrees
        self._normals = np.column_stack((-edges[:, 1], edges[:, 0])) / lengths[:, None]
        self._area = 0.5 * area2
        d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=-1)
        self._diameter = math.sqrt(float(d2.max()))

    def __repr__(self):
        return f"ConvexPolygon({len(self.vertices)} vertices, area={self._area:.6g})"

    @classmethod
    def from_points(cls, points):
        """Convex hull of an arbitrary point cloud, canonicalized counterclockwise."""
        return cls(convex_hull(points))

    @property
    def area(self):
        return self._area

    @property
    def bbox(self):
        v = self.vertices
        return v[:, 0].min(), v[:, 0].max(), v[:, 1].min(), v[:, 1].max()

    @property
    def diameter(self):
        return self._diameter

    def contains_many(self, points):
        """Boolean mask: inside or within 1e-12 of the boundary (closure)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        # signed distance to each edge line, positive towards the interior
        diff = p[:, None, :] - self.vertices[None, :, :]
        signed = np.einsum("pej,ej->pe", diff, self._normals)
        return np.all(signed >= -_BOUNDARY_TOL, axis=1)

    def contains(self, point):
        return bool(self.contains_many(np.asarray(point, dtype=float)[None, :])[0])

    def ray_exit_many(self, x, omegas):
        """Boundary-exit distances from x along unit directions (m, 2).

        Convexity makes the exit unique. For x on the boundary itself, rays
        pointing outward get distance 0.
        """
        x = np.asarray(x, dtype=float)
        if not self.contains(x):
            raise ValueError(f"ray origin {x} is outside the polygon")
        om = np.atleast_2d(np.asarray(omegas, dtype=float))
        norms = np.hypot(om[:, 0], om[:, 1])
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("directions must be unit vectors")

        a = self.vertices[None, :, :] - x[None, None, :]  # (1, e, 2)
        d = self._edges[None, :, :]
        omE = om[:, None, :]
        denom = _cross2(omE, d)  # (m, e)
        with np.errstate(divide="ignore", invalid="ignore"):
            rho = _cross2(a, d) / denom
            s = _cross2(a, omE) / denom
        eps = 1e-12 * max(self._diameter, 1.0)
        valid = (np.abs(denom) > 1e-15) & (s >= -1e-9) & (s <= 1 + 1e-9) & (rho > eps)
        rho = np.where(valid, rho, np.inf)
        out = rho.min(axis=1)
        # origin on the boundary, ray pointing outward: exit immediately
        out[~np.isfinite(out)] = 0.0
        return out

    def ray_exit_distance(self, x, omega):
        """Distance from interior point x to the boundary along unit vector omega."""
        return float(self.ray_exit_many(x, np.asarray(omega, dtype=float)[None, :])[0])

    def vertex_angles(self, x):
        """Sorted angles of all vertices as seen from x, in [0, 2*pi)."""
        diff = self.vertices - np.asarray(x, dtype=float)[None, :]
        ang = np.mod(np.arctan2(diff[:, 1], diff[:, 0]), 2.0 * math.pi)
        return np.sort(np.unique(ang))

    def edge_segment_distance(self, x):
        """Distance from x to each closed edge segment."""
        x = np.asarray(x, dtype=float)
        rel = x[None, :] - self.vertices
        t = np.einsum("ej,ej->e", rel, self._edges) / self._edge_lengths**2
        t = np.clip(t, 0.0, 1.0)
        foot = self.vertices + t[:, None] * self._edges
        return np.hypot(*(x[None, :] - foot).T)

    def radial_cap(self, x, r, n_angles):
        """Sample R(omega) = min(r, exit distance) on a uniform angle grid."""
        if r <= 0:
            raise ValueError("cap radius must be positive")
        if n_angles < 8:
            raise ValueError("n_angles must be at least 8")
        angles = 2.0 * math.pi * np.arange(n_angles) / n_angles
        omegas = np.column_stack((np.cos(angles), np.sin(angles)))
        radii = np.minimum(r, self.ray_exit_many(x, omegas))
        return RadialCap(center=np.asarray(x, dtype=float), r=float(r), angles=angles, radii=radii)


@dataclass
class RadialCap:
    """Radial description of the intersection of a disk with the domain."""

    center: np.ndarray
    r: float
    angles: np.ndarray
    radii: np.ndarray


def polygon_area(p: ConvexPolygon) -> float:
    """Shoelace area of the polygon."""
    return p.area


def convex_hull(points):
    """Convex hull (counterclockwise, collinear points dropped) by monotone chain."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) < 3:
        raise ValueError("need at least 3 distinct points")

    def half(seq):
        chain = []
        for q in seq:
            while len(chain) >= 2 and _cross2(chain[-1] - chain[-2], q - chain[-2]) <= 0:
                chain.pop()
            chain.append(q)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 3:
        raise ValueError("points are collinear; no polygon")
    return hull


def load_polygon(path):
    """Read a domain file: {"vertices": [[x, y], ...]} or a bare vertex list."""
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data["vertices"]
    return ConvexPolygon(data)


def unit_square():
    return ConvexPolygon([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])


def rectangle(width, height):
    return ConvexPolygon([(0.0, 0.0), (width, 0.0), (width, height), (0.0, height)])


def equilateral_triangle(side=1.0):
    h = side * math.sqrt(3.0) / 2.0
    return ConvexPolygon([(0.0, 0.0), (side, 0.0), (side / 2.0, h)])


def regular_polygon(n, circumradius=1.0, center=(0.0, 0.0), phase=0.0):
    """Regular n-gon; with large n this is the working stand-in for a disk."""
    if n < 3:
        raise ValueError("need n >= 3")
    cx, cy = center
    ang = phase + 2.0 * math.pi * np.arange(n) / n
    pts = np.column_stack((cx + circumradius * np.cos(ang), cy + circumradius * np.sin(ang)))
    return ConvexPolygon(pts)
