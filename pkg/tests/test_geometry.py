import json
import math

import numpy as np
import pytest

from polya_cert.geometry import (
    ConvexPolygon,
    convex_hull,
    equilateral_triangle,
    load_polygon,
    polygon_area,
    regular_polygon,
    unit_square,
)

HEX_AREA = 2.598076211353316  # 3 sqrt(3) / 2


class TestValidation:
    def test_too_few_vertices(self):
        with pytest.raises(ValueError):
            ConvexPolygon([(0, 0), (1, 0)])

    def test_repeated_vertices(self):
        with pytest.raises(ValueError):
            ConvexPolygon([(0, 0), (1, 0), (1, 0), (0, 1)])

    def test_clockwise_rejected(self):
        with pytest.raises(ValueError):
            ConvexPolygon([(0, 0), (0, 1), (1, 1), (1, 0)])

    def test_reflex_rejected(self):
        with pytest.raises(ValueError):
            ConvexPolygon([(0, 0), (2, 0), (1, 0.1), (2, 2), (0, 2)])

    def test_collinear_tolerated(self):
        # midpoint on an edge is within the collinearity tolerance
        p = ConvexPolygon([(0, 0), (0.5, 0.0), (1, 0), (1, 1), (0, 1)])
        assert p.area == pytest.approx(1.0)


class TestArea:
    def test_unit_square(self, square):
        assert polygon_area(square) == 1.0

    def test_triangle(self):
        p = ConvexPolygon([(0, 0), (1, 0), (0, 1)])
        assert p.area == pytest.approx(0.5)

    def test_hexagon(self, hexagon):
        assert hexagon.area == pytest.approx(HEX_AREA, rel=1e-12)

    def test_hull_canonicalization_idempotent(self, rng):
        pts = rng.normal(size=(40, 2))
        base = ConvexPolygon.from_points(pts)
        for _ in range(5):
            perm = rng.permutation(len(pts))
            again = ConvexPolygon.from_points(pts[perm])
            assert again.area == pytest.approx(base.area, rel=1e-12)


class TestContains:
    def test_inside(self, square):
        assert square.contains((0.5, 0.5))

    def test_outside(self, square):
        assert not square.contains((1.5, 0.5))

    def test_boundary_counts_as_inside(self, square):
        assert square.contains((1.0, 0.5))
        assert square.contains((0.0, 0.0))

    def test_vectorized(self, square, rng):
        pts = rng.uniform(-0.5, 1.5, size=(500, 2))
        mask = square.contains_many(pts)
        expected = np.all((pts >= -1e-12) & (pts <= 1 + 1e-12), axis=1)
        assert np.array_equal(mask, expected)


class TestRayExit:
    def test_axis_ray(self, square):
        assert square.ray_exit_distance((0.5, 0.5), (1, 0)) == pytest.approx(0.5)

    def test_diagonal_hits_corner(self, square):
        w = 1 / math.sqrt(2)
        d = square.ray_exit_distance((0.5, 0.5), (w, w))
        assert d == pytest.approx(math.sqrt(2) / 2, rel=1e-12)

    def test_hexagon_apothem(self):
        # flat side facing +x: the exit along (1, 0) is the apothem sqrt(3)/2
        hx = regular_polygon(6, 1.0, phase=math.pi / 6)
        d = hx.ray_exit_distance((0.0, 0.0), (1, 0))
        assert d == pytest.approx(math.sqrt(3) / 2, rel=1e-12)

    def test_origin_outside_raises(self, square):
        with pytest.raises(ValueError):
            square.ray_exit_distance((2.0, 0.5), (1, 0))

    def test_non_unit_direction_raises(self, square):
        with pytest.raises(ValueError):
            square.ray_exit_distance((0.5, 0.5), (1, 1))

    def test_boundary_origin_outward_is_zero(self, square):
        d = square.ray_exit_many((0.0, 0.5), np.array([[-1.0, 0.0], [1.0, 0.0]]))
        assert d[0] == 0.0
        assert d[1] == pytest.approx(1.0)

    def test_agrees_with_bruteforce(self, hexagon, rng):
        # oracle: dense sampling along the ray with the containment test
        x = np.array([0.2, 0.1])
        for _ in range(20):
            ang = rng.uniform(0, 2 * math.pi)
            omega = np.array([math.cos(ang), math.sin(ang)])
            d = hexagon.ray_exit_distance(x, omega)
            ts = np.linspace(0, d * 0.999, 50)
            probes = x[None, :] + ts[:, None] * omega[None, :]
            assert hexagon.contains_many(probes).all()
            assert not hexagon.contains(x + (d + 1e-6) * omega)


class TestRadialCap:
    def test_fully_interior(self, square):
        cap = square.radial_cap((0.5, 0.5), 0.25, 64)
        assert np.all(cap.radii == 0.25)

    def test_saturates_at_boundary(self, square):
        cap = square.radial_cap((0.5, 0.5), 10.0, 256)
        assert cap.radii.max() == pytest.approx(math.sqrt(2) / 2, rel=1e-9)
        assert cap.radii.min() == pytest.approx(0.5, rel=1e-9)

    def test_offcenter(self, square):
        cap = square.radial_cap((0.1, 0.5), 0.3, 16)
        assert cap.radii[8] == pytest.approx(0.1)  # angle pi
        assert cap.radii[0] == pytest.approx(0.3)  # angle 0

    def test_positive_and_capped(self, hexagon, rng):
        for _ in range(10):
            x = rng.uniform(-0.3, 0.3, size=2)
            cap = hexagon.radial_cap(x, 0.9, 32)
            assert np.all(cap.radii > 0)
            assert np.all(cap.radii <= 0.9 + 1e-12)

    def test_membership_agreement(self, hexagon, rng):
        # the sampled radial description reproduces ball-cap membership
        x = np.array([0.55, 0.2])
        r = 0.7
        n_angles = 512
        cap = hexagon.radial_cap(x, r, n_angles)
        pts_angle = rng.uniform(0, 2 * math.pi, size=20_000)
        pts_rad = r * np.sqrt(rng.uniform(0, 1, size=20_000))
        pts = x[None, :] + pts_rad[:, None] * np.column_stack(
            (np.cos(pts_angle), np.sin(pts_angle))
        )
        idx = np.rint(pts_angle / (2 * math.pi / n_angles)).astype(int) % n_angles
        radial_member = pts_rad < cap.radii[idx]
        true_member = hexagon.contains_many(pts) & (pts_rad < r)
        agreement = np.mean(radial_member == true_member)
        assert agreement >= 0.999

    def test_validation(self, square):
        with pytest.raises(ValueError):
            square.radial_cap((0.5, 0.5), -1.0, 64)
        with pytest.raises(ValueError):
            square.radial_cap((0.5, 0.5), 0.2, 4)


class TestHullAndIO:
    def test_hull_drops_interior_points(self):
        pts = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5), (0.2, 0.8)]
        hull = convex_hull(pts)
        assert len(hull) == 4

    def test_collinear_cloud_rejected(self):
        with pytest.raises(ValueError):
            convex_hull([(0, 0), (1, 1), (2, 2), (3, 3)])

    def test_load_polygon_dict(self, tmp_path):
        path = tmp_path / "dom.json"
        path.write_text(json.dumps({"vertices": [[0, 0], [2, 0], [2, 1], [0, 1]]}))
        p = load_polygon(path)
        assert p.area == pytest.approx(2.0)

    def test_load_polygon_bare_list(self, tmp_path):
        path = tmp_path / "dom.json"
        path.write_text(json.dumps([[0, 0], [1, 0], [0.5, 1]]))
        p = load_polygon(path)
        assert p.area == pytest.approx(0.5)

    def test_factories(self):
        assert equilateral_triangle(2.0).area == pytest.approx(math.sqrt(3.0), rel=1e-12)
        assert regular_polygon(256).area == pytest.approx(math.pi, rel=1e-3)
        assert unit_square().diameter == pytest.approx(math.sqrt(2.0))
