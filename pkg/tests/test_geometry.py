import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from safezone import geometry as geo
from safezone.exceptions import DegenerateInputError, PreconditionError, ValidationError
from safezone.geometry import Relation, SafetyEllipse, SafetyParams, VehicleFootprint


def circle(cx=0.0, cy=0.0, r=1.0):
    return SafetyEllipse((cx, cy), r, r, 0.0)


angles = st.floats(-math.pi, math.pi, allow_nan=False)
axes = st.floats(0.5, 15.0)
coords = st.floats(-50.0, 50.0)


@st.composite
def ellipses(draw):
    a, b = sorted([draw(axes), draw(axes)], reverse=True)
    return SafetyEllipse((draw(coords), draw(coords)), a, b, draw(angles))


class TestTypes:
    def test_footprint_rejects_wide_vehicle(self):
        with pytest.raises(ValidationError):
            VehicleFootprint(1.5, 2.0)

    def test_footprint_rejects_non_positive(self):
        with pytest.raises(ValidationError):
            VehicleFootprint(0.0, 0.0)

    def test_ellipse_rotation_wrapped(self):
        e = SafetyEllipse((0, 0), 2, 1, 3 * math.pi)
        assert e.rotation_rad == pytest.approx(math.pi)
        assert SafetyEllipse((0, 0), 2, 1, -math.pi).rotation_rad == pytest.approx(math.pi)

    def test_ellipse_axis_order(self):
        with pytest.raises(ValidationError):
            SafetyEllipse((0, 0), 1, 2, 0)

    @pytest.mark.parametrize("n", [7, 9, 4])
    def test_safety_params_samples(self, n):
        with pytest.raises(ValidationError):
            SafetyParams(boundary_samples=n)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(geo.BOUNDARY_SAMPLES_ENV, "32")
        assert SafetyParams().boundary_samples == 32
        monkeypatch.setenv(geo.BOUNDARY_SAMPLES_ENV, "abc")
        with pytest.raises(ValidationError):
            SafetyParams()


class TestAdaptiveEllipse:
    fp = VehicleFootprint(4.0, 2.0)
    sp = SafetyParams(ttc_threshold_s=2.0, lateral_margin_m=0.5)

    @pytest.mark.parametrize("speed,rx", [(5.0, 12.0), (0.0, 2.0), (10.0, 22.0)])
    def test_semi_axes(self, speed, rx):
        e = geo.adaptive_ellipse(self.fp, (1.0, 2.0, 0.3), speed, self.sp)
        assert e.semi_major_m == pytest.approx(rx)
        assert e.semi_minor_m == pytest.approx(1.5)
        assert e.center == (1.0, 2.0)
        assert e.rotation_rad == pytest.approx(0.3)

    def test_negative_speed(self):
        with pytest.raises(ValidationError):
            geo.adaptive_ellipse(self.fp, (0, 0, 0), -1.0, self.sp)


class TestBoundary:
    def test_unit_circle_four_points(self):
        pts = geo.sample_boundary(circle(), 4)
        np.testing.assert_allclose(pts, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)

    def test_rotated_ellipse(self):
        pts = geo.sample_boundary(SafetyEllipse((0, 0), 2, 1, math.pi / 2), 4)
        np.testing.assert_allclose(pts, [[0, 2], [-1, 0], [0, -2], [1, 0]], atol=1e-15)

    @given(ellipses(), st.sampled_from([8, 16, 64, 128]))
    def test_samples_on_boundary(self, e, n):
        for p in geo.sample_boundary(e, n):
            assert np.linalg.norm(geo.normalized_delta(e, p)) == pytest.approx(1.0, abs=1e-12)


class TestNormalizedDelta:
    def test_center(self):
        np.testing.assert_array_equal(geo.normalized_delta(circle(3, 4), (3, 4)), [0, 0])

    def test_circle_outside(self):
        np.testing.assert_allclose(geo.normalized_delta(circle(), (2, 0)), [2, 0])

    def test_major_axis_end(self):
        d = geo.normalized_delta(SafetyEllipse((0, 0), 2, 1, 0), (2, 0))
        np.testing.assert_allclose(d, [1, 0])


class TestRadialProjection:
    def test_circle(self):
        np.testing.assert_allclose(geo.radial_projection(circle(), (3, 0)), [1, 0])

    def test_minor_axis(self):
        p = geo.radial_projection(SafetyEllipse((0, 0), 2, 1, 0), (0, 5))
        np.testing.assert_allclose(p, [0, 1], atol=1e-15)

    def test_center_is_degenerate(self):
        with pytest.raises(DegenerateInputError):
            geo.radial_projection(circle(1, 1), (1, 1))

    @given(ellipses(), coords, coords)
    def test_lands_on_boundary_and_idempotent(self, e, px, py):
        if np.linalg.norm(geo.normalized_delta(e, (px, py))) < 1e-6:
            return
        q = geo.radial_projection(e, (px, py))
        assert np.linalg.norm(geo.normalized_delta(e, q)) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(geo.radial_projection(e, q) - q) < 1e-12 * max(1.0, np.abs(q).max())


class TestClassify:
    def test_identical(self):
        e = SafetyEllipse((1, 1), 3, 1, 0.4)
        assert geo.classify(e, e, 64) is Relation.INTERSECTING

    def test_far_circles(self):
        assert geo.classify(circle(), circle(10, 0), 64) is Relation.SEPARATED

    def test_containment(self):
        assert geo.classify(circle(), circle(r=5), 64) is Relation.INTERSECTING
        assert geo.classify(circle(r=5), circle(), 64) is Relation.INTERSECTING

    def test_tangent_counts_as_intersecting(self):
        assert geo.classify(circle(), circle(2, 0), 16) is Relation.INTERSECTING

    @given(ellipses(), ellipses())
    def test_symmetric(self, a, b):
        assert geo.classify(a, b, 64) is geo.classify(b, a, 64)


class TestDistance:
    def test_circle_gap(self):
        assert geo.brute_force_distance(circle(), circle(4, 0), 64) == pytest.approx(2.0, abs=0.01)
        assert geo.min_gap(circle(), circle(4, 0), 64) == pytest.approx(2.0, abs=0.02)

    def test_circles_of_different_radius(self):
        d = geo.brute_force_distance(circle(), circle(6, 0, 2), 128)
        assert d == pytest.approx(3.0, abs=0.005)

    def test_near_touching(self):
        e = SafetyEllipse((0, 0), 3, 1, 0.0)
        eps = 1e-3
        f = SafetyEllipse((6 + eps, 0), 3, 1, 0.0)
        d = geo.brute_force_distance(e, f, 64)
        assert 0 <= d == pytest.approx(eps, abs=1e-9)

    def test_intersecting_pair_rejected(self):
        with pytest.raises(PreconditionError):
            geo.min_gap(circle(), circle(1, 0), 64)
        with pytest.raises(PreconditionError):
            geo.brute_force_distance(circle(), circle(1, 0), 64)

    def test_translated_congruent_ellipses(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            a = rng.uniform(1, 10)
            b = rng.uniform(0.5, a)
            th = rng.uniform(-math.pi, math.pi)
            gap = rng.uniform(0.1, 20) * a
            shift = (2 * a + gap) * np.array([math.cos(th), math.sin(th)])
            e = SafetyEllipse((0, 0), a, b, th)
            f = SafetyEllipse(tuple(shift), a, b, th)
            for n in (64, 128):
                ref = geo.brute_force_distance(e, f, n)
                assert abs(geo.min_gap(e, f, n) - ref) <= 0.02 * ref

    def test_convergence_sweep(self):
        # for eccentric pairs the two estimators converge to different limits
        e = circle(r=2)
        f = circle(7, 1, 2)
        errs = [abs(geo.min_gap(e, f, n) - geo.brute_force_distance(e, f, n))
                for n in (32, 64, 128, 256)]
        assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))

    @settings(max_examples=200)
    @given(ellipses(), ellipses())
    def test_min_gap_symmetric(self, a, b):
        if geo.classify(a, b, 64) is Relation.INTERSECTING:
            return
        assert geo.min_gap(a, b, 64) == pytest.approx(geo.min_gap(b, a, 64), abs=1e-12)
        assert geo.min_gap(a, b, 64) >= geo.brute_force_distance(a, b, 64) - 1e-12


class TestShoelace:
    def test_unit_square(self):
        assert geo.shoelace_area([(0, 0), (1, 0), (1, 1), (0, 1)]) == 1.0

    def test_triangle(self):
        assert geo.shoelace_area([(0, 0), (1, 0), (0, 1)]) == 0.5

    def test_too_few_vertices(self):
        assert geo.shoelace_area([(0, 0), (1, 1)]) == 0.0

    @pytest.mark.parametrize("n", [3, 4, 7, 64, 1000])
    def test_inscribed_regular_polygon(self, n):
        pts = geo.sample_boundary(circle(), n)
        assert geo.shoelace_area(pts) == pytest.approx(n / 2 * math.sin(2 * math.pi / n), rel=1e-12)

    @given(st.integers(0, 20), angles, coords, coords)
    def test_invariances(self, shift, rot, tx, ty):
        rng = np.random.default_rng(shift)
        pts = geo.sample_boundary(SafetyEllipse((0, 0), 5, 2, 0.3), 24)
        pts = pts[rng.permutation(24)[:12]]
        poly = geo._polygon_from_points(pts)
        ref = geo.shoelace_area(poly)
        assert geo.shoelace_area(np.roll(poly.vertices, shift, axis=0)) == ref
        c, s = math.cos(rot), math.sin(rot)
        moved = poly.vertices @ np.array([[c, s], [-s, c]]) + (tx, ty)
        assert geo.shoelace_area(moved) == pytest.approx(ref, rel=1e-9)


class TestOverlap:
    def test_identical_circles(self):
        poly = geo.overlap_polygon(circle(), circle(), 64)
        assert poly.n_collected == 128
        assert len(poly.vertices) == 64
        x, y = poly.vertices.T
        assert np.sum(x * np.roll(y, -1) - y * np.roll(x, -1)) > 0

    def test_vertices_inside_both(self):
        a, b = circle(), circle(1, 0)
        poly = geo.overlap_polygon(a, b, 64)
        for v in poly.vertices:
            assert np.linalg.norm(geo.normalized_delta(a, v)) <= 1 + 1e-9
            assert np.linalg.norm(geo.normalized_delta(b, v)) <= 1 + 1e-9

    def test_tangent_is_degenerate(self):
        poly = geo.overlap_polygon(circle(), circle(2, 0), 16)
        assert poly.degenerate
        assert geo.overlap_area(circle(), circle(2, 0), 16) == 0.0

    def test_separated_rejected(self):
        with pytest.raises(PreconditionError):
            geo.overlap_polygon(circle(), circle(5, 0), 64)

    def test_concentric_inscribed_polygon(self):
        assert geo.overlap_area(circle(), circle(), 64) == pytest.approx(
            32 * math.sin(math.pi / 32), abs=1e-12)

    def test_lens(self):
        lens = 2 * math.acos(0.5) - math.sqrt(3) / 2
        assert geo.overlap_area(circle(), circle(1, 0), 128) == pytest.approx(lens, rel=0.02)

    def test_containment_gives_inner_polygon(self):
        inner = SafetyEllipse((0.5, 0.2), 1.0, 0.5, 0.3)
        outer = SafetyEllipse((0, 0), 6, 4, 0)
        expected = geo.shoelace_area(geo.sample_boundary(inner, 64))
        assert geo.overlap_area(inner, outer, 64) == pytest.approx(expected, rel=1e-12)

    def test_concentric_monotone_in_n(self):
        e = SafetyEllipse((2, -1), 3, 1, 0.5)
        areas = [geo.overlap_area(e, e, n) for n in (8, 16, 32, 64, 128, 256)]
        assert all(b >= a for a, b in zip(areas, areas[1:]))
        assert areas[-1] == pytest.approx(math.pi * 3, rel=1e-3)

    def test_tie_broken_by_distance(self):
        poly = geo._polygon_from_points([(0, 0), (2, 0), (1, 1), (1, -1), (1.5, 0)])
        # (1.5, 0) and (2, 0) share the angle from the centroid (1.1, 0)
        xs = [tuple(v) for v in poly.vertices]
        assert xs.index((1.5, 0.0)) + 1 == xs.index((2.0, 0.0))
