import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from afxy.data import AtomicMeasure, Annulus, Disk, SpinField, triangle_set
from afxy.data.lattice import LatticeIndex, Orientation, TriangleId
from afxy.energy import ground_state, to_auxiliary
from afxy.exceptions import PreconditionError, UnderSamplingError
from afxy.recovery import build_recovery
from afxy.utils import THIRD_TURN, angle_diff, wrap
from afxy.vorticity import (
    chirality_vorticity_implications, circle_loop, flat_norm, mass_bound_check,
    rough_xy_bound_check, vorticity, vorticity_measure, vorticity_values, winding_number,
)

UP = TriangleId(LatticeIndex(0, 0), Orientation.UP)
angles = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


def one_triangle(a, b, c, T=UP):
    return SpinField.from_sites(1.0, dict(zip(T.vertices(), (a, b, c))))


class TestAngleDiff:
    """Oriented angle between two phases."""

    @pytest.mark.parametrize("start, end, expected", [
        (0.0, 1.5 * math.pi, -0.5 * math.pi),
        (0.0, math.pi, math.pi),
        (0.0, -math.pi, -math.pi),
        (0.0, 2 * math.pi, 0.0),
        (3.0, -3.0, 2 * math.pi - 6.0),
    ])
    def test_values(self, start, end, expected):
        assert angle_diff(start, end) == pytest.approx(expected, abs=1e-12)

    @given(angles, angles)
    def test_range_and_congruence(self, a, b):
        d = angle_diff(a, b)
        assert -math.pi <= d <= math.pi
        turns = (b - a - d) / (2 * math.pi)
        assert turns == pytest.approx(round(turns), abs=1e-9)

    @given(angles)
    def test_wrap(self, a):
        w = wrap(a)
        assert -math.pi - 1e-12 <= w <= math.pi + 1e-12
        assert math.cos(w) == pytest.approx(math.cos(a), abs=1e-9)


class TestVorticity:
    """Discrete vorticity of triangles."""

    def test_positive_vortex(self):
        assert vorticity(one_triangle(0.0, THIRD_TURN, 2 * THIRD_TURN), UP) == 1

    def test_negative_vortex(self):
        assert vorticity(one_triangle(0.0, -THIRD_TURN, -2 * THIRD_TURN), UP) == -1

    def test_constant(self):
        assert vorticity(one_triangle(1.0, 1.0, 1.0), UP) == 0

    @given(angles, angles, angles)
    def test_values_are_unit_or_zero(self, a, b, c):
        assert vorticity(one_triangle(a, b, c), UP) in (-1, 0, 1)

    def test_random_field(self, random_field, unit_square):
        values = vorticity_values(random_field, triangle_set(unit_square, random_field.eps))
        assert set(np.unique(values)) <= {-1, 0, 1}
        assert np.count_nonzero(values) > 0


class TestChiralityAndVorticity:
    """Relations between chirality and the vorticity of the auxiliary field."""

    def test_positive_ground_state_has_no_vortices(self):
        u = ground_state(Disk((0, 0), 1), 0.1)
        assert len(vorticity_measure(to_auxiliary(u), Disk((0, 0), 1))) == 0
        assert chirality_vorticity_implications(u, Disk((0, 0), 1)).ok

    def test_negative_ground_state_charges_every_triangle(self):
        disk = Disk((0, 0), 1)
        u = ground_state(disk, 0.1, chirality_sign=-1)
        triangles = triangle_set(disk, 0.1)
        mu = vorticity_measure(to_auxiliary(u), triangles)
        assert mu.mass() == len(triangles)
        report = chirality_vorticity_implications(u, triangles)
        assert report.ok
        assert report.charged == len(triangles)

    def test_random_field(self, random_field, unit_square):
        report = chirality_vorticity_implications(random_field, unit_square)
        assert report.ok

    def test_tight_threshold_is_reported(self):
        # uncharged triangle with jumps (-pi + 0.01, pi/2, pi/2 - 0.01) of the auxiliary field
        v = one_triangle(0.0, -math.pi + 0.01, -math.pi / 2 + 0.01)
        u = SpinField.from_sites(1.0, {
            (0, 0): 0.0,
            (1, 0): v[LatticeIndex(1, 0)] + THIRD_TURN,
            (0, 1): v[LatticeIndex(0, 1)] - THIRD_TURN,
        })
        assert vorticity(to_auxiliary(u), UP) == 0
        assert chirality_vorticity_implications(u, UP).ok
        assert not chirality_vorticity_implications(u, UP, eta_prime=0.5).ok

    def test_mass_bound(self, random_field, unit_square):
        report = mass_bound_check(random_field, unit_square)
        assert report.violations == []
        assert report.ratio <= 9 / 8

    def test_rough_bound(self):
        u = ground_state(Disk((0, 0), 1), 0.1)
        assert rough_xy_bound_check(u, UP) == 1.0
        charged = ground_state(Disk((0, 0), 1), 0.1, chirality_sign=-1)
        with pytest.raises(PreconditionError):
            rough_xy_bound_check(charged, UP)


class TestVorticityMeasure:
    """Vorticity measures of sampled vortices."""

    def test_recovery_field_of_a_vortex(self, unit_square):
        eps = 1.0 / 16.0
        mu = AtomicMeasure([((0.5, 0.5), 1)])
        v = to_auxiliary(build_recovery(mu, eps, unit_square))
        mu_v = vorticity_measure(v, unit_square)
        assert mu_v.total() == 1
        assert flat_norm(mu_v - mu, unit_square) <= 3 * eps

    def test_far_from_the_vortex_nothing_is_charged(self, unit_square):
        mu = AtomicMeasure([((0.5, 0.5), 1)])
        v = to_auxiliary(build_recovery(mu, 1.0 / 32.0, unit_square))
        assert len(vorticity_measure(v, Annulus((0.5, 0.5), 0.1, 0.45))) == 0

    def test_measure_is_sorted_and_at_barycenters(self, random_field, unit_square):
        mu = vorticity_measure(random_field, unit_square)
        for T, (position, charge) in zip(mu.triangles, mu.atoms):
            assert position == pytest.approx(T.barycenter(random_field.eps))
            assert charge == mu.by_triangle()[T]


class TestWindingNumber:
    """Degree of a field along a closed loop."""

    @pytest.mark.parametrize("degree", [-2, -1, 0, 1, 3])
    def test_power_of_the_vortex(self, degree):
        def field(points):
            theta = degree * np.arctan2(points[:, 1], points[:, 0])
            return np.stack([np.cos(theta), np.sin(theta)], axis=1)

        assert winding_number(circle_loop((0, 0), 1.0, 64), field) == degree

    def test_undersampled_loop(self):
        def field(points):
            theta = 2 * np.arctan2(points[:, 1], points[:, 0])
            return np.stack([np.cos(theta), np.sin(theta)], axis=1)

        with pytest.raises(UnderSamplingError):
            winding_number(circle_loop((0, 0), 1.0, 4), field)
