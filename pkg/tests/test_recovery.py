import math

import numpy as np
import pytest

from afxy.data import AtomicMeasure, Disk, Rectangle
from afxy.energy import energy_afxy, to_auxiliary
from afxy.exceptions import PreconditionError
from afxy.recovery import (
    build_recovery, nearest_site, separation_radius, snap_to_lattice, split_multiplicity,
    VORTEX_EXCESS_CONSTANT, VortexBound, vortex_phase, vortex_xy_bound_check,
)
from afxy.utils import SQRT3
from afxy.vorticity import flat_norm, vorticity_measure

SQUARE = Rectangle((0.0, 0.0), (1.0, 1.0))


def test_vortex_phase():
    phase, singular = vortex_phase(AtomicMeasure([((0.0, 0.0), 1), ((1.0, 0.0), -2)]))
    assert singular == [(0.0, 0.0), (1.0, 0.0)]
    assert phase(0.0, 1.0) == pytest.approx(math.pi / 2 - 2 * (3 * math.pi / 4))


@pytest.mark.parametrize("point, site", [
    ((0.26, 0.0), (1, 0)),
    ((0.24, 0.0), (0, 0)),
    ((0.25, 0.4), (0, 1)),
    ((-0.1, -0.05), (0, 0)),
])
def test_nearest_site(point, site):
    assert nearest_site(point, 0.5) == site


def test_snap_to_lattice():
    snapped = snap_to_lattice(AtomicMeasure([((0.26, 0.01), 1)]), 0.5)
    assert snapped.atoms == [((0.5, 0.0), 1)]


def test_separation_radius():
    assert separation_radius(AtomicMeasure([((0, 0), 1)])) == math.inf
    assert separation_radius(AtomicMeasure([((0, 0), 1), ((1, 0), -1), ((3, 0), 1)])) == pytest.approx(0.25)


class TestSplitMultiplicity:
    """Splitting of atoms with charge of modulus above one."""

    def test_double_atom(self):
        split = split_multiplicity(AtomicMeasure([((0.5, 0.5), 2)]), 4)
        assert split.mass() == 2 and split.total() == 2
        assert all(math.dist(p, (0.5, 0.5)) == pytest.approx(0.125) for p, _ in split)

    def test_negative_triple(self):
        split = split_multiplicity(AtomicMeasure([((0.0, 0.0), -3)]), 2)
        assert sorted(q for _, q in split) == [-1, -1, -1]

    def test_unit_atoms_stay(self):
        mu = AtomicMeasure([((0.2, 0.3), 1)])
        assert split_multiplicity(mu, 3) == mu

    def test_needs_positive_n(self):
        with pytest.raises(ValueError):
            split_multiplicity(AtomicMeasure([((0, 0), 2)]), 0)


class TestBuildRecovery:
    """Recovery fields of atomic measures."""

    def test_single_vortex(self):
        eps = 1.0 / 32.0
        mu = AtomicMeasure([((0.5, 0.5), 1)])
        u = build_recovery(mu, eps, SQUARE)
        mu_v = vorticity_measure(to_auxiliary(u), SQUARE)
        assert mu_v.mass() == 1 and mu_v.total() == 1
        assert flat_norm(mu_v - mu, SQUARE) <= 2 * eps

    def test_energy_grows_with_the_mass(self):
        eps = 1.0 / 32.0
        one = energy_afxy(build_recovery(AtomicMeasure([((0.5, 0.5), 1)]), eps, SQUARE), SQUARE)
        two = energy_afxy(
            build_recovery(AtomicMeasure([((0.3, 0.5), 1), ((0.7, 0.5), -1)]), eps, SQUARE), SQUARE
        )
        assert two > one > 0

    def test_multiplicity_is_split(self):
        eps = 1.0 / 64.0
        u = build_recovery(AtomicMeasure([((0.5, 0.5), 2)]), eps, SQUARE, split=4)
        mu_v = vorticity_measure(to_auxiliary(u), SQUARE)
        assert mu_v.total() == 2

    def test_atom_on_the_boundary(self):
        with pytest.raises(PreconditionError):
            build_recovery(AtomicMeasure([((0.0, 0.5), 1)]), 0.05, SQUARE)

    def test_atoms_too_close(self):
        with pytest.raises(PreconditionError):
            build_recovery(AtomicMeasure([((0.5, 0.5), 1), ((0.55, 0.5), -1)]), 0.05, SQUARE)

    def test_disk_domain(self):
        disk = Disk((0.0, 0.0), 1.0)
        u = build_recovery(AtomicMeasure([((0.1, -0.2), -1)]), 0.05, disk)
        assert vorticity_measure(to_auxiliary(u), disk).total() == -1


class TestVortexBound:
    """XY energy of a sampled vortex on an annulus."""

    def test_leading_term(self):
        bound = vortex_xy_bound_check(1, 0.25, 0.5, 1.0 / 64.0)
        eps2 = (1.0 / 64.0) ** 2
        assert bound.leading == pytest.approx(2 * SQRT3 * math.pi * math.log(2) * eps2)
        assert bound.measured > 0
        assert bound.bound == pytest.approx(bound.leading + VORTEX_EXCESS_CONSTANT * eps2)
        assert bound.ok
        assert abs(bound.excess) / eps2 <= 10

    @pytest.mark.parametrize("d", [1, -2, 3])
    @pytest.mark.parametrize("eps", [1.0 / 32.0, 1.0 / 64.0])
    def test_bound_holds_with_a_fixed_constant(self, d, eps):
        bound = vortex_xy_bound_check(d, 0.25, 0.5, eps)
        assert bound.bound - bound.leading == pytest.approx(VORTEX_EXCESS_CONSTANT * d * d * eps * eps)
        assert bound.ok

    def test_bound_can_fail(self):
        assert not VortexBound(measured=2.0, bound=1.5, leading=1.0).ok

    def test_degree_two_scales_quadratically(self):
        eps = 1.0 / 64.0
        one = vortex_xy_bound_check(1, 0.25, 0.5, eps).measured
        two = vortex_xy_bound_check(2, 0.25, 0.5, eps).measured
        assert two / one == pytest.approx(4.0, rel=0.05)

    def test_empty_annulus(self):
        assert vortex_xy_bound_check(1, 0.3, 0.3, 0.1) == (0.0, 0.0, 0.0)

    def test_inner_radius_too_small(self):
        with pytest.raises(PreconditionError):
            vortex_xy_bound_check(1, 0.05, 0.5, 0.1)


def test_single_vortex_energy_per_log(unit_square):
    # E / eps^2 between the two spacings grows by about 2 sqrt3 pi log 2
    coarse, fine = 1.0 / 32.0, 1.0 / 64.0
    mu = AtomicMeasure([((0.5, 0.5), 1)])
    e_coarse = energy_afxy(build_recovery(mu, coarse, unit_square), unit_square) / coarse**2
    e_fine = energy_afxy(build_recovery(mu, fine, unit_square), unit_square) / fine**2
    growth = (e_fine - e_coarse) / np.log(2.0)
    assert growth == pytest.approx(2 * SQRT3 * math.pi, rel=0.25)
