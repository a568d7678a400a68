import math

import numpy as np
import pytest

from afxy.data import Annulus, Disk, SpinField
from afxy.data.lattice import HEIGHT
from afxy.energy import energy_xy, sample_from_continuum
from afxy.exceptions import MonodromyError, PreconditionError
from afxy.experiment.selftest import smooth_phase
from afxy.strategy import ZeroDegreeExtension, extension_ratio, sampling_shift
from afxy.strategy.extension import shift_candidates
from afxy.utils import unit_vectors
from afxy.vorticity import vorticity_measure

EPS = 0.125
ANNULUS = Annulus((0.0, 0.0), 5.0, 10.0)
FIELD_REGION = Disk((0.0, 0.0), 10.5)


@pytest.fixture
def extension_config(config):
    # the smallness condition needs far finer lattices than a unit test affords
    return config.replace(extension_c0=1.0, sampling_grid=4)


def dipole(x, y):
    return np.arctan2(y, x + 0.5) - np.arctan2(y, x - 0.5)


def in_base_triangle(shift, eps):
    t = shift[1] / (HEIGHT * eps)
    s = shift[0] / eps - 0.5 * t
    return s > 0 and t > 0 and s + t < 1


class TestSamplingShift:
    """Choice of the sampling offset."""

    def test_candidates_lie_in_the_base_triangle(self):
        candidates = shift_candidates(0.5, 6)
        assert len(candidates) == 15
        assert all(in_base_triangle(c, 0.5) for c in candidates)

    def test_constant_field(self, config):
        shift = sampling_shift(
            lambda pts: unit_vectors(np.zeros(len(pts))), 0.1, Disk((0, 0), 1.0), Disk((0, 0), 2.0), config
        )
        assert in_base_triangle(shift, 0.1)

    def test_samples_must_stay_in_the_outer_region(self, config):
        with pytest.raises(PreconditionError):
            sampling_shift(
                lambda pts: unit_vectors(np.zeros(len(pts))), 0.1, Disk((0, 0), 1.0), Disk((0, 0), 1.0), config
            )


class TestZeroDegreeExtension:
    """Vortex-free replacement of a field inside a disk."""

    def test_constant_field(self, extension_config):
        v = SpinField.constant(EPS, FIELD_REGION, theta=0.3)
        strategy = ZeroDegreeExtension(v, ANNULUS, extension_config)
        out = strategy.run()
        assert strategy.layer == 1
        assert 5.0 < strategy.rho < 10.0
        assert strategy.mean_phase == pytest.approx(0.3)
        assert energy_xy(out, Disk((0, 0), 10.0)) == pytest.approx(0.0, abs=1e-20)
        assert extension_ratio(v, out, ANNULUS) == 0.0

    def test_dipole_is_removed(self, extension_config):
        v = sample_from_continuum(dipole, EPS, FIELD_REGION, [(-0.5, 0.0), (0.5, 0.0)])
        before = vorticity_measure(v, Disk((0, 0), 1.0))
        assert before.mass() >= 2 and before.total() == 0
        strategy = ZeroDegreeExtension(v, ANNULUS, extension_config)
        out = strategy.run()
        assert len(vorticity_measure(out, Disk((0, 0), 10.0))) == 0
        assert math.isfinite(extension_ratio(v, out, ANNULUS))

        # nothing moves outside the chosen disk
        z1, z2 = v.sites()
        points = v.site_points()[z1 - v.origin[0], z2 - v.origin[1]]
        far = np.hypot(points[:, 0], points[:, 1]) > strategy.rho + EPS
        assert np.array_equal(out.phase_at(z1[far], z2[far]), v.phase_at(z1[far], z2[far]))

    def test_vortex_cannot_be_removed(self, extension_config):
        v = sample_from_continuum(lambda x, y: np.arctan2(y, x), EPS, FIELD_REGION, [(0.0, 0.0)])
        with pytest.raises(MonodromyError):
            ZeroDegreeExtension(v, ANNULUS, extension_config).run()

    def test_smallness_is_enforced(self, config):
        v = sample_from_continuum(lambda x, y: np.arctan2(y, x), EPS, FIELD_REGION, [(0.0, 0.0)])
        with pytest.raises(PreconditionError) as info:
            ZeroDegreeExtension(v, ANNULUS, config).run()
        assert not isinstance(info.value, MonodromyError)

    def test_energy_budget(self, random_field, extension_config):
        with pytest.raises(PreconditionError):
            ZeroDegreeExtension(random_field, Annulus((0.5, 0.5), 0.1, 0.45), extension_config).run()

    def test_thin_annulus(self, extension_config):
        v = SpinField.constant(EPS, FIELD_REGION)
        with pytest.raises(PreconditionError):
            ZeroDegreeExtension(v, Annulus((0, 0), 1.0, 1.5), extension_config).run()

    def test_needs_an_annulus(self):
        with pytest.raises(TypeError):
            ZeroDegreeExtension(SpinField.constant(EPS, FIELD_REGION), Disk((0, 0), 1.0))


class TestExtensionOfSmoothFields:
    """Extension of degree zero fields across spacings."""

    SMALL = Annulus((0.0, 0.0), 1.0, 2.0)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    @pytest.mark.parametrize(
        "eps", [0.025, 0.0125, pytest.param(0.00625, marks=pytest.mark.slow)]
    )
    def test_ratio_stays_bounded(self, extension_config, seed, eps):
        v = sample_from_continuum(smooth_phase(np.random.default_rng(seed)), eps, Disk((0.0, 0.0), 2.5))
        strategy = ZeroDegreeExtension(v, self.SMALL, extension_config)
        out = strategy.run()

        ratio = extension_ratio(v, out, self.SMALL)
        assert 0 <= ratio < 10
        assert len(vorticity_measure(out, self.SMALL.outer_disk())) == 0

        # sites beyond the outermost admissible radius keep their phase
        z1, z2 = v.sites()
        points = v.site_points()[z1 - v.origin[0], z2 - v.origin[1]]
        far = np.hypot(points[:, 0], points[:, 1]) > 1.0 + 3.0 / 8.0
        assert np.array_equal(out.phase_at(z1[far], z2[far]), v.phase_at(z1[far], z2[far]))
        assert strategy.rho <= 1.0 + 3.0 / 8.0
