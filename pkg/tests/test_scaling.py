import math

import numpy as np
import pytest

from afxy.data import AtomicMeasure, Annulus, Disk, Rectangle
from afxy.exceptions import PreconditionError
from afxy.experiment import AnnulusUpperBound, BulkScaling, VortexScaling
from afxy.experiment.scaling import (
    VORTEX_CONSTANT, constant_phase, dirichlet_reference, fit_log_slope, linear_phase,
    numeric_phase, phase_from_dict, sine_phase,
)

SQUARE = Rectangle((0.0, 0.0), (1.0, 1.0))


class TestFitLogSlope:
    """Least-squares slope of E / eps^2 against log(1 / eps)."""

    def test_exact_data(self):
        rows = [(2.0**-k, 2.0 ** (-2 * k) * (10.883 * k * math.log(2) + 3.0)) for k in range(4, 9)]
        slope, intercept, r2 = fit_log_slope(rows)
        assert slope == pytest.approx(10.883, abs=1e-9)
        assert intercept == pytest.approx(3.0, abs=1e-8)
        assert r2 == pytest.approx(1.0)

    def test_needs_three_rows(self):
        with pytest.raises(PreconditionError):
            fit_log_slope([(0.1, 1.0), (0.05, 1.0)])

    def test_needs_distinct_eps(self):
        with pytest.raises(PreconditionError):
            fit_log_slope([(0.1, 1.0)] * 3)


class TestPhases:
    """Builtin phases and their Dirichlet references."""

    def test_from_dict(self):
        phase = phase_from_dict({"kind": "linear", "a": [1.0, 0.0]})
        assert phase(2.0, 5.0) == pytest.approx(2.0)
        assert phase.to_dict() == {"kind": "linear", "a": [1.0, 0.0], "b": 0.0}
        assert phase_from_dict({"kind": "Sine", "k": 2}).params == {"k": 2.0}

    @pytest.mark.parametrize("description", [{"kind": "spiral"}, {}, {"kind": "linear", "c": 1}])
    def test_bad_descriptions(self, description):
        with pytest.raises(PreconditionError):
            phase_from_dict(description)

    def test_numeric_gradient(self):
        phase = numeric_phase(lambda x, y: np.sin(x) * y)
        gx, gy = phase.grad(np.array([0.3]), np.array([2.0]))
        assert gx[0] == pytest.approx(math.cos(0.3) * 2.0, rel=1e-6)
        assert gy[0] == pytest.approx(math.sin(0.3), rel=1e-6)

    def test_linear_reference(self):
        assert dirichlet_reference(linear_phase((1.0, 2.0)), SQUARE) == pytest.approx(5 * math.sqrt(3))
        disk = Disk((0.2, 0.1), 0.5)
        assert dirichlet_reference(linear_phase((1.0, 2.0)), disk) == pytest.approx(
            5 * math.sqrt(3) * math.pi * 0.25, rel=1e-7
        )

    def test_sine_reference(self):
        assert dirichlet_reference(sine_phase(1.0), SQUARE) == pytest.approx(math.sqrt(3) * 2 * math.pi**2, rel=1e-7)

    def test_annulus_reference(self):
        annulus = Annulus((0.0, 0.0), 0.5, 1.0)
        assert dirichlet_reference(linear_phase((1.0, 0.0)), annulus) == pytest.approx(
            math.sqrt(3) * math.pi * 0.75, rel=1e-7
        )

    def test_constant_reference(self):
        assert dirichlet_reference(constant_phase(1.0), SQUARE) == 0.0


class TestBulkScaling:
    """Energies of sampled smooth fields."""

    def test_table(self):
        experiment = BulkScaling(linear_phase(), SQUARE, [2.0**-3, 2.0**-4, 2.0**-5])
        table = experiment.run()
        assert list(table.columns) == BulkScaling.columns
        assert list(table["eps"]) == [0.125, 0.0625, 0.03125]
        assert np.allclose(table["reference"], 5 * math.sqrt(3))
        gaps = table["gap"].tolist()
        assert gaps[-1] < gaps[0]
        assert experiment.summary["final_gap"] == gaps[-1]

    def test_constant_phase(self):
        table = BulkScaling(constant_phase(0.7), SQUARE, [0.1, 0.05]).run()
        assert np.allclose(table["energy_per_eps2"], 0.0, atol=1e-12)

    @pytest.mark.slow
    def test_convergence(self):
        experiment = BulkScaling(linear_phase(), SQUARE, [2.0**-k for k in range(4, 9)])
        table = experiment.run()
        assert experiment.check(table)
        assert table["gap"].iloc[-1] < 0.03


class TestVortexScaling:
    """Logarithmic growth of recovery-field energies."""

    def test_table(self):
        mu = AtomicMeasure([((0.5, 0.5), 1)])
        experiment = VortexScaling(mu, SQUARE, [2.0**-3, 2.0**-4, 2.0**-5])
        table = experiment.run()
        assert list(table.columns) == VortexScaling.columns
        assert (table["mass"] == 1).all()
        assert experiment.summary["expected_slope"] == pytest.approx(VORTEX_CONSTANT)
        assert "slope" in experiment.summary

    @pytest.mark.slow
    def test_single_vortex(self):
        mu = AtomicMeasure([((0.5, 0.5), 1)])
        experiment = VortexScaling(mu, SQUARE, [2.0**-k for k in range(5, 10)])
        table = experiment.run()
        assert experiment.summary["slope_error"] <= 0.1
        assert experiment.check(table)

    @pytest.mark.slow
    def test_double_vortex_with_fixed_split(self):
        mu = AtomicMeasure([((0.5, 0.5), 2)])
        experiment = VortexScaling(mu, SQUARE, [2.0**-k for k in range(5, 10)], split=4)
        experiment.run()
        assert experiment.summary["expected_slope"] == pytest.approx(2 * VORTEX_CONSTANT)
        assert experiment.summary["slope_error"] <= 0.1


class TestAnnulusUpperBound:
    """XY energy of a sampled vortex on an annulus."""

    def test_table(self):
        experiment = AnnulusUpperBound(1, 0.25, 0.5, [2.0**-4, 2.0**-5, 2.0**-6])
        table = experiment.run()
        assert list(table.columns) == AnnulusUpperBound.columns
        assert np.allclose(table["leading_per_eps2"], VORTEX_CONSTANT * math.log(2))
        assert experiment.summary["max_abs_excess"] <= 10

    @pytest.mark.slow
    def test_excess_stays_bounded(self):
        experiment = AnnulusUpperBound(1, 0.25, 0.5, [2.0**-k for k in range(7, 13)])
        assert experiment.check(experiment.run())
