"""This module contains afxy experiments.

An experiment tabulates a quantity over a list of lattice spacings and can
check the table against the asymptotic behaviour it is meant to exhibit.
"""

from . import experiment, minima, runner, scaling, selftest

from .experiment import Experiment
from .minima import DegreeConstrainedMinima, degree_constrained_minimization
from .runner import eps_range, run_cells, write_table
from .scaling import (
    AnnulusUpperBound, BulkScaling, Phase, VortexScaling,
    dirichlet_reference, fit_log_slope, phase_from_dict,
)
from .selftest import CheckResult, run_selftest
