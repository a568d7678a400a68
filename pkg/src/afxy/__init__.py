"""
This module provides spin fields, energies, vorticity and vortex constructions
for the antiferromagnetic XY model on the triangular lattice.
"""

from . import config, energy, exceptions, interpolation, recovery, utils, vorticity
from .data import (
    AtomicMeasure,
    Annulus,
    Ball,
    BallFamily,
    Disk,
    Rectangle,
    Region,
    SpinField,
    TriangleId,
    VorticityMeasure,
)
from .config import Config, load_config
from .energy import energy_afxy, energy_xy, from_auxiliary, to_auxiliary
from .vorticity import flat_norm, vorticity_measure, winding_number
from .recovery import build_recovery
from .wrapper import (
    annihilate_dipoles,
    ball_construct,
    bulk_scaling,
    extend_zero_degree,
    lift_annulus,
    vortex_scaling,
)
from .experiment import degree_constrained_minimization, fit_log_slope
