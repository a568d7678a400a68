"""This module contains afxy strategies.

A strategy is one constructive device that transforms a spin field or a
family of balls.
"""

from . import annihilation, ball_construction, extension, lifting, relaxation

from .strategy import Strategy
from .annihilation import DipoleAnnihilation
from .ball_construction import BallConstruction, BallReport, merge_cluster, verify_properties
from .extension import ZeroDegreeExtension, extension_ratio, sampling_shift
from .lifting import AnnulusLifting
from .relaxation import ConstrainedRelaxation
