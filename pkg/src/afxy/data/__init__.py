"""This module contains datatypes for afxy.
"""
from . import balls, lattice, measures, region, spinfield

from .balls import Ball, BallFamily
from .lattice import (
    LatticeIndex, Orientation, TriangleId, TriangleSet,
    to_cartesian, sublattice, neighbors, triangles_at, locate,
)
from .measures import AtomicMeasure, VorticityMeasure
from .region import (
    Region, Rectangle, Disk, Annulus,
    region_from_dict, triangles_in, triangle_set, triangles_meeting,
)
from .spinfield import SpinField
