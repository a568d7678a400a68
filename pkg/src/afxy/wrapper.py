"""This module provides helpful wrapper functions for using afxy.

Each function accepts the loose input forms used on the command line and in
notebooks (JSON dictionaries for regions, lists of atoms for measures,
(center, radius) pairs for balls), converts them to afxy's types and runs
the corresponding strategy or experiment.
"""

import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from afxy.config import Config
from afxy.data import AtomicMeasure, Annulus, Ball, BallFamily, Region, SpinField, region_from_dict
from afxy.experiment import BulkScaling, Phase, VortexScaling, phase_from_dict
from afxy.experiment.scaling import numeric_phase
from afxy.strategy import (
    AnnulusLifting,
    BallConstruction,
    DipoleAnnihilation,
    ZeroDegreeExtension,
)

logger = logging.getLogger("afxy.Wrapper")

# Define types that can be converted to afxy's internal types
Point = Tuple[float, float]
RegionLike = Union[Region, Dict]
AtomLike = Union[Dict, Tuple[Point, int]]
MeasureLike = Union[AtomicMeasure, Sequence[AtomLike]]
BallLike = Union[Ball, Tuple[Point, float]]
PhaseLike = Union[Phase, Dict, str, Callable]


def parse_region(region: RegionLike) -> Region:
    """Return a Region from a Region or its JSON description.

    Raises:
        TypeError: region is not of a recognized type.
    """
    if isinstance(region, Region):
        return region
    if isinstance(region, dict):
        return region_from_dict(region)
    raise TypeError(f"Cannot interpret {type(region).__name__} as a region")


def parse_measure(mu: MeasureLike) -> AtomicMeasure:
    """Return an AtomicMeasure from a measure, a list of atom dictionaries or (position, charge) pairs."""
    if isinstance(mu, AtomicMeasure):
        return mu
    items = list(mu)
    if all(isinstance(item, dict) for item in items):
        return AtomicMeasure.from_list(items)
    return AtomicMeasure(items)


def parse_phase(phase: PhaseLike) -> Phase:
    """Return a Phase from a Phase, a builtin name, its JSON description or a plain function."""
    if isinstance(phase, Phase):
        return phase
    if isinstance(phase, str):
        return phase_from_dict({"kind": phase})
    if isinstance(phase, dict):
        return phase_from_dict(phase)
    if callable(phase):
        return numeric_phase(phase)
    raise TypeError(f"Cannot interpret {type(phase).__name__} as a phase")


def lift_annulus(v: SpinField, annulus: RegionLike, config: Optional[Config] = None) -> SpinField:
    """Lift the auxiliary field to a single-valued phase on an annulus.

    Raises:
        MonodromyError: the field has nonzero degree around the hole
    """
    return AnnulusLifting(v, parse_region(annulus), config).run()


def ball_construct(
    initial: Sequence[BallLike],
    mu: MeasureLike,
    sigma: float,
    query_times: Sequence[float],
    config: Optional[Config] = None,
) -> List[BallFamily]:
    """Run the ball construction from disjoint initial balls.

    Args:
        initial (Sequence[Ball | (center, radius)]): pairwise disjoint balls
        mu (MeasureLike): measure supported in the initial balls
        sigma (float): inflation
        query_times (Sequence[float]): times at which the family is reported

    Returns:
        List[BallFamily]: one family per query time, in increasing time order
    """
    return BallConstruction(initial, parse_measure(mu), sigma, query_times, config).run()


def extend_zero_degree(v: SpinField, annulus: RegionLike, config: Optional[Config] = None) -> SpinField:
    """Replace v inside an annulus's hole by a vortex-free field."""
    annulus = parse_region(annulus)
    if not isinstance(annulus, Annulus):
        raise TypeError("extend_zero_degree needs an annulus")
    return ZeroDegreeExtension(v, annulus, config).run()


def annihilate_dipoles(
    u: SpinField, region: RegionLike, sigma: Optional[float] = None, config: Optional[Config] = None
) -> SpinField:
    """Remove the neutral vortex clusters of an AFXY field."""
    return DipoleAnnihilation(u, parse_region(region), sigma, config).run()


def bulk_scaling(
    phase_fn: PhaseLike, region: RegionLike, eps_list: Sequence[float], config: Optional[Config] = None
) -> pd.DataFrame:
    """Tabulate E_eps / eps^2 of sampled smooth fields against sqrt3 times the Dirichlet integral."""
    experiment = BulkScaling(parse_phase(phase_fn), parse_region(region), eps_list, config)
    table = experiment.run()
    logger.info("Bulk scaling: final gap %.4g", experiment.summary["final_gap"])
    return table


def vortex_scaling(
    mu: MeasureLike,
    region: RegionLike,
    eps_list: Sequence[float],
    split: Optional[int] = None,
    config: Optional[Config] = None,
) -> Tuple[pd.DataFrame, Dict]:
    """Tabulate the recovery-field energies of a measure; returns the table and its summary."""
    experiment = VortexScaling(parse_measure(mu), parse_region(region), eps_list, split, config)
    table = experiment.run()
    return table, experiment.summary
