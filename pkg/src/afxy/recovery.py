"""Recovery sequences: spin fields realising a prescribed vortex measure.

For mu = sum d_h delta_{x_h} the auxiliary field is the product of the
vortices ((x - x_h) / |x - x_h|)^{d_h}, sampled at the lattice points after
moving each x_h to its nearest lattice point. The AFXY field is obtained by
undoing the sublattice rotations.
"""

import itertools
import logging
import math
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np

from afxy.data.lattice import locate
from afxy.data.measures import AtomicMeasure
from afxy.data.region import Annulus, Region
from afxy.data.spinfield import SpinField
from afxy.energy import from_auxiliary, sample_from_continuum, sampled_xy_energy
from afxy.exceptions import PreconditionError
from afxy.utils import SQRT3, TWO_PI

# O(1) constant C in XY_eps(annulus) <= 2 sqrt3 pi d^2 eps^2 log(R/r) + C d^2 eps^2
VORTEX_EXCESS_CONSTANT = 10.0

logger = logging.getLogger("afxy.recovery")

Point = Tuple[float, float]
PhaseFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


def vortex_phase(mu: AtomicMeasure) -> Tuple[PhaseFunction, List[Point]]:
    """Return the phase sum_h d_h atan2(y - y_h, x - x_h) and its singular points."""
    atoms = list(mu)

    def phase(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        total = np.zeros(np.broadcast(x, y).shape)
        for (cx, cy), d in atoms:
            total = total + d * np.arctan2(y - cy, x - cx)
        return total

    return phase, [p for p, _ in atoms]


def nearest_site(point, eps: float) -> Tuple[int, int]:
    """Nearest lattice index to a point; ties go to the lexicographically smallest index."""
    triangles, bary = locate(np.asarray(point, dtype=float), eps)
    v1, v2 = triangles.vertices()
    best = bary[0].max()
    candidates = [
        (int(v1[0, k]), int(v2[0, k])) for k in range(3) if bary[0, k] >= best - 1e-12
    ]
    return min(candidates)


def snap_to_lattice(mu: AtomicMeasure, eps: float) -> AtomicMeasure:
    """Move every atom to its nearest lattice point."""
    snapped = []
    for position, charge in mu:
        a, b = nearest_site(position, eps)
        snapped.append(((eps * (a + 0.5 * b), eps * SQRT3 / 2.0 * b), charge))
    return AtomicMeasure(snapped)


def separation_radius(mu: AtomicMeasure) -> float:
    """A quarter of the smallest distance between atoms; infinite for one atom."""
    positions = mu.positions()
    if len(positions) < 2:
        return math.inf
    return min(
        math.dist(p, q) for p, q in itertools.combinations(positions.tolist(), 2)
    ) / 4.0


def split_multiplicity(mu: AtomicMeasure, n: int) -> AtomicMeasure:
    """Replace every atom of charge d by |d| unit atoms on a regular |d|-gon of radius 1/(2n).

    Unit atoms stay in place.

    Args:
        mu (AtomicMeasure): measure to split
        n (int): n >= 1; all new atoms lie in B_{1/n}(x_h)

    Returns:
        AtomicMeasure: measure with unit charges and the same mass
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    atoms = []
    for (cx, cy), d in mu:
        if abs(d) == 1:
            atoms.append(((cx, cy), d))
            continue
        radius = 1.0 / (2.0 * n)
        sign = 1 if d > 0 else -1
        for k in range(abs(d)):
            angle = TWO_PI * k / abs(d)
            atoms.append(((cx + radius * math.cos(angle), cy + radius * math.sin(angle)), sign))
    split = AtomicMeasure(atoms)
    if split.mass() != mu.mass():
        raise PreconditionError(f"Splitting with n={n} made atoms collide")
    return split


def build_recovery(
    mu: AtomicMeasure, eps: float, region: Region, split: Optional[int] = None
) -> SpinField:
    """Build the recovery field u_eps of a vortex measure.

    Args:
        mu (AtomicMeasure): atoms strictly inside the region
        eps (float): lattice spacing
        region (Region): domain
        split (int, optional): n used to split atoms of multiplicity |d| > 1;
            defaults to floor(eps^{-1/2})

    Raises:
        PreconditionError: an atom is not strictly inside the region, or two
            atoms are closer than 4 eps

    Returns:
        SpinField: AFXY field whose auxiliary field has vorticity close to mu
    """
    if eps <= 0:
        raise ValueError("Lattice spacing must be positive")
    if any(abs(d) > 1 for _, d in mu):
        n = split if split is not None else max(1, int(math.floor(eps ** -0.5)))
        logger.debug("Splitting atoms of multiplicity > 1 with n=%d", n)
        mu = split_multiplicity(mu, n)
    for position, _ in mu:
        if not region.contains(position) or region.distance_to_boundary(position) <= 0:
            raise PreconditionError(f"Atom {position} is not strictly inside {region}")
    # separation_radius is a quarter of the smallest distance
    if separation_radius(mu) <= eps:
        raise PreconditionError(f"Atoms closer than 4 eps={4 * eps:.6g}; their 2 eps balls overlap")
    snapped = snap_to_lattice(mu, eps)
    if len(snapped) != len(mu):
        raise PreconditionError("Two atoms snap to the same lattice point")
    logger.debug("Recovery field for %d atoms at eps=%g, r=%g", len(mu), eps, separation_radius(mu))
    phase, singular = vortex_phase(snapped)
    return from_auxiliary(sample_from_continuum(phase, eps, region, singular))


class VortexBound(NamedTuple):
    """XY energy of a sampled vortex on an annulus against 2 sqrt3 pi d^2 eps^2 log(R/r)."""

    measured: float
    bound: float
    leading: float

    @property
    def excess(self) -> float:
        """measured - leading; divided by eps^2 it stays bounded as eps decreases."""
        return self.measured - self.leading

    @property
    def ok(self) -> bool:
        return self.measured <= self.bound


def vortex_xy_bound_check(d: int, r: float, R: float, eps: float, rows_per_chunk: int = 32) -> VortexBound:
    """Measure XY_eps((x/|x|)^d, A(0, r, R)).

    The bound is the leading term 2 sqrt3 pi d^2 eps^2 log(R/r) plus
    VORTEX_EXCESS_CONSTANT d^2 eps^2, independent of the measurement, so
    `ok` is a real test of the annulus estimate.

    Raises:
        PreconditionError: r < 2 eps or R < r
    """
    if not 2 * eps <= r <= R:
        raise PreconditionError(f"Need 2 eps <= r <= R, got eps={eps}, r={r}, R={R}")
    leading = 2.0 * SQRT3 * math.pi * d * d * eps * eps * math.log(R / r)
    if r == R:
        return VortexBound(0.0, 0.0, 0.0)
    measured = sampled_xy_energy(
        lambda x, y: d * np.arctan2(y, x), eps, Annulus((0.0, 0.0), r, R), [(0.0, 0.0)], rows_per_chunk
    )
    return VortexBound(measured, leading + VORTEX_EXCESS_CONSTANT * d * d * eps * eps, leading)
