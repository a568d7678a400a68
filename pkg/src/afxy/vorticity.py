"""Discrete vorticity, the flat norm of atomic measures and winding numbers."""

from dataclasses import dataclass, field
import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment, linprog

from afxy.config import Config, default_config
from afxy.data.lattice import TriangleId, TriangleSet
from afxy.data.measures import AtomicMeasure, VorticityMeasure
from afxy.data.region import Region
from afxy.data.spinfield import SpinField
from afxy.energy import (
    Where, afxy_densities, as_triangles, chirality_values, to_auxiliary, xy_densities,
)
from afxy.exceptions import PreconditionError, UnderSamplingError
from afxy.utils import TWO_PI, angle_diff, stable_sum

logger = logging.getLogger("afxy.vorticity")


def vorticity_values(v: SpinField, triangles: TriangleSet) -> np.ndarray:
    """mu_v(T) in {-1, 0, 1} for each triangle, vertices taken counterclockwise."""
    theta = v.vertex_phases(triangles)
    jumps = angle_diff(theta, np.roll(theta, -1, axis=1))
    return np.rint(jumps.sum(axis=1) / TWO_PI).astype(int)


def vorticity(v: SpinField, T: TriangleId) -> int:
    """Return the discrete vorticity of v on T.

    Args:
        v (SpinField): auxiliary spin field
        T (TriangleId): triangle

    Returns:
        int: (1/2pi)(d(x1,x2) + d(x2,x3) + d(x3,x1)) for counterclockwise x1, x2, x3
    """
    return int(vorticity_values(v, TriangleSet.from_ids([T]))[0])


def vorticity_measure(v: SpinField, where: Where) -> VorticityMeasure:
    """Collect the nonzero charges of v at the barycenters of the triangles of a region."""
    triangles = as_triangles(where, v.eps).sorted()
    charges = vorticity_values(v, triangles)
    charged = charges != 0
    return VorticityMeasure(list(triangles[charged]), charges[charged].tolist(), v.eps)


# flat norm

def _boundary_costs(mu: AtomicMeasure, region: Region) -> np.ndarray:
    costs = []
    for position, _ in mu:
        if not region.contains(position):
            raise PreconditionError(f"Atom {position} lies outside {region}")
        dist = region.distance_to_boundary(position)
        if dist <= 0:
            raise PreconditionError(f"Atom {position} lies on the boundary of {region}")
        costs.append(min(1.0, dist))
    return np.array(costs)


def _flat_norm_assignment(mu: AtomicMeasure, sink: np.ndarray) -> float:
    positions = mu.positions()
    charges = mu.charges()
    pos_idx = np.repeat(np.arange(len(mu)), np.clip(charges, 0, None))
    neg_idx = np.repeat(np.arange(len(mu)), np.clip(-charges, 0, None))
    m, n = len(pos_idx), len(neg_idx)
    if m + n == 0:
        return 0.0
    cost = np.zeros((m + n, n + m))
    if m and n:
        dist = np.linalg.norm(positions[pos_idx][:, None, :] - positions[neg_idx][None, :, :], axis=-1)
        cost[:m, :n] = np.minimum(dist, sink[pos_idx][:, None] + sink[neg_idx][None, :])
    # unmatched units pay min(1, distance to the boundary)
    cost[:m, n:] = sink[pos_idx][:, None]
    cost[m:, :n] = sink[neg_idx][None, :]
    rows, cols = linear_sum_assignment(cost)
    return stable_sum(cost[rows, cols])


def _flat_norm_lp(mu: AtomicMeasure, sink: np.ndarray) -> float:
    if len(mu) == 0:
        return 0.0
    positions = mu.positions()
    charges = mu.charges().astype(float)
    k = len(mu)
    rows, bounds = [], []
    for a in range(k):
        for b in range(k):
            if a != b:
                row = np.zeros(k)
                row[a], row[b] = 1.0, -1.0
                rows.append(row)
                bounds.append(float(np.linalg.norm(positions[a] - positions[b])))
    res = linprog(
        -charges,
        A_ub=np.array(rows) if rows else None,
        b_ub=np.array(bounds) if rows else None,
        bounds=[(-s, s) for s in sink],
        method="highs-ds",
    )
    if not res.success:
        raise PreconditionError(f"Flat norm LP failed: {res.message}")
    return float(-res.fun)


def flat_norm(mu: AtomicMeasure, region: Region, method: str = "assignment") -> float:
    """Return the flat norm of an atomic measure relative to a convex region.

    The value is sup <mu, psi> over psi vanishing on the boundary with
    |psi| <= 1 and Lip(psi) <= 1. ``assignment`` solves the equivalent
    transport problem in which every unit charge is matched to an opposite
    one at Euclidean cost or discharged at cost min(1, dist to boundary);
    ``lp`` solves the dual linear program on the atom values of psi.

    Args:
        mu (AtomicMeasure): measure with atoms strictly inside the region
        region (Region): convex region
        method (str): "assignment" or "lp"

    Raises:
        PreconditionError: an atom is on or outside the boundary

    Returns:
        float: the flat norm
    """
    sink = _boundary_costs(mu, region)
    if method == "assignment":
        return _flat_norm_assignment(mu, sink)
    if method == "lp":
        return _flat_norm_lp(mu, sink)
    raise ValueError(f"Unknown flat norm method {method!r}")


# winding numbers

def winding_number(loop: Sequence, field_eval: Callable[[np.ndarray], np.ndarray]) -> int:
    """Return the degree of a field along a closed polygonal loop.

    Args:
        loop (Sequence[Point]): vertices of the loop, not repeating the first
        field_eval (Callable): maps an (n, 2) array of points to (n, 2) vectors

    Raises:
        UnderSamplingError: two consecutive samples are antipodal

    Returns:
        int: (1/2pi) times the sum of the angle jumps along the loop
    """
    points = np.asarray(loop, dtype=float).reshape(-1, 2)
    values = np.asarray(field_eval(points), dtype=float).reshape(-1, 2)
    theta = np.arctan2(values[:, 1], values[:, 0])
    jumps = angle_diff(theta, np.roll(theta, -1))
    if np.any(np.abs(jumps) >= math.pi - 1e-9):
        raise UnderSamplingError("Consecutive loop samples are antipodal; refine the loop")
    return int(round(float(jumps.sum()) / TWO_PI))


def circle_loop(center, radius: float, samples: int) -> np.ndarray:
    """Counterclockwise regular polygon approximating a circle."""
    angles = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    return np.stack([center[0] + radius * np.cos(angles), center[1] + radius * np.sin(angles)], axis=1)


# chirality and vorticity

@dataclass
class ImplicationReport:
    """Result of chirality_vorticity_implications."""

    triangles: int
    charged: int
    eta: float
    eta_prime: float
    charged_with_high_chirality: List[TriangleId] = field(default_factory=list)
    uncharged_with_low_chirality: List[TriangleId] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.charged_with_high_chirality and not self.uncharged_with_low_chirality


def chirality_vorticity_implications(
    u: SpinField,
    where: Where,
    eta: Optional[float] = None,
    eta_prime: Optional[float] = None,
    config: Optional[Config] = None,
) -> ImplicationReport:
    """Verify chi > 1 - eta => mu_v = 0 and mu_v = 0 => chi >= -1 + eta' on every triangle."""
    config = config or default_config()
    eta = config.chirality_eta if eta is None else eta
    eta_prime = config.chirality_eta_prime if eta_prime is None else eta_prime
    triangles = as_triangles(where, u.eps)
    chi = chirality_values(u, triangles)
    mu = vorticity_values(to_auxiliary(u), triangles)
    high = (chi > 1 - eta) & (mu != 0)
    low = (mu == 0) & (chi < -1 + eta_prime)
    report = ImplicationReport(
        triangles=len(triangles),
        charged=int(np.count_nonzero(mu)),
        eta=eta,
        eta_prime=eta_prime,
        charged_with_high_chirality=list(triangles[high]),
        uncharged_with_low_chirality=list(triangles[low]),
    )
    if not report.ok:
        logger.warning(
            "Chirality/vorticity implications violated on %d triangles",
            len(report.charged_with_high_chirality) + len(report.uncharged_with_low_chirality),
        )
    return report


def rough_xy_bound_check(u: SpinField, T: TriangleId) -> float:
    """Return XY(v, T) / E(u, T) on a triangle without vorticity.

    0/0 is reported as 1; energies below 1e-20 eps^2 count as zero.

    Raises:
        PreconditionError: mu_v(T) != 0
    """
    triangles = TriangleSet.from_ids([T])
    v = to_auxiliary(u)
    if vorticity_values(v, triangles)[0] != 0:
        raise PreconditionError(f"Triangle {T} carries vorticity")
    e = afxy_densities(u, triangles)[0]
    xy = xy_densities(v, triangles)[0]
    tiny = 1e-20 * u.eps**2
    if e <= tiny:
        return 1.0 if xy <= tiny else math.inf
    return float(xy / e)


@dataclass
class MassReport:
    """Per-triangle check of XY(v, T) / eps^2 >= (8/9) |mu_v(T)|."""

    mass: int
    xy: float
    violations: List[TriangleId]

    @property
    def ratio(self) -> float:
        """|mu_v|(A) eps^2 / XY(v, A); bounded by 9/8."""
        return self.mass / self.xy if self.xy > 0 else 0.0


def mass_bound_check(v: SpinField, where: Where) -> MassReport:
    triangles = as_triangles(where, v.eps)
    mu = np.abs(vorticity_values(v, triangles))
    xy = xy_densities(v, triangles) / v.eps**2
    bad = xy < (8.0 / 9.0) * mu - 1e-12
    return MassReport(mass=int(mu.sum()), xy=stable_sum(xy), violations=list(triangles[bad]))
