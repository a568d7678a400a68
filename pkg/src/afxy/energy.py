"""Energies, chirality and the auxiliary field of the AFXY model.

For a triangle T with vertices ordered by sublattice (i in L1, j in L2,
k in L3) and spins u = exp(i theta):

    E(u, T)  = eps^2 |u_i + u_j + u_k|^2
    XY(v, T) = eps^2 / 2 (|v_i - v_j|^2 + |v_j - v_k|^2 + |v_k - v_i|^2)
    chi(u, T) = 2 / (3 sqrt 3) (sin(theta_j - theta_i) + sin(theta_k - theta_j) + sin(theta_i - theta_k))

and the auxiliary field v rotates L2 by -2pi/3 and L3 by +2pi/3, giving
E(u, T) = 4 XY(v, T) - 9 eps^2 (1 - chi(u, T)).
"""

from enum import Enum
import logging
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize

from afxy.config import Config, default_config
from afxy.data.lattice import (
    TriangleId, TriangleSet, cartesian, sublattices,
)
from afxy.data.region import Region, iter_triangle_chunks, triangle_set
from afxy.data.spinfield import SpinField
from afxy.exceptions import InvariantViolationError, PreconditionError
from afxy.utils import SQRT3, THIRD_TURN, stable_sum

logger = logging.getLogger("afxy.energy")

Where = Union[Region, TriangleId, TriangleSet, Iterable[TriangleId]]
PhaseFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]

CHI_SCALE = 2.0 / (3.0 * SQRT3)

# phase added to u on L1, L2, L3 to obtain v
AUX_SHIFT = np.array([0.0, -THIRD_TURN, THIRD_TURN])


class BoundStatus(Enum):
    """Outcome of comparable_bounds_check."""

    HOLDS = "holds"
    NOT_APPLICABLE = "not_applicable"


def as_triangles(where: Where, eps: float) -> TriangleSet:
    """Normalise the ways of naming a set of triangles to a TriangleSet."""
    if isinstance(where, TriangleSet):
        return where
    if isinstance(where, Region):
        return triangle_set(where, eps)
    if isinstance(where, TriangleId):
        return TriangleSet.from_ids([where])
    return TriangleSet.from_ids(list(where))


def _edge_xy(phases: np.ndarray) -> np.ndarray:
    """Per-triangle sum of the three squared spin differences."""
    d = phases - np.roll(phases, -1, axis=1)
    return np.sum(2.0 - 2.0 * np.cos(d), axis=1)


# per-triangle densities

def afxy_densities(u: SpinField, triangles: TriangleSet) -> np.ndarray:
    """E(u, T) for each triangle of the set."""
    theta = u.vertex_phases(triangles)
    sx = np.cos(theta).sum(axis=1)
    sy = np.sin(theta).sum(axis=1)
    return u.eps**2 * (sx * sx + sy * sy)


def xy_densities(v: SpinField, triangles: TriangleSet) -> np.ndarray:
    """XY(v, T) for each triangle of the set."""
    return 0.5 * v.eps**2 * _edge_xy(v.vertex_phases(triangles))


def chirality_values(u: SpinField, triangles: TriangleSet) -> np.ndarray:
    """chi(u, T) for each triangle of the set."""
    theta = u.vertex_phases(triangles, by_sublattice=True)
    ti, tj, tk = theta[:, 0], theta[:, 1], theta[:, 2]
    return CHI_SCALE * (np.sin(tj - ti) + np.sin(tk - tj) + np.sin(ti - tk))


# energies

def energy_afxy(u: SpinField, where: Where) -> float:
    """Return the antiferromagnetic energy E_eps(u, A).

    Args:
        u (SpinField): spin field defined on every triangle of A
        where (Region | TriangleId | TriangleSet): the set A or its triangles

    Raises:
        UndefinedSiteError: a vertex phase is missing

    Returns:
        float: sum over T in A of eps^2 |u_i + u_j + u_k|^2
    """
    return stable_sum(afxy_densities(u, as_triangles(where, u.eps)))


def energy_xy(v: SpinField, where: Where) -> float:
    """Return the ferromagnetic XY energy XY_eps(v, A)."""
    return stable_sum(xy_densities(v, as_triangles(where, v.eps)))


def chirality(u: SpinField, T: TriangleId) -> float:
    """Return chi(u, T) in [-1, 1], vertices keyed by sublattice."""
    return float(chirality_values(u, TriangleSet.from_ids([T]))[0])


def chirality_from_angles(theta1, theta2):
    """Chirality of a triangle from theta1 = theta_j - theta_i and theta2 = theta_k - theta_i."""
    return CHI_SCALE * (np.sin(theta1) + np.sin(np.subtract(theta2, theta1)) - np.sin(theta2))


def triangle_interaction(u: SpinField, T: TriangleId) -> float:
    """Sum of the three nearest-neighbour dot products u(x).u(y) on T.

    E(u, T) = eps^2 (3 + 2 * triangle_interaction(u, T)); the minimum -3/2
    is reached exactly on ground-state triangles.
    """
    theta = u.vertex_phases(TriangleSet.from_ids([T]))[0]
    return float(np.cos(theta - np.roll(theta, -1)).sum())


# auxiliary field

def _shift_by_sublattice(field: SpinField, sign: float) -> SpinField:
    z1, z2 = field.index_grids()
    shift = AUX_SHIFT[sublattices(z1, z2) - 1]
    return field.with_phase(field.phase + sign * shift)


def to_auxiliary(u: SpinField) -> SpinField:
    """v = u on L1, R[-2pi/3] u on L2, R[2pi/3] u on L3."""
    return _shift_by_sublattice(u, 1.0)


def from_auxiliary(v: SpinField) -> SpinField:
    """Inverse of to_auxiliary."""
    return _shift_by_sublattice(v, -1.0)


def energy_identity_residual(u: SpinField, where: Where) -> Union[float, np.ndarray]:
    """E(u,T) - 4 XY(v,T) + 9 eps^2 (1 - chi(u,T)) with v the auxiliary field.

    Returns a float for a single triangle and an array otherwise.
    """
    triangles = as_triangles(where, u.eps)
    v = to_auxiliary(u)
    residual = (
        afxy_densities(u, triangles)
        - 4.0 * xy_densities(v, triangles)
        + 9.0 * u.eps**2 * (1.0 - chirality_values(u, triangles))
    )
    if isinstance(where, TriangleId):
        return float(residual[0])
    return residual


def comparable_bounds_check(
    u: SpinField, T: TriangleId, lam: float, config: Optional[Config] = None
) -> BoundStatus:
    """Check (1 - lam) XY(v,T) <= E(u,T) <= (1 + lam) XY(v,T) near chirality one.

    The comparison is only claimed when chi(u, T) > 1 - eta(lam), with eta
    read from the configured table.

    Raises:
        ValueError: lam outside (0, 1) or missing from the eta table
        InvariantViolationError: the inequality fails although applicable
    """
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    config = config or default_config()
    eta = config.eta_for(lam)
    triangles = TriangleSet.from_ids([T])
    chi = chirality_values(u, triangles)[0]
    if chi <= 1.0 - eta:
        return BoundStatus.NOT_APPLICABLE
    e = afxy_densities(u, triangles)[0]
    xy = xy_densities(to_auxiliary(u), triangles)[0]
    slack = 1e-14 * u.eps**2
    if not (1.0 - lam) * xy - slack <= e <= (1.0 + lam) * xy + slack:
        raise InvariantViolationError(
            f"Bounds with XY fail on {T}: E={e:.6g}, XY={xy:.6g}, chi={chi:.6g}, lambda={lam}"
        )
    return BoundStatus.HOLDS


def sublattice_xy_energy(u: SpinField, region: Region, sublattice: int = 1) -> float:
    """XY energy of u restricted to one sublattice, on the lattice of spacing sqrt(3) eps.

    Plaquettes are the triangles spanned by sites of that sublattice at mutual distance
    sqrt(3) eps, counted when contained in the region; each contributes
    (3/2) eps^2 times its three squared spin differences.
    """
    if sublattice not in (1, 2, 3):
        raise ValueError(f"Sublattice must be 1, 2 or 3, got {sublattice}")
    z1, z2 = u.sites()
    base = sublattices(z1, z2) == sublattice
    z1, z2 = z1[base], z2[base]
    total = []
    # generators of every sublattice in index coordinates: e1 + e2 = (1, 1), e2 + e3 = (-1, 2)
    for offsets in (((0, 0), (1, 1), (-1, 2)), ((1, 1), (0, 3), (-1, 2))):
        v1 = np.stack([z1 + d[0] for d in offsets], axis=1)
        v2 = np.stack([z2 + d[1] for d in offsets], axis=1)
        ok = u.defined(v1, v2).all(axis=1)
        v1, v2 = v1[ok], v2[ok]
        inside = region.contains_triangles(cartesian(v1, v2, u.eps))
        theta = u.phase_at(v1[inside], v2[inside])
        total.append(1.5 * u.eps**2 * _edge_xy(theta))
    return stable_sum(np.concatenate(total))


# construction of fields

def _singular_mask(points: np.ndarray, singularities: Sequence, eps: float) -> np.ndarray:
    mask = np.zeros(points.shape[:-1], dtype=bool)
    for s in singularities:
        mask |= np.hypot(points[..., 0] - s[0], points[..., 1] - s[1]) <= 1e-9 * eps
    return mask


def _evaluate(phase_fn: PhaseFunction, points: np.ndarray, singular: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.asarray(phase_fn(points[..., 0], points[..., 1]), dtype=float)
    theta = np.broadcast_to(theta, points.shape[:-1])
    return np.where(singular, 0.0, theta)


def sample_from_continuum(
    phase_fn: PhaseFunction, eps: float, region: Region, singularities: Sequence = ()
) -> SpinField:
    """Sample a continuum phase at the lattice points around a region.

    Args:
        phase_fn (Callable): vectorised phase(x, y) on arrays
        eps (float): lattice spacing
        region (Region): working region; one ring of extra sites is added
        singularities (Sequence[Point]): points where the phase is undefined;
            a lattice point on one gets phase 0

    Returns:
        SpinField: the sampled field
    """
    def fn(z1, z2):
        points = cartesian(z1, z2, eps)
        return _evaluate(phase_fn, points, _singular_mask(points, singularities, eps))

    return SpinField.from_function(eps, region, fn)


def sampled_xy_energy(
    phase_fn: PhaseFunction,
    eps: float,
    region: Region,
    singularities: Sequence = (),
    rows_per_chunk: int = 32,
) -> float:
    """XY energy of a sampled continuum field, evaluated chunk by chunk.

    Equivalent to energy_xy(sample_from_continuum(...), region) without
    holding the whole field in memory.
    """
    parts = []
    for chunk in iter_triangle_chunks(region, eps, rows_per_chunk):
        points = chunk.vertex_points(eps)
        theta = _evaluate(phase_fn, points, _singular_mask(points, singularities, eps))
        parts.append(stable_sum(0.5 * eps**2 * _edge_xy(theta)))
    return stable_sum(parts)


def ground_state(region: Region, eps: float, chirality_sign: int = 1, phase0: float = 0.0) -> SpinField:
    """A zero-energy field with chirality +1 or -1 on every triangle."""
    if chirality_sign not in (1, -1):
        raise ValueError("chirality_sign must be +1 or -1")
    offsets = np.array([0.0, THIRD_TURN, -THIRD_TURN]) * chirality_sign
    return SpinField.from_function(
        eps, region, lambda z1, z2: phase0 + offsets[sublattices(z1, z2) - 1]
    )


# two neighbouring triangles: Up@(0,0) with (L1, L2, L3) = (a, b, c) and
# Down@(0,0) with (L1, L2, L3) = (d, b, c); phases x = (theta_b, theta_c, theta_d), theta_a = 0

def _pair_terms(x: np.ndarray):
    tb, tc, td = x[..., 0], x[..., 1], x[..., 2]
    energy = (1 + np.cos(tb) + np.cos(tc)) ** 2 + (np.sin(tb) + np.sin(tc)) ** 2
    energy = energy + (np.cos(td) + np.cos(tb) + np.cos(tc)) ** 2 + (
        np.sin(td) + np.sin(tb) + np.sin(tc)
    ) ** 2
    chi_t = CHI_SCALE * (np.sin(tb) + np.sin(tc - tb) + np.sin(-tc))
    chi_s = CHI_SCALE * (np.sin(tb - td) + np.sin(tc - tb) + np.sin(td - tc))
    return energy, chi_t, chi_s


def two_triangle_energy_floor(eta: float, samples: int = 20000, seed: int = 0, refine: int = 8) -> float:
    """Estimate min E(u, T u T') / eps^2 over neighbours with chi(T) <= 1 - eta <= chi(T').

    Random phases are screened for feasibility and the best candidates are
    polished by constrained local minimisation.

    Raises:
        PreconditionError: no feasible sample was drawn
    """
    if not 0 < eta <= 2:
        raise ValueError("eta must lie in (0, 2]")
    rng = np.random.default_rng(seed)
    x = rng.uniform(-np.pi, np.pi, size=(samples, 3))
    energy, chi_t, chi_s = _pair_terms(x)
    feasible = (chi_t <= 1 - eta) & (chi_s >= 1 - eta)
    if not feasible.any():
        raise PreconditionError(f"No feasible pair among {samples} samples for eta={eta}")
    candidates = x[feasible][np.argsort(energy[feasible])[:refine]]
    best = float(energy[feasible].min())
    constraints = [
        {"type": "ineq", "fun": lambda y: (1 - eta) - _pair_terms(y)[1]},
        {"type": "ineq", "fun": lambda y: _pair_terms(y)[2] - (1 - eta)},
    ]
    for start in candidates:
        res = minimize(lambda y: float(_pair_terms(y)[0]), start, method="SLSQP", constraints=constraints)
        e, ct, cs = _pair_terms(res.x)
        if ct <= 1 - eta + 1e-9 and cs >= 1 - eta - 1e-9:
            best = min(best, float(e))
    logger.debug("Two-triangle energy floor for eta=%g: %g", eta, best)
    return best
