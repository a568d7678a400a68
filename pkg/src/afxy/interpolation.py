"""Interpolants of spin fields: piecewise affine and S1-geodesic.

The geodesic interpolant follows the shortest arc on every edge. With
x1, x2, x3 the counterclockwise vertices of T and phi1 the stored phase at
x1, set phi2 = phi1 + d(x1,x2) and phi3 = phi2 + d(x2,x3). On a triangle
without vorticity the phase is the affine function through (phi1, phi2,
phi3). On a charged triangle the phase is 0-homogeneous about the
barycenter b: a point on the ray from b through the edge point
x_k + s (x_{k+1} - x_k) has phase phi_k + s d(x_k, x_{k+1}), so the phase
jumps by 2 pi mu across the segment [x1, b].
"""

from enum import Enum
import logging
from typing import Callable, NamedTuple, Optional

import numpy as np

from afxy.config import Config, default_config
from afxy.data.lattice import TriangleSet, locate
from afxy.data.region import Disk, Region, iter_triangle_chunks, triangle_set, triangles_meeting
from afxy.data.spinfield import SpinField
from afxy.exceptions import PreconditionError
from afxy.utils import SQRT3, TWO_PI, angle_diff, stable_sum, unit_vectors
from afxy.vorticity import circle_loop, vorticity_measure, winding_number

logger = logging.getLogger("afxy.interpolation")

# seven point rule exact for polynomials of degree five, weights normalised to the area
_QUAD_A1, _QUAD_B1, _QUAD_W1 = 0.059715871789770, 0.470142064105115, 0.132394152788506
_QUAD_A2, _QUAD_B2, _QUAD_W2 = 0.797426985353087, 0.101286507323456, 0.125939180544827
_QUAD_POINTS = np.array([
    [1 / 3, 1 / 3, 1 / 3],
    [_QUAD_A1, _QUAD_B1, _QUAD_B1], [_QUAD_B1, _QUAD_A1, _QUAD_B1], [_QUAD_B1, _QUAD_B1, _QUAD_A1],
    [_QUAD_A2, _QUAD_B2, _QUAD_B2], [_QUAD_B2, _QUAD_A2, _QUAD_B2], [_QUAD_B2, _QUAD_B2, _QUAD_A2],
])
_QUAD_WEIGHTS = np.array([0.225] + [_QUAD_W1] * 3 + [_QUAD_W2] * 3)

_SINGULAR_TOL = 1e-12

GradientFunction = Callable[[np.ndarray], np.ndarray]


class InterpolationKind(Enum):
    AFFINE = "affine"
    GEODESIC = "geodesic"


def triangle_area(eps: float) -> float:
    return SQRT3 / 4.0 * eps * eps


def _edge_data(theta: np.ndarray):
    """Edge jumps d_k = d(x_k, x_{k+1}), cumulative phases phi_k and charges."""
    jumps = angle_diff(theta, np.roll(theta, -1, axis=1))
    phi = theta[:, :1] + np.concatenate(
        [np.zeros((len(theta), 1)), np.cumsum(jumps[:, :2], axis=1)], axis=1
    )
    charge = np.rint(jumps.sum(axis=1) / TWO_PI).astype(int)
    return jumps, phi, charge


def _solve_gradient(corners: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Gradient of the affine function taking ``values`` (n, 3) at ``corners`` (n, 3, 2)."""
    mat = np.stack([corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0]], axis=1)
    rhs = np.stack([values[:, 1] - values[:, 0], values[:, 2] - values[:, 0]], axis=1)
    return np.linalg.solve(mat, rhs[..., None])[..., 0]


def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _sector_gradient(w: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Gradient of the edge parameter s at b + w, for the sector of b over the edge [p, q].

    Points are taken relative to b. s = -(w x p) / (w x (q - p)).
    """
    c = q - p
    num = -_cross(w, p)
    den = _cross(w, c)
    grad_num = np.stack([-p[..., 1], p[..., 0]], axis=-1)
    grad_den = np.stack([c[..., 1], -c[..., 0]], axis=-1)
    return (grad_num * den[..., None] - num[..., None] * grad_den) / (den * den)[..., None]


class Interpolant:
    """Continuum extension of a spin field to the triangles it covers.

    Attributes:
        base (SpinField): interpolated field
        kind (InterpolationKind): affine or geodesic
    """

    def __init__(self, base: SpinField, kind: InterpolationKind = InterpolationKind.GEODESIC):
        self.base = base
        self.kind = InterpolationKind(kind)

    def _locate(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        triangles, bary = locate(pts, self.base.eps)
        if not self.base.covers(triangles):
            raise PreconditionError("Point outside the triangles covered by the field")
        return pts, triangles, bary

    def singular_points(self) -> np.ndarray:
        """Barycenters of the charged triangles of the base field."""
        triangles = covered_triangles(self.base)
        _, _, charge = _edge_data(self.base.vertex_phases(triangles))
        return triangles[charge != 0].barycenters(self.base.eps)

    def _geodesic_phase(self, bary: np.ndarray, theta: np.ndarray) -> np.ndarray:
        jumps, phi, charge = _edge_data(theta)
        phase = np.einsum("nk,nk->n", bary, phi)
        charged = np.flatnonzero(charge != 0)
        if charged.size:
            lam = bary[charged]
            m = np.argmin(lam, axis=1)
            gap = 1.0 / 3.0 - lam[np.arange(len(m)), m]
            if np.any(gap <= _SINGULAR_TOL):
                raise PreconditionError("Geodesic interpolant queried at a vortex barycenter")
            hit = 1.0 / 3.0 + (lam - 1.0 / 3.0) * ((1.0 / 3.0) / gap)[:, None]
            k = (m + 1) % 3
            rows = np.arange(len(k))
            s = hit[rows, (k + 1) % 3]
            phase[charged] = phi[charged][rows, k] + s * jumps[charged][rows, k]
        return phase

    def phase(self, points) -> np.ndarray:
        """Phase of the geodesic interpolant at the points."""
        if self.kind is not InterpolationKind.GEODESIC:
            raise ValueError("Only the geodesic interpolant has a phase")
        _, triangles, bary = self._locate(points)
        return self._geodesic_phase(bary, self.base.vertex_phases(triangles))

    def eval(self, points) -> np.ndarray:
        """Evaluate the interpolant.

        Args:
            points (array-like): a point (2,) or points (n, 2)

        Raises:
            PreconditionError: a point is outside the covered triangles, or
                a geodesic query hits a vortex barycenter

        Returns:
            np.ndarray: values (2,) or (n, 2); unit vectors for the geodesic kind
        """
        single = np.ndim(points) == 1
        _, triangles, bary = self._locate(points)
        theta = self.base.vertex_phases(triangles)
        if self.kind is InterpolationKind.AFFINE:
            values = np.einsum("nk,nkc->nc", bary, unit_vectors(theta))
        else:
            values = unit_vectors(self._geodesic_phase(bary, theta))
        return values[0] if single else values

    __call__ = eval

    def dirichlet_energy(self, where) -> float:
        """Return the integral of |grad|^2 over the triangles of a region.

        Per triangle the integral of |grad f|^2 for affine f equals
        (1 / (2 sqrt 3)) times the sum of squared edge differences.

        Raises:
            PreconditionError: geodesic kind and a charged triangle in the region
        """
        triangles = where if isinstance(where, TriangleSet) else triangle_set(where, self.base.eps)
        theta = self.base.vertex_phases(triangles)
        if self.kind is InterpolationKind.AFFINE:
            squares = 2.0 - 2.0 * np.cos(theta - np.roll(theta, -1, axis=1))
        else:
            jumps, _, charge = _edge_data(theta)
            if np.any(charge != 0):
                raise PreconditionError("Region contains charged triangles")
            squares = jumps * jumps
        return stable_sum(squares.sum(axis=1) / (2.0 * SQRT3))

    def _gradient_and_value(self, points):
        pts, triangles, bary = self._locate(points)
        theta = self.base.vertex_phases(triangles)
        corners = triangles.vertex_points(self.base.eps)
        return pts, triangles, bary, theta, corners

    def pre_jacobian(self, points) -> np.ndarray:
        """Return j = (v1 grad v2 - v2 grad v1) / 2 at interior points."""
        single = np.ndim(points) == 1
        pts, _, bary, theta, corners = self._gradient_and_value(points)
        if self.kind is InterpolationKind.AFFINE:
            spins = unit_vectors(theta)
            value = np.einsum("nk,nkc->nc", bary, spins)
            grad_x = _solve_gradient(corners, spins[..., 0])
            grad_y = _solve_gradient(corners, spins[..., 1])
            j = 0.5 * (value[:, :1] * grad_y - value[:, 1:] * grad_x)
        else:
            j = 0.5 * self._phase_gradient(pts, bary, theta, corners)
        return j[0] if single else j

    def _phase_gradient(self, pts, bary, theta, corners) -> np.ndarray:
        jumps, phi, charge = _edge_data(theta)
        grad = _solve_gradient(corners, phi)
        charged = np.flatnonzero(charge != 0)
        if charged.size:
            lam = bary[charged]
            m = np.argmin(lam, axis=1)
            if np.any(1.0 / 3.0 - lam[np.arange(len(m)), m] <= _SINGULAR_TOL):
                raise PreconditionError("Pre-Jacobian queried at a vortex barycenter")
            k = (m + 1) % 3
            rows = np.arange(len(k))
            c = corners[charged]
            b = c.mean(axis=1)
            p = c[rows, k] - b
            q = c[rows, (k + 1) % 3] - b
            grad[charged] = jumps[charged][rows, k][:, None] * _sector_gradient(pts[charged] - b, p, q)
        return grad


def covered_triangles(field: SpinField) -> TriangleSet:
    """Triangles all of whose vertices carry a phase."""
    o1, o2 = field.origin
    n1, n2 = field.shape
    bb, aa = np.meshgrid(np.arange(o2, o2 + n2 - 1), np.arange(o1, o1 + n1 - 1), indexing="ij")
    aa = np.repeat(aa.ravel(), 2)
    bb = np.repeat(bb.ravel(), 2)
    triangles = TriangleSet(aa, bb, np.tile([True, False], len(aa) // 2))
    v1, v2 = triangles.vertices()
    return triangles[field.defined(v1, v2).all(axis=1)]


def _gauss_legendre(order: int):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def jacobian_pairing(
    interp: Interpolant,
    psi: Callable[[np.ndarray], np.ndarray],
    grad_psi: GradientFunction,
    region: Region,
    config: Optional[Config] = None,
    order: int = 4,
) -> float:
    """Return -integral of j(v) . grad_perp(psi) over the triangles of a region.

    Triangles without vorticity use the edge-midpoint rule (j is constant
    there). A charged triangle is split into sectors around its barycenter;
    in polar-like coordinates (lambda, s) about b the 1/|x - b| singularity
    of j cancels the area element, leaving a smooth integrand handled by
    tensor Gauss-Legendre rules.

    Args:
        interp (Interpolant): geodesic interpolant
        psi (Callable): test function, kept for symmetry with the pairing on measures
        grad_psi (Callable): gradient of psi on (n, 2) points, returning (n, 2)
        region (Region): integration region
        config (Config, optional): provides the sector count
        order (int): Gauss-Legendre order per sector and direction

    Returns:
        float: the pairing, equal to pi <mu_v, psi> up to quadrature error
    """
    del psi
    if interp.kind is not InterpolationKind.GEODESIC:
        raise ValueError("The Jacobian pairing is defined for the geodesic interpolant")
    config = config or default_config()
    eps = interp.base.eps
    per_edge = max(1, config.jacobian_sectors // 3)
    nodes, weights = _gauss_legendre(order)
    parts = []
    for chunk in iter_triangle_chunks(region, eps):
        theta = interp.base.vertex_phases(chunk)
        jumps, phi, charge = _edge_data(theta)
        corners = chunk.vertex_points(eps)
        plain = charge == 0
        if plain.any():
            grad_phi = _solve_gradient(corners[plain], phi[plain])
            mids = 0.5 * (corners[plain] + np.roll(corners[plain], -1, axis=1))
            g = np.asarray(grad_psi(mids.reshape(-1, 2)), dtype=float).reshape(-1, 3, 2)
            perp = np.stack([-g[..., 1], g[..., 0]], axis=-1).mean(axis=1)
            parts.append(-0.5 * triangle_area(eps) * np.einsum("nc,nc->n", grad_phi, perp))
        for idx in np.flatnonzero(~plain):
            parts.append(np.array([_charged_pairing(corners[idx], jumps[idx], grad_psi, per_edge, nodes, weights)]))
    if not parts:
        return 0.0
    return stable_sum(np.concatenate(parts))


def _charged_pairing(corners, jumps, grad_psi, per_edge, nodes, weights) -> float:
    b = corners.mean(axis=0)
    total = []
    # s in [0, 1] split into per_edge pieces, each with Gauss nodes
    s_nodes = ((np.arange(per_edge)[:, None] + nodes[None, :]) / per_edge).ravel()
    s_weights = np.tile(weights / per_edge, per_edge)
    for k in range(3):
        p = corners[k] - b
        q = corners[(k + 1) % 3] - b
        edge = p[None, :] + s_nodes[:, None] * (q - p)[None, :]
        grad_s = _sector_gradient(edge, np.broadcast_to(p, edge.shape), np.broadcast_to(q, edge.shape))
        j_edge = 0.5 * jumps[k] * grad_s
        twice_area = _cross(p, q - p)
        pts = b + nodes[:, None, None] * edge[None, :, :]
        g = np.asarray(grad_psi(pts.reshape(-1, 2)), dtype=float).reshape(len(nodes), len(s_nodes), 2)
        perp = np.stack([-g[..., 1], g[..., 0]], axis=-1)
        integrand = np.einsum("sc,lsc->ls", j_edge, perp) * twice_area
        total.append(-np.einsum("l,s,ls->", weights, s_weights, integrand))
    return stable_sum(total)


def potential_diagnostic(v: SpinField, region: Region) -> float:
    """Return the integral of (1 - |v_hat|^2)^2 over the triangles of a region.

    v_hat is the affine interpolant; the integrand is a polynomial of degree
    four on each triangle, so the seven point rule is exact.
    """
    parts = []
    for chunk in iter_triangle_chunks(region, v.eps):
        spins = unit_vectors(v.vertex_phases(chunk))
        values = np.einsum("qk,nkc->nqc", _QUAD_POINTS, spins)
        defect = (1.0 - np.einsum("nqc,nqc->nq", values, values)) ** 2
        parts.append(triangle_area(v.eps) * defect @ _QUAD_WEIGHTS)
    if not parts:
        return 0.0
    return stable_sum(np.concatenate(parts))


class StokesResult(NamedTuple):
    charge: int
    winding: int
    clean: bool


def stokes_check(v: SpinField, disk: Disk, samples: Optional[int] = None) -> StokesResult:
    """Compare the charge of mu_v in a disk with the degree of the geodesic interpolant on its boundary.

    ``clean`` tells whether no charged triangle meets the 2 eps collar of
    the boundary circle; the two integers agree whenever it is true.
    """
    eps = v.eps
    mu = vorticity_measure(v, triangles_meeting(disk, eps))
    charge = mu.charge_in_ball(disk.center, disk.radius)
    # a charged triangle meets the collar only if its barycenter is within 2 eps + eps / sqrt 3
    clean = all(
        abs(np.hypot(p[0] - disk.center[0], p[1] - disk.center[1]) - disk.radius) > 3 * eps
        for p, _ in mu
    )
    if samples is None:
        samples = 8 * int(np.ceil(TWO_PI * disk.radius / eps)) + 8
    loop = circle_loop(disk.center, disk.radius, samples)
    winding = winding_number(loop, Interpolant(v, InterpolationKind.GEODESIC).eval)
    if clean and winding != charge:
        logger.warning("Stokes mismatch on %s: charge %d, winding %d", disk, charge, winding)
    return StokesResult(charge, winding, clean)
