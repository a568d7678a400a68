"""Zero-degree extension of a spin field across a disk, and the sampling shift."""

import math
from typing import Callable, Tuple

import numpy as np

from afxy.config import Config, default_config
from afxy.data.lattice import HEIGHT, cartesian, locate
from afxy.data.region import Annulus, Disk, Region, triangle_set
from afxy.data.spinfield import SpinField
from afxy.energy import energy_xy
from afxy.exceptions import ExtensionError, PreconditionError
from afxy.utils import THIRD_TURN, TWO_PI, angle_diff, unit_vectors

from .lifting import AnnulusLifting
from .strategy import Strategy

FieldFunction = Callable[[np.ndarray], np.ndarray]


def shift_candidates(eps: float, grid: int) -> np.ndarray:
    """Shifts eps (s e1 + t e2) with s, t = (i + 1/2) / grid and s + t < 1."""
    ticks = (np.arange(grid) + 0.5) / grid
    s, t = np.meshgrid(ticks, ticks, indexing="ij")
    keep = s + t < 1.0
    s, t = s[keep], t[keep]
    return eps * np.stack([s + 0.5 * t, HEIGHT * t], axis=1)


def sampling_shift(
    field_eval: FieldFunction,
    eps: float,
    inner: Region,
    outer: Region,
    config: Config = None,
) -> Tuple[float, float]:
    """Choose a sampling offset in the base triangle minimising the sampled XY energy.

    Args:
        field_eval (Callable): maps (n, 2) points to (n, 2) vectors
        eps (float): lattice spacing
        inner (Region): region whose triangles are sampled
        outer (Region): region where the field is defined
        config (Config, optional): provides the candidate grid size

    Raises:
        PreconditionError: a shifted sample point would leave the outer region

    Returns:
        Tuple[float, float]: the shift x_bar in T0 = conv{0, eps e1, eps e2}
    """
    config = config or default_config()
    triangles = triangle_set(inner, eps)
    if len(triangles) == 0:
        return (0.0, 0.0)
    v1, v2 = triangles.vertices()
    sites, inverse = np.unique(np.stack([v1.ravel(), v2.ravel()], axis=1), axis=0, return_inverse=True)
    inverse = inverse.reshape(-1, 3)
    points = cartesian(sites[:, 0], sites[:, 1], eps)
    candidates = shift_candidates(eps, config.sampling_grid)
    extremes = points[[
        np.argmin(points[:, 0]), np.argmax(points[:, 0]),
        np.argmin(points[:, 1]), np.argmax(points[:, 1]),
    ]]
    corners = np.array([[0.0, 0.0], [eps, 0.0], [0.5 * eps, HEIGHT * eps]])
    for point in (extremes[:, None, :] + corners[None, :, :]).reshape(-1, 2):
        if not outer.contains(point):
            raise PreconditionError(f"Shifted samples of {inner} leave {outer}")
    best, best_energy = None, math.inf
    for shift in candidates:
        values = np.asarray(field_eval(points + shift), dtype=float)
        corner = values[inverse]
        diff = corner - np.roll(corner, -1, axis=1)
        energy = 0.5 * eps * eps * float(np.einsum("nkc,nkc->", diff, diff))
        if energy < best_energy:
            best, best_energy = shift, energy
    return (float(best[0]), float(best[1]))


class LiftedPhase:
    """Affine interpolation of a lifted phase on the triangles it covers."""

    def __init__(self, lifted: SpinField):
        self.lifted = lifted

    def __call__(self, points: np.ndarray) -> np.ndarray:
        triangles, bary = locate(points, self.lifted.eps)
        return np.einsum("nk,nk->n", bary, self.lifted.vertex_phases(triangles))


class ZeroDegreeExtension(Strategy):
    """Replace a field inside a disk by a vortex-free one matching it outside.

    The annulus A(x0, r, R) is narrowed to r' = r + (R - r)/8 and
    R' = r + 3(R - r)/8, cut into K = floor((R' - r') / (9 eps)) layers, and
    the layer of least XY energy is selected. Inside it a radius rho is chosen
    to minimise the tangential energy of the lifted phase on the circle of
    radius rho. With a the mean lifted phase on that circle, the phase
    a + (|x - x0| / rho) (phi(x0 + rho (x - x0)/|x - x0|) - a) is sampled,
    at an offset picked by sampling_shift, on every site of the closed disk
    of radius rho. The result is certified by checking that every edge jump
    inside B_R is below 2pi/3.

    Attributes:
        layer (int): selected layer, 1-based
        rho (float): selected radius
        mean_phase (float): mean a of the lifted phase on the circle
        shift (Tuple[float, float]): sampling offset
    """

    def __init__(self, v: SpinField, annulus: Annulus, config: Config = None):
        super().__init__(config)
        if not isinstance(annulus, Annulus):
            raise TypeError("The extension works on an Annulus")
        self.v = v
        self.annulus = annulus
        self.layer = None
        self.rho = None
        self.mean_phase = None
        self.shift = None

    def _check_budget(self, energy: float):
        eps = self.v.eps
        c1 = energy / eps**2
        if c1 > self.config.extension_c1:
            raise PreconditionError(
                f"Annulus energy XY/eps^2 = {c1:.6g} exceeds the budget {self.config.extension_c1}"
            )
        width = self.annulus.R - self.annulus.r
        if eps * self.config.extension_c0 * c1 >= width * THIRD_TURN**2:
            message = (
                f"eps={eps:.6g} too large for the annulus width {width:.6g} at energy {c1:.6g} eps^2"
            )
            if self.config.extension_enforce_smallness:
                raise PreconditionError(message)
            self.logger.warning("%s; relying on the jump certificate", message)

    def _layers(self) -> np.ndarray:
        eps = self.v.eps
        r, R = self.annulus.r, self.annulus.R
        r_in = r + (R - r) / 8.0
        r_out = r + 3.0 * (R - r) / 8.0
        count = int(math.floor((r_out - r_in) / (self.config.extension_layer_factor * eps)))
        if count < 1:
            raise PreconditionError(
                f"Annulus {self.annulus} too thin for eps={eps:.6g}: no layer of width "
                f"{self.config.extension_layer_factor} eps fits"
            )
        return np.linspace(r_in, r_out, count + 1)

    def _circle(self, rho: float) -> np.ndarray:
        samples = 4 * int(math.ceil(TWO_PI * rho / self.v.eps))
        angles = np.linspace(0.0, TWO_PI, samples, endpoint=False)
        x0 = self.annulus.center
        return np.stack([x0[0] + rho * np.cos(angles), x0[1] + rho * np.sin(angles)], axis=1)

    def _tangential_energy(self, phase: LiftedPhase, rho: float) -> float:
        points = self._circle(rho)
        phi = phase(points)
        dphi = np.roll(phi, -1) - phi
        chord = np.linalg.norm(np.roll(points, -1, axis=0) - points, axis=1)
        return float(np.sum(dphi * dphi / chord))

    def _good_radius(self, phase: LiftedPhase, inner: float, outer: float) -> float:
        eps = self.v.eps
        lo = inner + self.config.extension_margin * eps
        hi = outer - self.config.extension_margin * eps
        step = self.config.extension_radius_resolution * eps
        radii = np.arange(lo + step, hi, step)
        if radii.size == 0:
            radii = np.array([0.5 * (inner + outer)])
        energies = [self._tangential_energy(phase, rho) for rho in radii]
        return float(radii[int(np.argmin(energies))])

    def _extended_phase(self, phase: LiftedPhase) -> FieldFunction:
        x0 = np.asarray(self.annulus.center, dtype=float)
        rho, a = self.rho, self.mean_phase

        def phi_bar(points: np.ndarray) -> np.ndarray:
            rel = points - x0
            dist = np.linalg.norm(rel, axis=1)
            out = np.empty(len(points))
            inside = dist <= rho
            outside = ~inside
            if outside.any():
                out[outside] = phase(points[outside])
            if inside.any():
                radial = dist[inside]
                nonzero = radial > 0
                direction = np.zeros((int(inside.sum()), 2))
                direction[nonzero] = rel[inside][nonzero] / radial[nonzero, None]
                direction[~nonzero] = (1.0, 0.0)
                boundary = phase(x0 + rho * direction)
                out[inside] = a + (radial / rho) * (boundary - a)
            return out

        return phi_bar

    def run(self) -> SpinField:
        """Extend the field.

        Raises:
            PreconditionError: energy budget exceeded, annulus too thin, or a
                charged triangle meets the annulus
            MonodromyError: the inner disk carries nonzero degree
            ExtensionError: the extended field fails the jump certificate

        Returns:
            SpinField: the extended field, equal to v outside B_rho
        """
        v, eps = self.v, self.v.eps
        x0, R = self.annulus.center, self.annulus.R
        annulus_energy = energy_xy(v, self.annulus)
        self._check_budget(annulus_energy)
        radii = self._layers()
        lifted = AnnulusLifting(v, self.annulus, self.config).run()
        phase = LiftedPhase(lifted)

        layer_energy = [
            energy_xy(v, Annulus(x0, radii[k], radii[k + 1])) for k in range(len(radii) - 1)
        ]
        k = int(np.argmin(layer_energy))
        self.layer = k + 1
        self.rho = self._good_radius(phase, radii[k], radii[k + 1])
        self.mean_phase = float(np.mean(phase(self._circle(self.rho))))
        self.logger.debug(
            "Layer %d of %d, rho=%.6g, mean phase %.6g", self.layer, len(radii) - 1, self.rho, self.mean_phase
        )

        phi_bar = self._extended_phase(phase)
        disk = Disk(x0, self.rho)
        self.shift = sampling_shift(
            lambda pts: unit_vectors(phi_bar(pts)), eps, disk, self.annulus.outer_disk(), self.config
        )
        z1, z2 = v.sites()
        points = cartesian(z1, z2, eps)
        replace = np.hypot(points[:, 0] - x0[0], points[:, 1] - x0[1]) <= self.rho
        values = phi_bar(points[replace] + np.asarray(self.shift))
        extended = v.replace_sites(z1[replace], z2[replace], values)
        self._certify(extended)
        self.logger.debug(
            "Extension: XY %.6g on the annulus, %.6g on B_R",
            annulus_energy, energy_xy(extended, Disk(x0, R)),
        )
        return extended

    def _certify(self, extended: SpinField):
        triangles = triangle_set(Disk(self.annulus.center, self.annulus.R), extended.eps)
        theta = extended.vertex_phases(triangles)
        jumps = np.abs(angle_diff(theta, np.roll(theta, -1, axis=1)))
        if np.any(jumps >= THIRD_TURN):
            raise ExtensionError(
                f"Extended field has an edge jump of {jumps.max():.6g} >= 2pi/3 inside B_R; "
                "raise extension_c0 or refine eps"
            )


def extension_ratio(before: SpinField, after: SpinField, annulus: Annulus) -> float:
    """XY(after, B_R) / XY(before, A(x0, r, R)); 0 when both vanish."""
    num = energy_xy(after, annulus.outer_disk())
    den = energy_xy(before, annulus)
    if den <= 0:
        return 0.0 if num <= 1e-14 * after.eps**2 else math.inf
    return num / den
