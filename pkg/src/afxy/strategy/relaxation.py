"""Vorticity-preserving coordinate descent for the AFXY energy."""

import numpy as np

from afxy.config import Config
from afxy.data.lattice import sublattices
from afxy.data.region import Region, triangle_set, triangles_meeting
from afxy.data.spinfield import SpinField
from afxy.energy import AUX_SHIFT, energy_afxy, to_auxiliary
from afxy.exceptions import InvariantViolationError
from afxy.utils import TWO_PI, angle_diff
from afxy.vorticity import vorticity_values

from .strategy import Strategy

# neighbours of a site in counterclockwise order, index coordinates
RING = np.array([(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)])


class ConstrainedRelaxation(Strategy):
    """Lower the AFXY energy of a field in a region without creating vortices.

    Only sites whose six triangles all lie in the region move; the others act
    as a boundary condition. A sweep updates the three sublattices in turn.
    Sites of one sublattice share no triangle, so all of them are updated at
    once: each moves to -normalize(sum of its six neighbours), the exact
    minimiser of its star energy, unless that would charge one of its
    triangles.

    Args:
        u (SpinField): starting field, admissible on the region
        region (Region): protected region
        sweeps (int, optional): number of sweeps, ``relaxation_sweeps`` by default
    """

    def __init__(self, u: SpinField, region: Region, sweeps: int = None, config: Config = None):
        super().__init__(config)
        self.u = u
        self.region = region
        self.sweeps = self.config.relaxation_sweeps if sweeps is None else int(sweeps)
        self.energies = []
        self.rejected = 0

    def _movable(self) -> np.ndarray:
        """Box mask of the sites whose six triangles lie in the region."""
        inside = triangle_set(self.region, self.u.eps)
        v1, v2 = inside.vertices()
        counts = np.zeros(self.u.shape, dtype=np.int64)
        np.add.at(counts, (v1.ravel() - self.u.origin[0], v2.ravel() - self.u.origin[1]), 1)
        return counts == 6

    def check_admissible(self, u: SpinField):
        """Raise if a defined triangle meeting the region carries vorticity."""
        triangles = triangles_meeting(self.region, u.eps)
        v1, v2 = triangles.vertices()
        triangles = triangles[u.defined(v1, v2).all(axis=1)]
        charges = vorticity_values(to_auxiliary(u), triangles)
        if np.any(charges != 0):
            raise InvariantViolationError(
                f"{int(np.count_nonzero(charges))} charged triangles meet {self.region}"
            )

    def run(self) -> SpinField:
        self.check_admissible(self.u)
        movable = self._movable()
        z1, z2 = self.u.index_grids()
        color = sublattices(z1, z2)
        shift = AUX_SHIFT[color - 1]
        phase = np.array(self.u.phase)
        self.energies = [energy_afxy(self.u, self.region)]
        for sweep in range(self.sweeps):
            for c in (1, 2, 3):
                a, b = np.nonzero(movable & (color == c))
                if a.size == 0:
                    continue
                self._update(phase, shift, a, b)
            energy = energy_afxy(self.u.with_phase(phase), self.region)
            self.energies.append(energy)
            self.logger.debug("Sweep %d: E=%.10g, %d rejected moves", sweep, energy, self.rejected)
            if self.energies[-2] - energy <= 1e-13 * max(self.energies[0], self.u.eps**2):
                break
        relaxed = self.u.with_phase(phase)
        self.check_admissible(relaxed)
        return relaxed

    def _update(self, phase: np.ndarray, shift: np.ndarray, a: np.ndarray, b: np.ndarray):
        na = a[:, None] + RING[None, :, 0]
        nb = b[:, None] + RING[None, :, 1]
        ring = phase[na, nb]
        sx = np.cos(ring).sum(axis=1)
        sy = np.sin(ring).sum(axis=1)
        norm = np.hypot(sx, sy)
        ok = norm > 1e-12
        proposal = np.where(ok, np.arctan2(-sy, -sx), phase[a, b])
        # vorticity of the six triangles (site, n_k, n_{k+1}) in the auxiliary field
        v_site = proposal + shift[a, b]
        v_ring = ring + shift[na, nb]
        v_next = np.roll(v_ring, -1, axis=1)
        jumps = (
            angle_diff(v_site[:, None], v_ring)
            + angle_diff(v_ring, v_next)
            + angle_diff(v_next, v_site[:, None])
        )
        charges = np.rint(jumps / TWO_PI)
        accept = ok & np.all(charges == 0, axis=1)
        self.rejected += int(np.count_nonzero(ok & ~accept))
        phase[a[accept], b[accept]] = proposal[accept]

