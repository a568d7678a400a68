"""SpinField: S1-valued spin configurations on the scaled lattice."""

import json
from pathlib import Path
from typing import Callable, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from afxy.exceptions import PreconditionError, UndefinedSiteError
from afxy.utils import unit_vectors
from .lattice import LatticeIndex, TriangleSet, cartesian
from .region import Region, column_range, row_range


class SpinField:
    """Spin field on eps * L stored as phase angles.

    Phases live on a rectangular box of index space starting at ``origin``;
    ``phase[a, b]`` is the angle at site (origin[0] + a, origin[1] + b).
    Sites outside the support hold NaN. The field is immutable; every
    modification returns a new instance.
    """

    def __init__(self, eps: float, phase: np.ndarray, origin: Tuple[int, int] = (0, 0)):
        if not eps > 0:
            raise ValueError("Lattice spacing must be positive")
        phase = np.array(phase, dtype=float)
        if phase.ndim != 2:
            raise ValueError("Phase array must be two dimensional")
        phase.flags.writeable = False
        self.eps = float(eps)
        self.phase = phase
        self.origin = (int(origin[0]), int(origin[1]))

    # construction

    @staticmethod
    def index_box(region: Region, eps: float, margin: int = 1) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        """Origin and shape of an index box covering a region plus a margin of sites."""
        b_lo, b_hi = row_range(region, eps, margin=margin)
        a_lo, a_hi = column_range(region, eps, b_lo, b_hi, margin=margin)
        return (a_lo, b_lo), (a_hi - a_lo + 2, b_hi - b_lo + 2)

    @classmethod
    def from_function(
        cls,
        eps: float,
        region: Region,
        fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
        margin: int = 1,
    ) -> "SpinField":
        """Build a field on a box around the region from fn(z1, z2) -> phase."""
        origin, shape = cls.index_box(region, eps, margin)
        z1, z2 = np.meshgrid(
            np.arange(origin[0], origin[0] + shape[0]),
            np.arange(origin[1], origin[1] + shape[1]),
            indexing="ij",
        )
        phase = np.broadcast_to(np.asarray(fn(z1, z2), dtype=float), shape)
        return cls(eps, phase, origin)

    @classmethod
    def constant(cls, eps: float, region: Region, theta: float = 0.0) -> "SpinField":
        return cls.from_function(eps, region, lambda z1, z2: np.full(z1.shape, float(theta)))

    @classmethod
    def from_sites(cls, eps: float, sites: Mapping[Tuple[int, int], float]) -> "SpinField":
        """Build a field from an explicit site -> phase mapping."""
        if not sites:
            raise PreconditionError("A spin field needs at least one site")
        keys = np.array(list(sites.keys()), dtype=np.int64)
        lo = keys.min(axis=0)
        hi = keys.max(axis=0)
        phase = np.full((hi[0] - lo[0] + 1, hi[1] - lo[1] + 1), np.nan)
        phase[keys[:, 0] - lo[0], keys[:, 1] - lo[1]] = list(sites.values())
        return cls(eps, phase, (int(lo[0]), int(lo[1])))

    # access

    @property
    def shape(self) -> Tuple[int, int]:
        return self.phase.shape

    def index_grids(self) -> Tuple[np.ndarray, np.ndarray]:
        """Index arrays of every box position, shaped like ``phase``."""
        return np.meshgrid(
            np.arange(self.origin[0], self.origin[0] + self.shape[0]),
            np.arange(self.origin[1], self.origin[1] + self.shape[1]),
            indexing="ij",
        )

    def sites(self) -> Tuple[np.ndarray, np.ndarray]:
        """Index arrays of the defined sites."""
        z1, z2 = self.index_grids()
        defined = ~np.isnan(self.phase)
        return z1[defined], z2[defined]

    def defined(self, z1, z2) -> np.ndarray:
        a = np.asarray(z1) - self.origin[0]
        b = np.asarray(z2) - self.origin[1]
        inside = (a >= 0) & (a < self.shape[0]) & (b >= 0) & (b < self.shape[1])
        out = np.zeros(np.shape(a), dtype=bool)
        out[inside] = ~np.isnan(self.phase[a[inside], b[inside]])
        return out

    def phase_at(self, z1, z2) -> np.ndarray:
        """Vectorised phase lookup.

        Raises:
            UndefinedSiteError: some requested site carries no phase
        """
        z1 = np.asarray(z1)
        z2 = np.asarray(z2)
        ok = self.defined(z1, z2)
        if not ok.all():
            bad = np.argwhere(~ok)[0]
            raise UndefinedSiteError(
                f"Site {(int(z1[tuple(bad)]), int(z2[tuple(bad)]))} has no phase"
            )
        return self.phase[z1 - self.origin[0], z2 - self.origin[1]]

    def __getitem__(self, i: LatticeIndex) -> float:
        return float(self.phase_at(np.array([i[0]]), np.array([i[1]]))[0])

    def __contains__(self, i) -> bool:
        return bool(self.defined(np.array([i[0]]), np.array([i[1]]))[0])

    def spin(self, i: LatticeIndex) -> np.ndarray:
        return unit_vectors(self[i])

    def vertex_phases(self, triangles: TriangleSet, by_sublattice: bool = False) -> np.ndarray:
        """Phases at the vertices of each triangle, shape (n, 3)."""
        if by_sublattice:
            v1, v2 = triangles.vertices_by_sublattice()
        else:
            v1, v2 = triangles.vertices()
        return self.phase_at(v1, v2)

    def covers(self, triangles: TriangleSet) -> bool:
        v1, v2 = triangles.vertices()
        return bool(self.defined(v1, v2).all())

    def site_points(self) -> np.ndarray:
        """Physical coordinates of every box position, shape (n1, n2, 2)."""
        z1, z2 = self.index_grids()
        return cartesian(z1, z2, self.eps)

    # modification

    def with_phase(self, phase: np.ndarray) -> "SpinField":
        return SpinField(self.eps, phase, self.origin)

    def replace_sites(self, z1, z2, values) -> "SpinField":
        """Return a copy with the given sites set to new phases."""
        phase = np.array(self.phase)
        phase[np.asarray(z1) - self.origin[0], np.asarray(z2) - self.origin[1]] = values
        return self.with_phase(phase)

    # serialization

    def to_dict(self) -> Dict:
        z1, z2 = self.sites()
        theta = self.phase_at(z1, z2)
        return {
            "eps": self.eps,
            "sites": [[int(a), int(b), float(t)] for a, b, t in zip(z1, z2, theta)],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "SpinField":
        try:
            eps = float(data["eps"])
            sites = {(int(a), int(b)): float(t) for a, b, t in data["sites"]}
        except (KeyError, TypeError, ValueError) as exc:
            raise PreconditionError(f"Malformed spin field record: {exc}") from exc
        return cls.from_sites(eps, sites)

    def to_json(self, path: Optional[Union[str, Path]] = None) -> str:
        text = json.dumps(self.to_dict())
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    @classmethod
    def from_json(cls, source: Union[str, Path]) -> "SpinField":
        """Load a field from a JSON file path or a JSON string."""
        text = str(source)
        if not text.lstrip().startswith("{"):
            text = Path(source).read_text(encoding="utf-8")
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, SpinField):
            return NotImplemented
        return (
            self.eps == other.eps
            and self.origin == other.origin
            and np.array_equal(self.phase, other.phase, equal_nan=True)
        )

    def __repr__(self):
        z1, _ = self.sites()
        return f"SpinField(eps={self.eps}, sites={len(z1)}, origin={self.origin})"
