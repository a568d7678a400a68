"""Triangular lattice geometry in integer coordinates.

A site is z1*e1 + z2*e2 with e1 = (1, 0) and e2 = (1/2, sqrt(3)/2); the
physical point is eps times that. All topology (sublattices, triangles,
adjacency) is computed on the integer pair and eps only enters when
coordinates are evaluated.
"""

import math
from enum import Enum
from typing import Iterator, List, NamedTuple, Sequence, Tuple

import numpy as np

HEIGHT = math.sqrt(3.0) / 2.0


class LatticeIndex(NamedTuple):
    """Integer coordinates (z1, z2) of a site of the unscaled lattice."""

    z1: int
    z2: int

    def shift(self, d1: int, d2: int) -> "LatticeIndex":
        return LatticeIndex(self.z1 + d1, self.z2 + d2)


class Orientation(Enum):
    """Orientation of a lattice triangle."""

    UP = 0
    DOWN = 1


# counterclockwise vertex offsets from the base site
_OFFSETS = {
    Orientation.UP: ((0, 0), (1, 0), (0, 1)),
    Orientation.DOWN: ((1, 0), (1, 1), (0, 1)),
}
_UP_OFFSETS = np.array(_OFFSETS[Orientation.UP])
_DOWN_OFFSETS = np.array(_OFFSETS[Orientation.DOWN])


def to_cartesian(i: LatticeIndex, eps: float) -> Tuple[float, float]:
    """Return the physical position of a lattice site.

    Args:
        i (LatticeIndex): site
        eps (float): lattice spacing

    Raises:
        ValueError: eps is not positive

    Returns:
        Tuple[float, float]: eps * (z1 + z2/2, z2 * sqrt(3)/2)
    """
    if eps <= 0:
        raise ValueError("Lattice spacing must be positive")
    return (eps * (i[0] + 0.5 * i[1]), eps * HEIGHT * i[1])


def cartesian(z1, z2, eps: float) -> np.ndarray:
    """Vectorised to_cartesian; returns an array with trailing axis of length 2."""
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    return np.stack([eps * (z1 + 0.5 * z2), eps * HEIGHT * z2], axis=-1)


def sublattice(i: LatticeIndex) -> int:
    """Return the sublattice label of a site.

    L1 is generated by e1+e2 and e2+e3, which in index coordinates are
    (1, 1) and (-1, 2); it is exactly the set where z1 - z2 is divisible by
    three. L2 = L1 + e1 and L3 = L1 + e2 follow.
    """
    return int((i[0] - i[1]) % 3) + 1


def sublattices(z1, z2) -> np.ndarray:
    """Vectorised sublattice labels."""
    return np.mod(np.subtract(z1, z2), 3) + 1


class TriangleId(NamedTuple):
    """A triangle of the lattice, addressed by its base site and orientation."""

    base: LatticeIndex
    orientation: Orientation

    def vertices(self) -> Tuple[LatticeIndex, LatticeIndex, LatticeIndex]:
        """Vertices in counterclockwise order."""
        return tuple(self.base.shift(d1, d2) for d1, d2 in _OFFSETS[self.orientation])

    def vertices_by_sublattice(self) -> Tuple[LatticeIndex, LatticeIndex, LatticeIndex]:
        """Vertices ordered as (L1, L2, L3)."""
        return tuple(sorted(self.vertices(), key=sublattice))

    def barycenter(self, eps: float) -> Tuple[float, float]:
        points = [to_cartesian(v, eps) for v in self.vertices()]
        return (sum(p[0] for p in points) / 3.0, sum(p[1] for p in points) / 3.0)

    def __repr__(self):
        return f"{self.orientation.name.capitalize()}@({self.base.z1},{self.base.z2})"


def neighbors(T: TriangleId) -> List[TriangleId]:
    """Return the three triangles sharing a full edge with T."""
    a, b = T.base
    if T.orientation == Orientation.UP:
        shifts = [(0, 0), (-1, 0), (0, -1)]
        other = Orientation.DOWN
    else:
        shifts = [(0, 0), (1, 0), (0, 1)]
        other = Orientation.UP
    return [TriangleId(LatticeIndex(a + d1, b + d2), other) for d1, d2 in shifts]


def triangles_at(i: LatticeIndex) -> List[TriangleId]:
    """Return the six triangles having i as a vertex."""
    a, b = i
    return [
        TriangleId(LatticeIndex(a, b), Orientation.UP),
        TriangleId(LatticeIndex(a - 1, b), Orientation.UP),
        TriangleId(LatticeIndex(a, b - 1), Orientation.UP),
        TriangleId(LatticeIndex(a - 1, b), Orientation.DOWN),
        TriangleId(LatticeIndex(a, b - 1), Orientation.DOWN),
        TriangleId(LatticeIndex(a - 1, b - 1), Orientation.DOWN),
    ]


def locate(points, eps: float):
    """Find the triangles containing the given physical points.

    Args:
        points (array-like): shape (n, 2) or (2,)
        eps (float): lattice spacing

    Returns:
        Tuple[TriangleSet, np.ndarray]: the containing triangles and the
        barycentric coordinates (n, 3) with respect to their counterclockwise
        vertices
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    t2 = pts[:, 1] / (eps * HEIGHT)
    t1 = pts[:, 0] / eps - 0.5 * t2
    b1 = np.floor(t1)
    b2 = np.floor(t2)
    f1 = t1 - b1
    f2 = t2 - b2
    up = f1 + f2 < 1.0
    bary = np.where(
        up[:, None],
        np.stack([1.0 - f1 - f2, f1, f2], axis=1),
        np.stack([1.0 - f2, f1 + f2 - 1.0, 1.0 - f1], axis=1),
    )
    return TriangleSet(b1.astype(np.int64), b2.astype(np.int64), up), bary


class TriangleSet:
    """Vectorised collection of triangles.

    Stores the base coordinates and orientation of many triangles as arrays
    so that energies and vorticities can be evaluated without Python loops.
    """

    def __init__(self, z1, z2, up):
        self.z1 = np.asarray(z1, dtype=np.int64).ravel()
        self.z2 = np.asarray(z2, dtype=np.int64).ravel()
        self.up = np.asarray(up, dtype=bool).ravel()
        if not self.z1.shape == self.z2.shape == self.up.shape:
            raise ValueError("Triangle arrays must have equal length")

    @classmethod
    def from_ids(cls, triangles: Sequence[TriangleId]) -> "TriangleSet":
        triangles = list(triangles)
        return cls(
            [T.base.z1 for T in triangles],
            [T.base.z2 for T in triangles],
            [T.orientation == Orientation.UP for T in triangles],
        )

    @classmethod
    def concatenate(cls, parts: Sequence["TriangleSet"]) -> "TriangleSet":
        parts = list(parts)
        if not parts:
            return cls([], [], [])
        return cls(
            np.concatenate([p.z1 for p in parts]),
            np.concatenate([p.z2 for p in parts]),
            np.concatenate([p.up for p in parts]),
        )

    def __len__(self) -> int:
        return len(self.z1)

    def __iter__(self) -> Iterator[TriangleId]:
        for a, b, u in zip(self.z1.tolist(), self.z2.tolist(), self.up.tolist()):
            yield TriangleId(LatticeIndex(a, b), Orientation.UP if u else Orientation.DOWN)

    def __getitem__(self, mask) -> "TriangleSet":
        return TriangleSet(self.z1[mask], self.z2[mask], self.up[mask])

    def vertices(self) -> Tuple[np.ndarray, np.ndarray]:
        """Vertex index arrays of shape (n, 3) in counterclockwise order."""
        offsets = np.where(self.up[:, None, None], _UP_OFFSETS[None], _DOWN_OFFSETS[None])
        return self.z1[:, None] + offsets[:, :, 0], self.z2[:, None] + offsets[:, :, 1]

    def vertices_by_sublattice(self) -> Tuple[np.ndarray, np.ndarray]:
        """Vertex index arrays of shape (n, 3) ordered (L1, L2, L3)."""
        v1, v2 = self.vertices()
        order = np.argsort(sublattices(v1, v2), axis=1)
        return np.take_along_axis(v1, order, axis=1), np.take_along_axis(v2, order, axis=1)

    def vertex_points(self, eps: float) -> np.ndarray:
        """Physical vertex coordinates, shape (n, 3, 2), counterclockwise."""
        v1, v2 = self.vertices()
        return cartesian(v1, v2, eps)

    def barycenters(self, eps: float) -> np.ndarray:
        return self.vertex_points(eps).mean(axis=1)

    def keys(self) -> np.ndarray:
        """Integer keys giving a deterministic total order of the triangles."""
        return np.stack([self.z2, self.z1, (~self.up).astype(np.int64)], axis=1)

    def sorted(self) -> "TriangleSet":
        order = np.lexsort((~self.up, self.z1, self.z2))
        return self[order]
