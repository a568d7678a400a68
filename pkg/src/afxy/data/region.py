"""Bounded regions of the plane and the lattice triangles they contain."""

from abc import abstractmethod
import math
from typing import Dict, Iterator, List, Tuple

import numpy as np

from afxy.exceptions import PreconditionError
from .lattice import HEIGHT, TriangleId, TriangleSet

# relative slack for closed-set comparisons
_TIE = 1e-12


def _segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    ap = p - a
    denom = np.einsum("...i,...i->...", ab, ab)
    t = np.clip(np.einsum("...i,...i->...", ap, ab) / np.where(denom > 0, denom, 1.0), 0.0, 1.0)
    closest = a + t[..., None] * ab
    return np.linalg.norm(p - closest, axis=-1)


def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def point_triangle_distance(tri: np.ndarray, point) -> np.ndarray:
    """Distance from a point to each closed triangle.

    Args:
        tri (np.ndarray): vertices, shape (n, 3, 2), counterclockwise
        point (array-like): a single point

    Returns:
        np.ndarray: distances, zero for triangles containing the point
    """
    p = np.broadcast_to(np.asarray(point, dtype=float), tri[:, 0].shape)
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    inside = (_cross(b - a, p - a) >= 0) & (_cross(c - b, p - b) >= 0) & (_cross(a - c, p - c) >= 0)
    dist = np.minimum(
        np.minimum(_segment_distance(p, a, b), _segment_distance(p, b, c)),
        _segment_distance(p, c, a),
    )
    return np.where(inside, 0.0, dist)


class Region:
    """Base class of the bounded domains Omega, Omega' and annuli A_{r,R}(x0)."""

    kind = ""

    @abstractmethod
    def contains(self, point) -> bool:
        """Closed containment of a point."""

    @abstractmethod
    def distance_to_boundary(self, point) -> float:
        """Euclidean distance to the topological boundary."""

    @abstractmethod
    def bounds(self) -> Tuple[float, float, float, float]:
        """Bounding box (xmin, ymin, xmax, ymax)."""

    @abstractmethod
    def contains_triangles(self, tri: np.ndarray) -> np.ndarray:
        """Mask of closed triangles (n, 3, 2) lying inside the closed region."""

    @abstractmethod
    def meets_triangles(self, tri: np.ndarray) -> np.ndarray:
        """Mask of closed triangles (n, 3, 2) intersecting the closed region."""

    @abstractmethod
    def to_dict(self) -> Dict:
        """JSON-compatible description."""

    def scale(self) -> float:
        xmin, ymin, xmax, ymax = self.bounds()
        return max(xmax - xmin, ymax - ymin, 1.0)

    def __eq__(self, other):
        return isinstance(other, Region) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(sorted(self.to_dict().items())))

    def __repr__(self):
        return f"{self.__class__.__name__}({self.to_dict()})"


class Rectangle(Region):
    """Closed axis-parallel rectangle [lo, hi]."""

    kind = "rectangle"

    def __init__(self, lo, hi):
        self.lo = (float(lo[0]), float(lo[1]))
        self.hi = (float(hi[0]), float(hi[1]))
        if not (self.lo[0] < self.hi[0] and self.lo[1] < self.hi[1]):
            raise ValueError(f"Rectangle corners must satisfy lo < hi, got {lo}, {hi}")

    def contains(self, point) -> bool:
        x, y = point
        tol = _TIE * self.scale()
        return bool(
            self.lo[0] - tol <= x <= self.hi[0] + tol and self.lo[1] - tol <= y <= self.hi[1] + tol
        )

    def distance_to_boundary(self, point) -> float:
        x, y = point
        if self.contains(point):
            return max(0.0, min(x - self.lo[0], self.hi[0] - x, y - self.lo[1], self.hi[1] - y))
        dx = max(self.lo[0] - x, 0.0, x - self.hi[0])
        dy = max(self.lo[1] - y, 0.0, y - self.hi[1])
        return math.hypot(dx, dy)

    def bounds(self):
        return (self.lo[0], self.lo[1], self.hi[0], self.hi[1])

    def contains_triangles(self, tri):
        tol = _TIE * self.scale()
        x, y = tri[..., 0], tri[..., 1]
        ok = (x >= self.lo[0] - tol) & (x <= self.hi[0] + tol)
        ok &= (y >= self.lo[1] - tol) & (y <= self.hi[1] + tol)
        return ok.all(axis=1)

    def meets_triangles(self, tri):
        # separating axis test between each triangle and the rectangle
        x, y = tri[..., 0], tri[..., 1]
        separated = (x.min(axis=1) > self.hi[0]) | (x.max(axis=1) < self.lo[0])
        separated |= (y.min(axis=1) > self.hi[1]) | (y.max(axis=1) < self.lo[1])
        corners = np.array(
            [self.lo, (self.hi[0], self.lo[1]), self.hi, (self.lo[0], self.hi[1])]
        )
        for k in range(3):
            edge = tri[:, (k + 1) % 3] - tri[:, k]
            normal = np.stack([-edge[:, 1], edge[:, 0]], axis=1)
            tri_proj = np.einsum("nvi,ni->nv", tri, normal)
            rect_proj = normal @ corners.T
            separated |= (tri_proj.min(axis=1) > rect_proj.max(axis=1)) | (
                tri_proj.max(axis=1) < rect_proj.min(axis=1)
            )
        return ~separated

    def to_dict(self):
        return {"kind": self.kind, "lo": list(self.lo), "hi": list(self.hi)}


class Disk(Region):
    """Closed disk B_radius(center)."""

    kind = "disk"

    def __init__(self, center, radius: float):
        self.center = (float(center[0]), float(center[1]))
        self.radius = float(radius)
        if not self.radius > 0:
            raise ValueError("Disk radius must be positive")

    def _rho(self, point) -> float:
        return math.hypot(point[0] - self.center[0], point[1] - self.center[1])

    def contains(self, point) -> bool:
        return self._rho(point) <= self.radius * (1 + _TIE)

    def distance_to_boundary(self, point) -> float:
        return abs(self.radius - self._rho(point))

    def bounds(self):
        cx, cy = self.center
        return (cx - self.radius, cy - self.radius, cx + self.radius, cy + self.radius)

    def contains_triangles(self, tri):
        rho = np.linalg.norm(tri - np.asarray(self.center), axis=-1)
        return (rho <= self.radius * (1 + _TIE)).all(axis=1)

    def meets_triangles(self, tri):
        return point_triangle_distance(tri, self.center) <= self.radius * (1 + _TIE)

    def to_dict(self):
        return {"kind": self.kind, "center": list(self.center), "radius": self.radius}


class Annulus(Region):
    """Closed annulus r <= |x - center| <= R."""

    kind = "annulus"

    def __init__(self, center, r: float, R: float):
        self.center = (float(center[0]), float(center[1]))
        self.r = float(r)
        self.R = float(R)
        if not 0 <= self.r < self.R:
            raise ValueError(f"Annulus radii must satisfy 0 <= r < R, got r={r}, R={R}")

    def _rho(self, point) -> float:
        return math.hypot(point[0] - self.center[0], point[1] - self.center[1])

    def contains(self, point) -> bool:
        rho = self._rho(point)
        return self.r * (1 - _TIE) <= rho <= self.R * (1 + _TIE)

    def distance_to_boundary(self, point) -> float:
        rho = self._rho(point)
        return min(abs(rho - self.r), abs(rho - self.R))

    def bounds(self):
        cx, cy = self.center
        return (cx - self.R, cy - self.R, cx + self.R, cy + self.R)

    def inner_disk(self) -> Disk:
        return Disk(self.center, self.r)

    def outer_disk(self) -> Disk:
        return Disk(self.center, self.R)

    def contains_triangles(self, tri):
        rho = np.linalg.norm(tri - np.asarray(self.center), axis=-1)
        outer_ok = (rho <= self.R * (1 + _TIE)).all(axis=1)
        # the triangle must also stay out of the hole, edges included
        inner_ok = point_triangle_distance(tri, self.center) >= self.r * (1 - _TIE)
        return outer_ok & inner_ok

    def meets_triangles(self, tri):
        rho_max = np.linalg.norm(tri - np.asarray(self.center), axis=-1).max(axis=1)
        rho_min = point_triangle_distance(tri, self.center)
        return (rho_min <= self.R * (1 + _TIE)) & (rho_max >= self.r * (1 - _TIE))

    def to_dict(self):
        return {"kind": self.kind, "center": list(self.center), "r": self.r, "R": self.R}


def region_from_dict(description: Dict) -> Region:
    """Build a Region from its JSON description.

    Raises:
        PreconditionError: unknown kind or missing keys
    """
    try:
        kind = description["kind"].lower()
        if kind == Rectangle.kind:
            return Rectangle(description["lo"], description["hi"])
        if kind == Disk.kind:
            return Disk(description["center"], description["radius"])
        if kind == Annulus.kind:
            return Annulus(description["center"], description["r"], description["R"])
    except (KeyError, TypeError, ValueError) as exc:
        raise PreconditionError(f"Malformed region description {description}: {exc}") from exc
    raise PreconditionError(f"Unknown region kind {description.get('kind')!r}")


def row_range(region: Region, eps: float, margin: int = 1) -> Tuple[int, int]:
    """Range of z2 rows whose triangles can touch the region's bounding box."""
    _, ymin, _, ymax = region.bounds()
    return (
        int(math.floor(ymin / (eps * HEIGHT))) - 1 - margin,
        int(math.ceil(ymax / (eps * HEIGHT))) + margin,
    )


def column_range(region: Region, eps: float, b_lo: int, b_hi: int, margin: int = 1) -> Tuple[int, int]:
    """Range of z1 columns covering the bounding box for rows b_lo..b_hi."""
    xmin, _, xmax, _ = region.bounds()
    return (
        int(math.floor(xmin / eps - 0.5 * b_hi)) - 2 - margin,
        int(math.ceil(xmax / eps - 0.5 * b_lo)) + 1 + margin,
    )


def _candidates(region: Region, eps: float, b_lo: int, b_hi: int) -> TriangleSet:
    a_lo, a_hi = column_range(region, eps, b_lo, b_hi, margin=0)
    bb, aa = np.meshgrid(np.arange(b_lo, b_hi + 1), np.arange(a_lo, a_hi + 1), indexing="ij")
    bb = np.repeat(bb.ravel(), 2)
    aa = np.repeat(aa.ravel(), 2)
    up = np.tile([True, False], len(bb) // 2)
    return TriangleSet(aa, bb, up)


def iter_triangle_chunks(
    region: Region, eps: float, rows_per_chunk: int = 64, meeting: bool = False
) -> Iterator[TriangleSet]:
    """Yield the triangles of a region in row chunks, in deterministic order.

    Args:
        region (Region): the region
        eps (float): lattice spacing
        rows_per_chunk (int): number of z2 rows per chunk
        meeting (bool): select triangles meeting the region instead of
            triangles contained in it

    Yields:
        TriangleSet: selected triangles of consecutive rows
    """
    if eps <= 0:
        raise ValueError("Lattice spacing must be positive")
    b_lo, b_hi = row_range(region, eps, margin=0)
    for start in range(b_lo, b_hi + 1, rows_per_chunk):
        stop = min(start + rows_per_chunk - 1, b_hi)
        cand = _candidates(region, eps, start, stop)
        pts = cand.vertex_points(eps)
        mask = region.meets_triangles(pts) if meeting else region.contains_triangles(pts)
        if mask.any():
            yield cand[mask]


def triangle_set(region: Region, eps: float) -> TriangleSet:
    """All triangles contained in the closed region, as a TriangleSet."""
    return TriangleSet.concatenate(list(iter_triangle_chunks(region, eps)))


def triangles_meeting(region: Region, eps: float) -> TriangleSet:
    """All closed triangles that intersect the closed region."""
    return TriangleSet.concatenate(list(iter_triangle_chunks(region, eps, meeting=True)))


def triangles_in(region: Region, eps: float) -> List[TriangleId]:
    """Return the triangles T with T contained in the region.

    Args:
        region (Region): closed region
        eps (float): lattice spacing

    Returns:
        List[TriangleId]: triangles in row-major order, empty when none fits
    """
    return list(triangle_set(region, eps))
