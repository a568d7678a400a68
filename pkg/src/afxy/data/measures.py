"""Atomic measures with integer charges."""

import json
import math
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from afxy.exceptions import PreconditionError
from .lattice import TriangleId

Point = Tuple[float, float]


class AtomicMeasure:
    """Finite sum of Dirac masses with nonzero integer charges.

    Atoms at the same position are merged; atoms whose charges cancel are
    dropped.
    """

    def __init__(self, atoms: Iterable[Tuple[Point, int]] = ()):
        merged: Dict[Point, int] = {}
        for position, charge in atoms:
            if int(charge) != charge:
                raise ValueError(f"Charges must be integers, got {charge}")
            key = (float(position[0]), float(position[1]))
            merged[key] = merged.get(key, 0) + int(charge)
        self.atoms: List[Tuple[Point, int]] = [(p, q) for p, q in merged.items() if q != 0]

    @classmethod
    def from_arrays(cls, positions, charges) -> "AtomicMeasure":
        positions = np.asarray(positions, dtype=float).reshape(-1, 2)
        return cls(zip(map(tuple, positions.tolist()), np.asarray(charges, dtype=int).tolist()))

    def positions(self) -> np.ndarray:
        return np.array([p for p, _ in self.atoms], dtype=float).reshape(-1, 2)

    def charges(self) -> np.ndarray:
        return np.array([q for _, q in self.atoms], dtype=int)

    def mass(self) -> int:
        """Total variation |mu|."""
        return sum(abs(q) for _, q in self.atoms)

    def total(self) -> int:
        return sum(q for _, q in self.atoms)

    def charge_in_ball(self, center: Point, radius: float, closed: bool = True) -> int:
        total = 0
        for p, q in self.atoms:
            d = math.hypot(p[0] - center[0], p[1] - center[1])
            if d < radius or (closed and d <= radius):
                total += q
        return total

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        return AtomicMeasure(list(self.atoms) + list(other.atoms))

    def __neg__(self) -> "AtomicMeasure":
        return AtomicMeasure((p, -q) for p, q in self.atoms)

    def __sub__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        return self + (-other)

    def __mul__(self, k: int) -> "AtomicMeasure":
        return AtomicMeasure((p, k * q) for p, q in self.atoms)

    __rmul__ = __mul__

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def __eq__(self, other):
        if not isinstance(other, AtomicMeasure):
            return NotImplemented
        return sorted(self.atoms) == sorted(other.atoms)

    def __repr__(self):
        terms = " ".join(f"{q:+d}@({p[0]:.4g},{p[1]:.4g})" for p, q in self.atoms)
        return f"AtomicMeasure({terms})"

    # serialization

    def to_list(self) -> List[Dict]:
        return [{"x": p[0], "y": p[1], "charge": q} for p, q in self.atoms]

    @classmethod
    def from_list(cls, items: Sequence[Dict]) -> "AtomicMeasure":
        try:
            return cls(((float(a["x"]), float(a["y"])), int(a["charge"])) for a in items)
        except (KeyError, TypeError, ValueError) as exc:
            raise PreconditionError(f"Malformed atomic measure: {exc}") from exc

    def to_json(self, path: Optional[Union[str, Path]] = None) -> str:
        text = json.dumps(self.to_list())
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    @classmethod
    def from_json(cls, source: Union[str, Path]) -> "AtomicMeasure":
        text = str(source)
        if not text.lstrip().startswith("["):
            text = Path(source).read_text(encoding="utf-8")
        return cls.from_list(json.loads(text))


class VorticityMeasure(AtomicMeasure):
    """Vorticity measure mu_v: unit charges at barycenters of charged triangles."""

    def __init__(self, triangles: Sequence[TriangleId], charges: Sequence[int], eps: float):
        triangles = list(triangles)
        charges = [int(q) for q in charges]
        if len(triangles) != len(charges):
            raise ValueError("One charge per triangle is required")
        if any(q not in (-1, 1) for q in charges):
            raise ValueError("Triangle charges must be +1 or -1")
        super().__init__((T.barycenter(eps), q) for T, q in zip(triangles, charges))
        self.triangles = triangles
        self.triangle_charges = charges
        self.eps = eps

    def by_triangle(self) -> Dict[TriangleId, int]:
        return dict(zip(self.triangles, self.triangle_charges))
