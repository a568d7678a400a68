"""Families of closed balls produced by the ball construction."""

import math
from typing import Dict, FrozenSet, List, Sequence, Tuple

Point = Tuple[float, float]


class Ball:
    """Closed ball with the charge and initial balls it carries."""

    def __init__(self, center: Point, radius: float, charge: int = 0, members: FrozenSet[int] = frozenset()):
        if not radius > 0:
            raise ValueError(f"Ball radius must be positive, got {radius}")
        self.center = (float(center[0]), float(center[1]))
        self.radius = float(radius)
        self.charge = int(charge)
        self.members = frozenset(members)

    def distance(self, other: "Ball") -> float:
        return math.hypot(self.center[0] - other.center[0], self.center[1] - other.center[1])

    def contains_ball(self, other: "Ball", tol: float = 0.0) -> bool:
        return self.distance(other) + other.radius <= self.radius + tol

    def scaled(self, factor: float) -> "Ball":
        return Ball(self.center, self.radius * factor, self.charge, self.members)

    def to_dict(self) -> Dict:
        return {"cx": self.center[0], "cy": self.center[1], "r": self.radius, "charge": self.charge}

    def __repr__(self):
        return f"Ball(({self.center[0]:.6g}, {self.center[1]:.6g}), r={self.radius:.6g}, q={self.charge:+d})"


class BallFamily:
    """Snapshot of the ball construction at one time.

    Attributes:
        time (float): parameter t >= 0
        balls (List[Ball]): pairwise disjoint closed balls
        merging_times (List[float]): merging times not later than ``time``
        initial (List[Ball]): the balls the construction started from, before inflation
    """

    def __init__(
        self,
        time: float,
        balls: Sequence[Ball],
        merging_times: Sequence[float],
        initial: Sequence[Ball] = (),
    ):
        self.time = float(time)
        self.balls = list(balls)
        self.merging_times = sorted(float(t) for t in merging_times)
        self.initial = list(initial)

    def total_radius(self) -> float:
        return math.fsum(b.radius for b in self.balls)

    def to_dict(self) -> Dict:
        return {
            "t": self.time,
            "balls": [{"cx": b.center[0], "cy": b.center[1], "r": b.radius} for b in self.balls],
            "charges": [b.charge for b in self.balls],
            "merging_times": list(self.merging_times),
        }

    def __len__(self):
        return len(self.balls)

    def __repr__(self):
        return f"BallFamily(t={self.time:.6g}, {len(self.balls)} balls, R={self.total_radius():.6g})"
