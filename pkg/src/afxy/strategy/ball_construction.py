"""Expansion and merging of disjoint balls.

Starting from disjoint closed balls carrying the charges of an atomic
measure, every ball is first inflated by sigma. From then on all radii grow
by the common factor (1 + t) / (1 + T_k) between merging times T_k; when two
closures meet, each connected cluster of touching balls is replaced by one
ball containing it whose radius is at most the sum of the cluster's radii.
Merging cascades until the family is disjoint again. Events are computed
analytically: two balls at distance d with radii r_i, r_j at time T touch at
1 + t = (1 + T) d / (r_i + r_j).
"""

from dataclasses import dataclass, field
import math
from typing import List, Sequence, Tuple

import igraph as ig
import numpy as np

from afxy.config import Config
from afxy.data.balls import Ball, BallFamily
from afxy.data.measures import AtomicMeasure
from afxy.exceptions import PreconditionError

from .strategy import Strategy

Point = Tuple[float, float]

# relative slack when deciding whether two closed balls meet
TOUCH_TOL = 1e-12
# relative slack of verify_properties
CHECK_TOL = 1e-9


def _enclose(center: np.ndarray, radius: float, other: Ball) -> Tuple[np.ndarray, float]:
    """Smallest ball containing a ball and another ball."""
    offset = np.asarray(other.center) - center
    d = float(np.hypot(*offset))
    if d + other.radius <= radius:
        return center, radius
    if d + radius <= other.radius:
        return np.asarray(other.center, dtype=float), other.radius
    new_radius = 0.5 * (radius + other.radius + d)
    return center + (new_radius - radius) / d * offset, new_radius


def merge_cluster(balls: Sequence) -> Tuple[Point, float]:
    """Return a ball containing all the given balls.

    The largest ball is taken first; then the largest remaining ball that
    touches the current enclosing ball is absorbed with the pairwise formula
    r = (r1 + r2 + d) / 2. For a connected cluster of touching balls a
    touching ball always exists, and d <= r1 + r2 gives r <= r1 + r2 at
    every step, so the final radius is at most the sum of the input radii.

    Args:
        balls (Sequence[Ball | (center, radius)]): nonempty list

    Returns:
        Tuple[Point, float]: center and radius of the enclosing ball
    """
    items = [b if isinstance(b, Ball) else Ball(b[0], b[1]) for b in balls]
    if not items:
        raise ValueError("Cannot merge an empty cluster")
    remaining = sorted(items, key=lambda b: (-b.radius, b.center))
    first = remaining.pop(0)
    center, radius = np.asarray(first.center, dtype=float), first.radius
    while remaining:
        touching = [
            b for b in remaining
            if math.hypot(b.center[0] - center[0], b.center[1] - center[1])
            <= (radius + b.radius) * (1 + TOUCH_TOL)
        ]
        nxt = (touching or remaining)[0]
        remaining.remove(nxt)
        center, radius = _enclose(center, radius, nxt)
    return (float(center[0]), float(center[1])), float(radius)


def _pair_data(balls: Sequence[Ball]):
    centers = np.array([b.center for b in balls], dtype=float).reshape(-1, 2)
    radii = np.array([b.radius for b in balls], dtype=float)
    dist = np.linalg.norm(centers[:, None, :] - centers[None, :, :], axis=-1)
    sums = radii[:, None] + radii[None, :]
    return dist, sums


class BallConstruction(Strategy):
    """Run the ball construction and report the families at query times.

    Args:
        initial (Sequence[(center, radius)]): pairwise disjoint open balls
        mu (AtomicMeasure): measure supported in the union of the closed balls
        sigma (float): inflation, sigma >= 0
        query_times (Sequence[float]): times t >= 0
    """

    def __init__(
        self,
        initial: Sequence,
        mu: AtomicMeasure,
        sigma: float,
        query_times: Sequence[float],
        config: Config = None,
    ):
        super().__init__(config)
        self.initial = [b if isinstance(b, Ball) else Ball(b[0], b[1]) for b in initial]
        self.mu = mu
        self.sigma = float(sigma)
        self.query_times = sorted(float(t) for t in query_times)
        self.merging_times: List[float] = []

    def _check_input(self):
        if not self.initial:
            raise PreconditionError("The ball construction needs at least one ball")
        if self.sigma < 0:
            raise PreconditionError("sigma must be nonnegative")
        if self.query_times and self.query_times[0] < 0:
            raise PreconditionError("Query times must be nonnegative")
        dist, sums = _pair_data(self.initial)
        overlap = (dist < sums * (1 - TOUCH_TOL)) & ~np.eye(len(self.initial), dtype=bool)
        if overlap.any():
            i, j = np.argwhere(overlap)[0]
            raise PreconditionError(f"Initial balls {self.initial[i]} and {self.initial[j]} overlap")

    def _initial_charges(self) -> List[int]:
        charges = [0] * len(self.initial)
        for position, charge in self.mu:
            for idx, ball in enumerate(self.initial):
                d = math.hypot(position[0] - ball.center[0], position[1] - ball.center[1])
                if d <= ball.radius * (1 + CHECK_TOL):
                    charges[idx] += charge
                    break
            else:
                raise PreconditionError(f"Atom at {position} lies outside every initial ball")
        return charges

    def _merge_touching(self, balls: List[Ball]) -> Tuple[List[Ball], bool]:
        merged_any = False
        while len(balls) > 1:
            dist, sums = _pair_data(balls)
            touching = np.argwhere(np.triu(dist <= sums * (1 + TOUCH_TOL), k=1))
            if len(touching) == 0:
                break
            merged_any = True
            graph = ig.Graph(len(balls), touching.tolist())
            new_balls = []
            for members in graph.connected_components():
                cluster = [balls[i] for i in members]
                if len(cluster) == 1:
                    new_balls.append(cluster[0])
                    continue
                center, radius = merge_cluster(cluster)
                new_balls.append(Ball(
                    center, radius,
                    sum(b.charge for b in cluster),
                    frozenset().union(*(b.members for b in cluster)),
                ))
            balls = new_balls
        return balls, merged_any

    @staticmethod
    def _next_event(balls: List[Ball], time: float) -> float:
        if len(balls) < 2:
            return math.inf
        dist, sums = _pair_data(balls)
        ratio = dist / sums
        np.fill_diagonal(ratio, np.inf)
        return (1.0 + time) * float(ratio.min()) - 1.0

    def run(self) -> List[BallFamily]:
        """Run the construction.

        Raises:
            PreconditionError: overlapping initial balls or atoms outside them

        Returns:
            List[BallFamily]: one family per query time, in increasing time order
        """
        self._check_input()
        charges = self._initial_charges()
        balls = [
            Ball(b.center, b.radius + self.sigma, q, frozenset([i]))
            for i, (b, q) in enumerate(zip(self.initial, charges))
        ]
        time = 0.0
        balls, merged = self._merge_touching(balls)
        self.merging_times = [0.0] if merged else []
        if merged:
            self.logger.debug("Inflated balls touch; merged into %d balls at t=0", len(balls))

        families = []
        for query in self.query_times:
            while True:
                event = self._next_event(balls, time)
                if event > query + TOUCH_TOL * (1 + query):
                    break
                balls = [b.scaled((1 + event) / (1 + time)) for b in balls]
                time = event
                balls, _ = self._merge_touching(balls)
                self.merging_times.append(time)
                self.logger.debug("Merging time %.6g: %d balls remain", time, len(balls))
            snapshot = [b.scaled((1 + query) / (1 + time)) for b in balls]
            families.append(BallFamily(
                query, snapshot, [t for t in self.merging_times if t <= query + TOUCH_TOL * (1 + query)],
                self.initial,
            ))
        return families


@dataclass
class LedgerEntry:
    """|mu(B)| log((1 + t2) / (1 + t1)) summed over the balls of a merge-free interval."""

    t1: float
    t2: float
    value: float


@dataclass
class BallReport:
    violations: List[str] = field(default_factory=list)
    ledger: List[LedgerEntry] = field(default_factory=list)
    ledger_additive: bool = True

    @property
    def ok(self) -> bool:
        return not self.violations and self.ledger_additive and all(e.value >= 0 for e in self.ledger)


def _closed_charge(mu: AtomicMeasure, ball: Ball) -> int:
    return mu.charge_in_ball(ball.center, ball.radius * (1 + CHECK_TOL))


def _check_family(family: BallFamily, mu: AtomicMeasure, sigma: float, report: BallReport):
    t = family.time
    balls = family.balls
    tag = f"t={t:.6g}"
    if len(balls) > 1:
        dist, sums = _pair_data(balls)
        meet = np.triu(dist <= sums, k=1)
        for i, j in np.argwhere(meet):
            report.violations.append(f"(2) {tag}: closures of {balls[i]} and {balls[j]} meet")
    for ball in balls:
        # (4) no atom in the collar r - sigma < |x - c| < r + sigma
        for position, _ in mu:
            d = math.hypot(position[0] - ball.center[0], position[1] - ball.center[1])
            slack = CHECK_TOL * ball.radius
            if ball.radius - sigma + slack < d < ball.radius + sigma - slack:
                report.violations.append(f"(4) {tag}: atom {position} in the collar of {ball}")
        # (6) r(B') >= (1 + t) r(B) for every initial B inside B'
        for idx in ball.members:
            if idx < len(family.initial):
                r0 = family.initial[idx].radius
                if ball.radius < (1 + t) * r0 * (1 - CHECK_TOL):
                    report.violations.append(f"(6) {tag}: {ball} smaller than (1+t) r0 = {(1 + t) * r0:.6g}")
        if _closed_charge(mu, ball) != ball.charge:
            report.violations.append(f"charge {tag}: {ball} carries {_closed_charge(mu, ball)}")
    if family.initial:
        bound = (1 + t) * (sum(b.radius for b in family.initial) + len(family.initial) * sigma)
        if family.total_radius() > bound * (1 + CHECK_TOL):
            report.violations.append(f"(5) {tag}: total radius {family.total_radius():.6g} > {bound:.6g}")
        for b in family.initial:
            if not any(ball.contains_ball(b, CHECK_TOL * ball.radius) for ball in balls):
                report.violations.append(f"(1) {tag}: initial {b} not covered")
    if sum(b.charge for b in balls) != mu.total():
        report.violations.append(f"charge {tag}: total charge not conserved")


def _merge_free(first: BallFamily, second: BallFamily) -> bool:
    return not any(first.time < m <= second.time for m in second.merging_times)


def _ledger(first: BallFamily, second: BallFamily) -> float:
    growth = math.log((1 + second.time) / (1 + first.time))
    return math.fsum(abs(b.charge) * growth for b in second.balls)


def verify_properties(trace: Sequence[BallFamily], mu: AtomicMeasure, sigma: float) -> BallReport:
    """Check the properties of a ball construction trace.

    Checked per family: disjoint closures (2), the empty collar (4), the
    total radius bound (5), radius growth (6), coverage of the initial balls
    and charge bookkeeping. Across consecutive families: monotone inclusion
    (1) and, on merge-free intervals, the logarithmic growth ledger used in
    place of (3).

    Args:
        trace (Sequence[BallFamily]): output of the ball construction
        mu (AtomicMeasure): measure the construction was run with
        sigma (float): inflation the construction was run with

    Returns:
        BallReport: violations and ledger
    """
    report = BallReport()
    trace = sorted(trace, key=lambda f: f.time)
    for family in trace:
        _check_family(family, mu, sigma, report)
    for first, second in zip(trace, trace[1:]):
        for ball in first.balls:
            if not any(b.contains_ball(ball, CHECK_TOL * b.radius) for b in second.balls):
                report.violations.append(
                    f"(1) t={first.time:.6g}->{second.time:.6g}: {ball} not contained later"
                )
        if _merge_free(first, second):
            report.ledger.append(LedgerEntry(first.time, second.time, _ledger(first, second)))
    for a, b, c in zip(trace, trace[1:], trace[2:]):
        if _merge_free(a, b) and _merge_free(b, c):
            whole = _ledger(a, c)
            parts = _ledger(a, b) + _ledger(b, c)
            if abs(whole - parts) > CHECK_TOL * max(1.0, abs(whole)):
                report.ledger_additive = False
    if trace and trace[-1].initial and len(trace[-1].merging_times) > len(trace[-1].initial):
        report.violations.append("more merging times than initial balls")
    return report
