"""Removal of neutral vortex clusters by ball construction and extension."""

from typing import List, Optional, Tuple

from afxy.config import Config
from afxy.data.balls import Ball
from afxy.data.region import Annulus
from afxy.data.spinfield import SpinField
from afxy.energy import Where, from_auxiliary, to_auxiliary
from afxy.exceptions import AfxyError
from afxy.utils import SQRT3
from afxy.vorticity import vorticity_measure

from .ball_construction import BallConstruction
from .extension import ZeroDegreeExtension
from .strategy import Strategy


class DipoleAnnihilation(Strategy):
    """Make every neutral ball of the ball construction vortex-free.

    The vortices of the auxiliary field are seeded as balls of radius
    eps / (2 sqrt 3) at the triangle barycenters and grown up to the
    configured time. Each ball B_rho(c) of zero net charge is then replaced,
    through the zero-degree extension on the annulus A(c, rho, beta rho), by
    a field without vorticity in B_rho. Balls whose extension fails are left
    as they are and listed in ``failures``.

    Args:
        u (SpinField): AFXY field
        region (Region | TriangleSet): region, or explicit triangles, whose
            vortices are considered
        sigma (float, optional): inflation of the ball construction,
            ``annihilation_sigma`` eps by default
    """

    def __init__(self, u: SpinField, region: Where, sigma: Optional[float] = None, config: Config = None):
        super().__init__(config)
        self.u = u
        self.region = region
        self.sigma = self.config.annihilation_sigma * u.eps if sigma is None else float(sigma)
        self.balls: List[Ball] = []
        self.extended: List[Ball] = []
        self.failures: List[Tuple[Ball, str]] = []

    def run(self) -> SpinField:
        eps = self.u.eps
        v = to_auxiliary(self.u)
        mu = vorticity_measure(v, self.region)
        if len(mu) == 0:
            self.logger.debug("No vortices to annihilate")
            return self.u
        seeds = [(position, eps / (2.0 * SQRT3)) for position, _ in mu]
        construction = BallConstruction(
            seeds, mu, self.sigma, [self.config.annihilation_time], self.config
        )
        self.balls = construction.run()[0].balls
        neutral = [b for b in self.balls if b.charge == 0]
        self.logger.debug(
            "%d vortices grouped into %d balls, %d neutral", len(mu), len(self.balls), len(neutral)
        )
        for ball in neutral:
            annulus = Annulus(ball.center, ball.radius, self.config.annihilation_beta * ball.radius)
            try:
                v = ZeroDegreeExtension(v, annulus, self.config).run()
            except AfxyError as exc:
                self.logger.warning("Extension around %s failed: %s", ball, exc)
                self.failures.append((ball, str(exc)))
            else:
                self.extended.append(ball)
        return from_auxiliary(v)
