"""Degree-constrained minimisation of the AFXY energy on an annulus."""

import logging
import math
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd

from afxy.config import Config, default_config
from afxy.data.region import Annulus
from afxy.data.spinfield import SpinField
from afxy.energy import energy_afxy, from_auxiliary, sample_from_continuum, to_auxiliary
from afxy.exceptions import InvariantViolationError, PreconditionError
from afxy.interpolation import Interpolant, InterpolationKind
from afxy.strategy.relaxation import ConstrainedRelaxation
from afxy.utils import TWO_PI
from afxy.vorticity import circle_loop, winding_number

from .experiment import Experiment
from .scaling import VORTEX_CONSTANT

logger = logging.getLogger("afxy.minima")


def vortex_start(d: int, annulus: Annulus, eps: float) -> SpinField:
    """AFXY field whose auxiliary field samples (x/|x|)^d around the annulus center."""
    cx, cy = annulus.center
    v = sample_from_continuum(
        lambda x, y: d * np.arctan2(y - cy, x - cx), eps, annulus, [annulus.center]
    )
    return from_auxiliary(v)


def annulus_degree(u: SpinField, annulus: Annulus) -> int:
    """Degree of the geodesic interpolant of the auxiliary field on the middle circle."""
    radius = 0.5 * (annulus.r + annulus.R)
    samples = 8 * int(math.ceil(TWO_PI * radius / u.eps)) + 8
    loop = circle_loop(annulus.center, radius, samples)
    return winding_number(loop, Interpolant(to_auxiliary(u), InterpolationKind.GEODESIC).eval)


def degree_constrained_minimization(
    d: int, r: float, R: float, eps: float, iters: int = None, config: Config = None
) -> float:
    """Relax the degree-d vortex on A(0, r, R) without creating vorticity.

    Args:
        d (int): degree in the hole
        r (float): inner radius, at least 2 eps
        R (float): outer radius
        eps (float): lattice spacing
        iters (int, optional): relaxation sweeps, ``relaxation_sweeps`` by default

    Raises:
        PreconditionError: r < 2 eps or r >= R
        InvariantViolationError: the relaxation raised the energy, charged a
            triangle or changed the degree

    Returns:
        float: E_eps / eps^2 of the relaxed field on the annulus
    """
    if not 2 * eps <= r < R:
        raise PreconditionError(f"Need 2 eps <= r < R, got eps={eps}, r={r}, R={R}")
    config = config or default_config()
    annulus = Annulus((0.0, 0.0), r, R)
    start = vortex_start(int(d), annulus, eps)
    relaxation = ConstrainedRelaxation(start, annulus, iters, config)
    relaxed = relaxation.run()
    energies = relaxation.energies
    slack = 1e-12 * max(energies[0], eps**2)
    if any(b > a + slack for a, b in zip(energies, energies[1:])):
        raise InvariantViolationError("Relaxation increased the energy")
    degree = annulus_degree(relaxed, annulus)
    if degree != d:
        raise InvariantViolationError(f"Relaxation changed the degree from {d} to {degree}")
    logger.debug(
        "d=%d eps=%g: E/eps^2 %.8g -> %.8g in %d sweeps, %d moves rejected",
        d, eps, energies[0] / eps**2, energies[-1] / eps**2, len(energies) - 1, relaxation.rejected,
    )
    return energy_afxy(relaxed, annulus) / eps**2


class DegreeConstrainedMinima(Experiment):
    """Relaxed degree-d energies on a fixed annulus for decreasing eps.

    Columns: eps, start_per_eps2 (the sampled vortex), relaxed_per_eps2,
    leading_per_eps2 (2 sqrt3 pi d^2 log(R/r)). The relaxed value is not
    asserted to reach the leading term; only the ordering relaxed <= start
    is checked.
    """

    columns = ["eps", "start_per_eps2", "relaxed_per_eps2", "leading_per_eps2"]

    def __init__(self, d: int, r: float, R: float, eps_list: Sequence[float], iters: int = None, config: Config = None):
        super().__init__(config)
        self.d = int(d)
        self.r = float(r)
        self.R = float(R)
        self.eps_list = [float(e) for e in eps_list]
        self.iters = iters

    def cells(self) -> List[float]:
        return list(self.eps_list)

    def cell(self, key: float) -> Dict[str, float]:
        eps = key
        annulus = Annulus((0.0, 0.0), self.r, self.R)
        start = energy_afxy(vortex_start(self.d, annulus, eps), annulus) / eps**2
        relaxed = degree_constrained_minimization(self.d, self.r, self.R, eps, self.iters, self.config)
        return {
            "eps": eps,
            "start_per_eps2": start,
            "relaxed_per_eps2": relaxed,
            "leading_per_eps2": VORTEX_CONSTANT * self.d**2 * math.log(self.R / self.r),
        }

    def summarize(self, table: pd.DataFrame) -> Dict[str, Any]:
        return {"d": self.d, "r": self.r, "R": self.R}

    def check(self, table: pd.DataFrame) -> bool:
        slack = 1e-9 * (1.0 + table["start_per_eps2"].abs())
        return bool((table["relaxed_per_eps2"] <= table["start_per_eps2"] + slack).all())
