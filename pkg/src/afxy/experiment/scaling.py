"""Energy scaling experiments for the bulk and vortex regimes.

Each experiment samples a continuum field on eps L for a list of lattice
spacings and tabulates the rescaled AFXY energy next to its predicted limit:

* bulk regime: E_eps / eps^2 tends to sqrt3 times the Dirichlet integral of
  the phase of the auxiliary field;
* vortex regime: E_eps / eps^2 grows like 2 sqrt3 pi |mu| log(1 / eps), and
  the vorticity measure of the auxiliary field converges flatly to mu.
"""

from dataclasses import dataclass
import math
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import dblquad

from afxy.config import Config
from afxy.data.measures import AtomicMeasure
from afxy.data.region import Annulus, Disk, Rectangle, Region
from afxy.energy import energy_afxy, from_auxiliary, sample_from_continuum, to_auxiliary
from afxy.exceptions import PreconditionError
from afxy.recovery import VORTEX_EXCESS_CONSTANT, build_recovery, vortex_xy_bound_check
from afxy.utils import SQRT3, TWO_PI
from afxy.vorticity import flat_norm, vorticity_measure

from .experiment import Experiment

VORTEX_CONSTANT = 2.0 * SQRT3 * math.pi

# relative growth tolerated between consecutive rows of a decreasing column
JITTER = 0.10


def fit_log_slope(rows: Sequence[Tuple[float, float]]) -> Tuple[float, float, float]:
    """Least-squares fit of E / eps^2 against log(1 / eps).

    Args:
        rows (Sequence[(eps, energy)]): at least three rows

    Raises:
        PreconditionError: fewer than three rows, or fewer than two distinct eps

    Returns:
        Tuple[float, float, float]: slope, intercept and coefficient of determination
    """
    if len(rows) < 3:
        raise PreconditionError("A slope fit needs at least three rows")
    eps = np.array([r[0] for r in rows], dtype=float)
    if np.any(eps <= 0):
        raise PreconditionError("eps values must be positive")
    x = np.log(1.0 / eps)
    if np.ptp(x) == 0:
        raise PreconditionError("A slope fit needs distinct eps values")
    y = np.array([r[1] for r in rows], dtype=float) / eps**2
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(residual**2)) / ss_tot
    return float(slope), float(intercept), r2


def _decreasing(values: Sequence[float], floor: float = 0.0) -> bool:
    """Every value is at most (1 + JITTER) times the previous one, or below floor."""
    return all(b <= (1 + JITTER) * a or b <= floor for a, b in zip(values, values[1:]))


# continuum phases with known gradients

@dataclass(frozen=True)
class Phase:
    """Smooth phase phi(x, y) of an auxiliary field together with its gradient."""

    name: str
    params: Dict[str, Any]
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]

    def __call__(self, x, y):
        return self.fn(x, y)

    def grad_squared(self, x, y) -> np.ndarray:
        gx, gy = self.grad(x, y)
        return gx * gx + gy * gy

    def to_dict(self) -> Dict:
        return {"kind": self.name, **self.params}


def linear_phase(a: Sequence[float] = (1.0, 2.0), b: float = 0.0) -> Phase:
    a1, a2 = float(a[0]), float(a[1])
    return Phase(
        "linear",
        {"a": [a1, a2], "b": float(b)},
        lambda x, y: a1 * np.asarray(x) + a2 * np.asarray(y) + b,
        lambda x, y: (np.full(np.shape(x), a1), np.full(np.shape(x), a2)),
    )


def sine_phase(k: float = 1.0) -> Phase:
    """phi = sin(2 pi k x)."""
    w = TWO_PI * float(k)
    return Phase(
        "sine",
        {"k": float(k)},
        lambda x, y: np.sin(w * np.asarray(x)) + 0.0 * np.asarray(y),
        lambda x, y: (w * np.cos(w * np.asarray(x)), np.zeros(np.shape(x))),
    )


def constant_phase(value: float = 0.0) -> Phase:
    value = float(value)
    return Phase(
        "constant",
        {"value": value},
        lambda x, y: np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, value),
        lambda x, y: (np.zeros(np.shape(x)), np.zeros(np.shape(x))),
    )


def numeric_phase(fn: Callable[[np.ndarray, np.ndarray], np.ndarray], h: float = 1e-6) -> Phase:
    """Wrap a plain phase function; the gradient is taken by central differences."""

    def grad(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        gx = (np.asarray(fn(x + h, y)) - np.asarray(fn(x - h, y))) / (2 * h)
        gy = (np.asarray(fn(x, y + h)) - np.asarray(fn(x, y - h))) / (2 * h)
        return gx, gy

    return Phase(getattr(fn, "__name__", "custom"), {}, fn, grad)


BUILTIN_PHASES = {"linear": linear_phase, "sine": sine_phase, "constant": constant_phase}


def phase_from_dict(description: Dict) -> Phase:
    """Build a builtin phase from {"kind": name, **parameters}.

    Raises:
        PreconditionError: unknown kind or bad parameters
    """
    description = dict(description)
    kind = str(description.pop("kind", "")).lower()
    if kind not in BUILTIN_PHASES:
        raise PreconditionError(f"Unknown phase {kind!r}; builtins are {sorted(BUILTIN_PHASES)}")
    try:
        return BUILTIN_PHASES[kind](**description)
    except (TypeError, ValueError) as exc:
        raise PreconditionError(f"Bad parameters for phase {kind!r}: {exc}") from exc


def dirichlet_reference(phase: Phase, region: Region, tolerance: float = 1e-8) -> float:
    """sqrt3 times the integral of |grad phi|^2 over the region, by adaptive quadrature."""

    def integrand(y, x):
        return float(phase.grad_squared(np.float64(x), np.float64(y)))

    def disk_integral(center, radius):
        cx, cy = center
        return dblquad(
            integrand, cx - radius, cx + radius,
            lambda x: cy - math.sqrt(max(radius**2 - (x - cx) ** 2, 0.0)),
            lambda x: cy + math.sqrt(max(radius**2 - (x - cx) ** 2, 0.0)),
            epsabs=tolerance, epsrel=tolerance,
        )[0]

    if isinstance(region, Rectangle):
        value = dblquad(
            integrand, region.lo[0], region.hi[0], region.lo[1], region.hi[1],
            epsabs=tolerance, epsrel=tolerance,
        )[0]
    elif isinstance(region, Annulus):
        value = disk_integral(region.center, region.R)
        if region.r > 0:
            value -= disk_integral(region.center, region.r)
    elif isinstance(region, Disk):
        value = disk_integral(region.center, region.radius)
    else:
        raise TypeError(f"No quadrature for {type(region).__name__}")
    return SQRT3 * value


class BulkScaling(Experiment):
    """E_eps(u_eps, region) / eps^2 against sqrt3 times the Dirichlet integral.

    u_eps is the AFXY field whose auxiliary field samples exp(i phi).

    Columns: eps, energy_per_eps2, reference, gap. The gap is relative to the
    reference, or absolute when the reference vanishes.
    """

    columns = ["eps", "energy_per_eps2", "reference", "gap"]

    # final gap accepted by check
    final_gap = 0.03

    def __init__(self, phase: Phase, region: Region, eps_list: Sequence[float], config: Config = None):
        super().__init__(config)
        self.phase = phase
        self.region = region
        self.eps_list = [float(e) for e in eps_list]
        self._reference: Optional[float] = None

    @property
    def reference(self) -> float:
        if self._reference is None:
            self._reference = dirichlet_reference(self.phase, self.region, self.config.quadrature_tolerance)
            self.logger.debug("Reference energy for %s on %s: %.12g", self.phase.name, self.region, self._reference)
        return self._reference

    def cells(self) -> List[float]:
        return list(self.eps_list)

    def cell(self, key: float) -> Dict[str, float]:
        eps = key
        u = from_auxiliary(sample_from_continuum(self.phase, eps, self.region))
        energy = energy_afxy(u, self.region) / eps**2
        ref = self.reference
        gap = abs(energy - ref) / ref if ref > 0 else abs(energy)
        self.logger.debug("eps=%g: E/eps^2=%.10g, gap %.4g", eps, energy, gap)
        return {"eps": eps, "energy_per_eps2": energy, "reference": ref, "gap": gap}

    def run(self) -> pd.DataFrame:
        _ = self.reference
        return super().run()

    def summarize(self, table: pd.DataFrame) -> Dict[str, Any]:
        return {
            "phase": self.phase.to_dict(),
            "region": self.region.to_dict(),
            "reference": self.reference,
            "final_gap": float(table["gap"].iloc[-1]) if len(table) else math.nan,
        }

    def check(self, table: pd.DataFrame) -> bool:
        """The gap shrinks up to jitter as eps decreases and ends below 3%."""
        gaps = table.sort_values("eps", ascending=False)["gap"].tolist()
        return bool(gaps) and _decreasing(gaps, floor=1e-12) and gaps[-1] < self.final_gap


class VortexScaling(Experiment):
    """Recovery fields of an atomic measure and their energy growth.

    Columns: eps, energy_per_eps2, energy_per_eps2_log (E / (eps^2 |log eps|)),
    flat_norm (of mu_v - mu), mass (|mu_v|). The summary holds the fitted
    slope of E / eps^2 against log(1 / eps) and the predicted 2 sqrt3 pi |mu|.

    Args:
        mu (AtomicMeasure): target measure, atoms strictly inside the region
        region (Region): domain
        eps_list (Sequence[float]): lattice spacings
        split (int, optional): fixed n for splitting atoms of multiplicity
            above one; by default n depends on eps
    """

    columns = ["eps", "energy_per_eps2", "energy_per_eps2_log", "flat_norm", "mass"]

    slope_tolerance = 0.10
    flat_factor = 10.0

    def __init__(
        self,
        mu: AtomicMeasure,
        region: Region,
        eps_list: Sequence[float],
        split: Optional[int] = None,
        config: Config = None,
    ):
        super().__init__(config)
        self.mu = mu
        self.region = region
        self.eps_list = [float(e) for e in eps_list]
        self.split = split

    @property
    def expected_slope(self) -> float:
        return VORTEX_CONSTANT * self.mu.mass()

    def cells(self) -> List[float]:
        return list(self.eps_list)

    def cell(self, key: float) -> Dict[str, float]:
        eps = key
        u = build_recovery(self.mu, eps, self.region, self.split)
        energy = energy_afxy(u, self.region)
        mu_v = vorticity_measure(to_auxiliary(u), self.region)
        distance = flat_norm(mu_v - self.mu, self.region)
        self.logger.debug("eps=%g: E/eps^2=%.10g, flat %.4g, |mu_v|=%d", eps, energy / eps**2, distance, mu_v.mass())
        return {
            "eps": eps,
            "energy_per_eps2": energy / eps**2,
            "energy_per_eps2_log": energy / (eps**2 * abs(math.log(eps))),
            "flat_norm": distance,
            "mass": mu_v.mass(),
        }

    def summarize(self, table: pd.DataFrame) -> Dict[str, Any]:
        summary = {"expected_slope": self.expected_slope, "measure": self.mu.to_list()}
        if len(table) >= 3:
            rows = list(zip(table["eps"], table["energy_per_eps2"] * table["eps"] ** 2))
            slope, intercept, r2 = fit_log_slope(rows)
            summary.update(slope=slope, intercept=intercept, r2=r2)
            if self.expected_slope > 0:
                summary["slope_error"] = abs(slope - self.expected_slope) / self.expected_slope
            self.logger.info("Fitted slope %.6g against %.6g (r2=%.6f)", slope, self.expected_slope, r2)
        return summary

    def check(self, table: pd.DataFrame) -> bool:
        """Slope within 10% of 2 sqrt3 pi |mu|, flat norm shrinking and below 10 eps at the end."""
        table = table.sort_values("eps", ascending=False)
        rows = list(zip(table["eps"], table["energy_per_eps2"] * table["eps"] ** 2))
        slope, _, _ = fit_log_slope(rows)
        if self.expected_slope > 0:
            slope_ok = abs(slope - self.expected_slope) <= self.slope_tolerance * self.expected_slope
        else:
            slope_ok = abs(slope) <= self.slope_tolerance
        flat = table["flat_norm"].tolist()
        flat_ok = (
            _decreasing(flat, floor=1e-12)
            and flat[-1] <= flat[0]
            and flat[-1] < self.flat_factor * float(table["eps"].iloc[-1])
        )
        return bool(slope_ok and flat_ok)


class AnnulusUpperBound(Experiment):
    """XY energy of the sampled vortex (x/|x|)^d on A(0, r, R) for decreasing eps.

    Columns: eps, xy_per_eps2, leading_per_eps2 (2 sqrt3 pi d^2 log(R/r)),
    excess_per_eps2.
    """

    columns = ["eps", "xy_per_eps2", "leading_per_eps2", "excess_per_eps2"]

    # bound on |excess| accepted by check
    excess_bound = VORTEX_EXCESS_CONSTANT

    def __init__(self, d: int, r: float, R: float, eps_list: Sequence[float], config: Config = None):
        super().__init__(config)
        self.d = int(d)
        self.r = float(r)
        self.R = float(R)
        self.eps_list = [float(e) for e in eps_list]

    def cells(self) -> List[float]:
        return list(self.eps_list)

    def cell(self, key: float) -> Dict[str, float]:
        eps = key
        bound = vortex_xy_bound_check(self.d, self.r, self.R, eps)
        return {
            "eps": eps,
            "xy_per_eps2": bound.measured / eps**2,
            "leading_per_eps2": bound.leading / eps**2,
            "excess_per_eps2": bound.excess / eps**2,
        }

    def summarize(self, table: pd.DataFrame) -> Dict[str, Any]:
        excess = table["excess_per_eps2"].abs()
        return {"d": self.d, "r": self.r, "R": self.R, "max_abs_excess": float(excess.max()) if len(table) else 0.0}

    def check(self, table: pd.DataFrame) -> bool:
        """|excess| stays below one constant and does not grow as eps decreases."""
        table = table.sort_values("eps", ascending=False)
        excess = table["excess_per_eps2"].abs().to_numpy()
        if len(excess) == 0 or excess.max() > self.excess_bound:
            return False
        if len(excess) < 2:
            return True
        trend = np.polyfit(np.log2(1.0 / table["eps"].to_numpy()), excess, 1)[0]
        return bool(trend <= 0)
