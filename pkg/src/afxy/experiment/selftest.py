"""Small-scale run of the invariant suite, used by ``afxy selftest``."""

from dataclasses import dataclass
import logging
import math
from typing import Callable, List

import numpy as np

from afxy.config import Config, default_config
from afxy.data.measures import AtomicMeasure
from afxy.data.region import Annulus, Disk, Rectangle, triangle_set
from afxy.data.spinfield import SpinField
from afxy.energy import energy_identity_residual, sample_from_continuum, to_auxiliary
from afxy.exceptions import AfxyError, InvariantViolationError
from afxy.experiment.scaling import BulkScaling, VortexScaling, linear_phase
from afxy.interpolation import Interpolant, InterpolationKind, jacobian_pairing, stokes_check
from afxy.recovery import VORTEX_EXCESS_CONSTANT, build_recovery, vortex_xy_bound_check
from afxy.strategy.ball_construction import BallConstruction, verify_properties
from afxy.strategy.extension import ZeroDegreeExtension, extension_ratio
from afxy.vorticity import (
    chirality_vorticity_implications, flat_norm, mass_bound_check, vorticity_measure, vorticity_values,
)

logger = logging.getLogger("afxy.selftest")

UNIT_SQUARE = Rectangle((0.0, 0.0), (1.0, 1.0))


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str

    def to_dict(self):
        return {"name": self.name, "ok": bool(self.ok), "detail": self.detail}


def random_field(rng: np.random.Generator, eps: float, region) -> SpinField:
    """Independent uniform phases on every site around a region."""
    return SpinField.from_function(eps, region, lambda z1, z2: rng.uniform(-math.pi, math.pi, size=z1.shape))


def random_measure(rng: np.random.Generator, atoms: int, lo: float = 0.05, hi: float = 0.95) -> AtomicMeasure:
    positions = rng.uniform(lo, hi, size=(atoms, 2))
    charges = rng.choice([-2, -1, 1, 2], size=atoms)
    return AtomicMeasure.from_arrays(positions, charges)


def random_balls(rng: np.random.Generator, count: int, attempts: int = 200):
    """Pairwise disjoint balls in [0, 10]^2 with a unit atom of random sign at each center."""
    balls = []
    for _ in range(attempts):
        if len(balls) == count:
            break
        center = rng.uniform(0.0, 10.0, size=2)
        radius = float(rng.uniform(0.05, 0.8))
        if all(math.dist(center, c) >= radius + r for c, r in balls):
            balls.append(((float(center[0]), float(center[1])), radius))
    mu = AtomicMeasure((c, int(rng.choice([-1, 1]))) for c, _ in balls)
    return balls, mu


def _bump(center, radius):
    """psi = (1 - |x - c|^2 / radius^2)^3 on the disk, 0 outside, and its gradient."""
    c = np.asarray(center, dtype=float)

    def psi(points):
        s = np.sum((np.atleast_2d(points) - c) ** 2, axis=1) / radius**2
        return np.where(s < 1, (1 - s) ** 3, 0.0)

    def grad(points):
        rel = np.atleast_2d(points) - c
        s = np.sum(rel**2, axis=1) / radius**2
        factor = np.where(s < 1, -6.0 * (1 - s) ** 2 / radius**2, 0.0)
        return factor[:, None] * rel

    return psi, grad


def _energy_identity(rng, config) -> CheckResult:
    eps = 0.02
    u = random_field(rng, eps, UNIT_SQUARE)
    residual = np.abs(energy_identity_residual(u, UNIT_SQUARE)).max()
    return CheckResult("energy_identity", residual <= 1e-12 * eps**2, f"max residual {residual:.3g}")


def _vorticity(rng, config) -> CheckResult:
    eps = 0.05
    u = random_field(rng, eps, UNIT_SQUARE)
    triangles = triangle_set(UNIT_SQUARE, eps)
    charges = vorticity_values(to_auxiliary(u), triangles)
    implications = chirality_vorticity_implications(u, triangles, config=config)
    mass = mass_bound_check(to_auxiliary(u), triangles)
    ok = set(np.unique(charges)) <= {-1, 0, 1} and implications.ok and not mass.violations
    return CheckResult("vorticity", ok, f"{implications.charged} charged of {implications.triangles}")


def _flat_norm(rng, config) -> CheckResult:
    worst = 0.0
    for _ in range(20):
        mu = random_measure(rng, int(rng.integers(1, 7)))
        worst = max(worst, abs(flat_norm(mu, UNIT_SQUARE) - flat_norm(mu, UNIT_SQUARE, method="lp")))
    return CheckResult("flat_norm", worst <= 1e-7, f"largest assignment/LP gap {worst:.3g}")


def _ball_construction(rng, config) -> CheckResult:
    failures = 0
    for _ in range(20):
        balls, mu = random_balls(rng, int(rng.integers(1, 21)))
        sigma = float(rng.uniform(0.0, 0.3))
        trace = BallConstruction(balls, mu, sigma, [0.0, 0.5, 1.0, 3.0, 10.0], config).run()
        if not verify_properties(trace, mu, sigma).ok:
            failures += 1
    return CheckResult("ball_construction", failures == 0, f"{failures} failing configurations")


def _stokes_and_jacobian(rng, config) -> CheckResult:
    eps = 1.0 / 32.0
    center = (0.5 + float(rng.uniform(-0.05, 0.05)), 0.5 + float(rng.uniform(-0.05, 0.05)))
    v = to_auxiliary(build_recovery(AtomicMeasure([(center, 1)]), eps, UNIT_SQUARE))
    stokes = stokes_check(v, Disk((0.5, 0.5), 0.3))
    psi, grad = _bump((0.5, 0.5), 0.4)
    mu = vorticity_measure(v, UNIT_SQUARE)
    expected = math.pi * sum(q * float(psi(np.array(p))[0]) for p, q in mu)
    pairing = jacobian_pairing(Interpolant(v, InterpolationKind.GEODESIC), psi, grad, UNIT_SQUARE, config)
    ok = stokes.clean and stokes.charge == stokes.winding == 1 and abs(pairing - expected) <= 1e-2 * math.pi
    return CheckResult(
        "stokes_jacobian", ok,
        f"charge {stokes.charge}, winding {stokes.winding}, pairing {pairing:.6g} vs {expected:.6g}",
    )


def smooth_phase(rng: np.random.Generator, waves: int = 3, amplitude: float = 0.25, frequency: float = 1.5):
    """Sum of small plane waves with random directions, a degree zero phase."""
    a = rng.uniform(-amplitude, amplitude, size=waves)
    k = rng.uniform(-frequency, frequency, size=(waves, 2))
    b = rng.uniform(0.0, 2 * math.pi, size=waves)

    def phase(x, y):
        return sum(a[m] * np.sin(k[m, 0] * x + k[m, 1] * y + b[m]) for m in range(waves))

    return phase


def _extension(rng, config) -> CheckResult:
    eps = 0.025
    annulus = Annulus((0.0, 0.0), 1.0, 2.0)
    v = sample_from_continuum(smooth_phase(rng), eps, Disk((0.0, 0.0), 2.5))
    try:
        strategy = ZeroDegreeExtension(v, annulus, config.replace(extension_c0=1.0, sampling_grid=4))
        out = strategy.run()
    except AfxyError as e:
        return CheckResult("extension", False, f"{type(e).__name__}: {e}")
    z1, z2 = v.sites()
    points = v.site_points()[z1 - v.origin[0], z2 - v.origin[1]]
    far = np.hypot(points[:, 0], points[:, 1]) > annulus.r + 3 * (annulus.R - annulus.r) / 8
    ratio = extension_ratio(v, out, annulus)
    ok = (
        len(vorticity_measure(out, annulus.outer_disk())) == 0
        and np.array_equal(out.phase_at(z1[far], z2[far]), v.phase_at(z1[far], z2[far]))
        and math.isfinite(ratio)
    )
    return CheckResult("extension", ok, f"rho {strategy.rho:.4g}, energy ratio {ratio:.4g}")


def _annulus_bound(rng, config) -> CheckResult:
    worst = 0.0
    ok = True
    for d in (1, 2):
        for eps in (2.0**-5, 2.0**-6):
            bound = vortex_xy_bound_check(d, 0.25, 0.5, eps)
            ok = ok and bound.ok
            worst = max(worst, abs(bound.excess) / (d * d * eps * eps))
    return CheckResult(
        "annulus_bound", ok and worst <= VORTEX_EXCESS_CONSTANT, f"largest |excess| / (d eps)^2 {worst:.3g}"
    )


def _bulk_scaling(rng, config) -> CheckResult:
    experiment = BulkScaling(linear_phase(), UNIT_SQUARE, [2.0**-3, 2.0**-4, 2.0**-5], config)
    gaps = experiment.run().sort_values("eps", ascending=False)["gap"].tolist()
    return CheckResult("bulk_scaling", gaps[-1] < gaps[0], "gaps " + ", ".join(f"{g:.3g}" for g in gaps))


def _vortex_scaling(rng, config) -> CheckResult:
    mu = AtomicMeasure([((0.5, 0.5), 1)])
    experiment = VortexScaling(mu, UNIT_SQUARE, [2.0**-3, 2.0**-4, 2.0**-5], config=config)
    table = experiment.run()
    slope = experiment.summary["slope"]
    ok = bool((table["mass"] == 1).all()) and slope > 0
    return CheckResult(
        "vortex_scaling", ok, f"slope {slope:.4g} against {experiment.summary['expected_slope']:.4g}"
    )


CHECKS: List[Callable] = [
    _energy_identity, _vorticity, _flat_norm, _ball_construction, _stokes_and_jacobian,
    _extension, _annulus_bound, _bulk_scaling, _vortex_scaling,
]


def run_selftest(config: Config = None, seed: int = 0) -> List[CheckResult]:
    """Run every check once.

    Raises:
        InvariantViolationError: some check failed; the message names them

    Returns:
        List[CheckResult]: results in a fixed order
    """
    config = config or default_config()
    rng = np.random.default_rng(seed)
    results = []
    for check in CHECKS:
        result = check(rng, config)
        logger.info("%s: %s (%s)", result.name, "ok" if result.ok else "FAILED", result.detail)
        results.append(result)
    failed = [r.name for r in results if not r.ok]
    if failed:
        raise InvariantViolationError(f"Self test failed: {', '.join(failed)}")
    return results
