"""Tunable constants of afxy.

All thresholds the source material only asserts to exist (eta(lambda), C0,
quadrature tolerances, ...) are configuration, loaded from the packaged
``defaults.json`` and overridable by a user file or keyword arguments.
"""

import dataclasses
import json
import logging
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Optional, Union

logger = logging.getLogger("afxy.config")

WORKERS_ENV = "AFXY_WORKERS"


@dataclass(frozen=True)
class Config:
    """Versioned set of numerical defaults."""

    version: int = 1
    eta_table: Dict[str, float] = field(default_factory=lambda: {"0.5": 0.05, "0.1": 0.005})
    chirality_eta: float = 0.5
    chirality_eta_prime: float = 0.25
    extension_c0: float = 1000.0
    extension_c1: float = 50.0
    extension_enforce_smallness: bool = True
    extension_layer_factor: float = 9.0
    extension_margin: float = 4.0
    extension_radius_resolution: float = 0.25
    sampling_grid: int = 16
    monodromy_tolerance: float = 1e-9
    jacobian_sectors: int = 48
    quadrature_tolerance: float = 1e-8
    annihilation_time: float = 15.0
    annihilation_sigma: float = 3.0
    annihilation_beta: float = 2.0
    relaxation_sweeps: int = 60
    workers: int = 1

    def eta_for(self, lam: float) -> float:
        """Return the chirality threshold eta paired with lambda in the table.

        Args:
            lam (float): tolerance lambda in (0, 1)

        Raises:
            ValueError: lambda is not in the table

        Returns:
            float: eta(lambda)
        """
        for key, eta in self.eta_table.items():
            if abs(float(key) - lam) < 1e-12:
                return eta
        raise ValueError(f"No eta configured for lambda={lam}; known: {sorted(self.eta_table)}")

    def replace(self, **overrides) -> "Config":
        """Return a copy with some fields replaced."""
        return dataclasses.replace(self, **overrides)

    def to_dict(self) -> Dict:
        return dataclasses.asdict(self)


def _read_defaults() -> Dict:
    text = resources.files("afxy").joinpath("defaults.json").read_text(encoding="utf-8")
    return json.loads(text)


def _validate(values: Dict) -> Dict:
    known = {f.name for f in dataclasses.fields(Config)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"Unknown configuration keys: {sorted(unknown)}")
    return values


def load_config(path: Optional[Union[str, Path]] = None, **overrides) -> Config:
    """Build a Config from packaged defaults, an optional JSON file and overrides.

    Args:
        path (str | Path, optional): user JSON file with a subset of the keys
        **overrides: individual keys, applied last

    Returns:
        Config: merged configuration
    """
    values = _validate(_read_defaults())
    if path is not None:
        user = json.loads(Path(path).read_text(encoding="utf-8"))
        logger.debug("Loaded %d configuration keys from %s", len(user), path)
        values.update(_validate(user))
    env_workers = os.environ.get(WORKERS_ENV)
    if env_workers:
        values["workers"] = int(env_workers)
    values.update(_validate(overrides))
    if values["workers"] < 1:
        raise ValueError("workers must be positive")
    return Config(**values)


_DEFAULT: Optional[Config] = None


def default_config() -> Config:
    """Return the process-wide default configuration."""
    global _DEFAULT  # pylint: disable=global-statement
    if _DEFAULT is None:
        _DEFAULT = load_config()
    return _DEFAULT
