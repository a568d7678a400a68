"""This file contains common angle and summation utilities."""

import math
from typing import Iterable

import numpy as np

TWO_PI = 2.0 * math.pi
THIRD_TURN = TWO_PI / 3.0
SQRT3 = math.sqrt(3.0)


def angle_diff(phi_from, phi_to):
    """Return the oriented angle d^e from phi_from to phi_to.

    The raw difference is reduced modulo 2pi into [-pi, pi]. When the
    difference is an odd multiple of pi the projection onto 2piZ is not
    unique; the one of minimal modulus is taken, so the result is pi with
    the sign of the raw difference.

    Args:
        phi_from (float | np.ndarray): starting phase
        phi_to (float | np.ndarray): final phase

    Returns:
        float | np.ndarray: d^e in [-pi, pi]
    """
    raw = np.subtract(phi_to, phi_from)
    turns = raw / TWO_PI
    nearest = np.round(turns)
    # half-integer ties: np.round goes to even, we want the smaller modulus
    tie = np.abs(turns - np.trunc(turns)) == 0.5
    nearest = np.where(tie, np.trunc(turns), nearest)
    result = raw - TWO_PI * nearest
    if np.ndim(result) == 0:
        return float(result)
    return result


def wrap(phase):
    """Map a phase to its principal value in (-pi, pi]."""
    wrapped = -np.remainder(-np.asarray(phase, dtype=float) + math.pi, TWO_PI) + math.pi
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def unit_vectors(phase) -> np.ndarray:
    """Return the spins exp(i phase) as an array with a trailing axis of length 2."""
    phase = np.asarray(phase, dtype=float)
    return np.stack([np.cos(phase), np.sin(phase)], axis=-1)


def stable_sum(values: Iterable[float]) -> float:
    """Sum with compensated arithmetic, independent of chunking order."""
    if isinstance(values, np.ndarray):
        return math.fsum(values.ravel().tolist())
    return math.fsum(values)
