"""Plain and per-slot weighted cosine similarity between rhythm vectors.

The weighted form scales slot ``i`` of both vectors by ``theta[i]`` before
taking the cosine. Because each weight enters the numerator and both norms
as a square, the sign of a weight has no effect on the result.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import DegenerateTheta, ZeroVector
from .rhythm import N_SLOTS

THETA_SUFFIX = ".theta.json"


def unit_theta() -> np.ndarray:
    return np.ones(N_SLOTS)


def as_theta(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (N_SLOTS,):
        raise ValueError(f"theta must have {N_SLOTS} components, got shape {theta.shape}")
    if not np.any(theta):
        raise DegenerateTheta("all theta components are zero")
    return theta


def cosine(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ma = np.abs(a).max(initial=0.0)
    mb = np.abs(b).max(initial=0.0)
    if ma == 0 or mb == 0:
        raise ZeroVector("cosine of a zero vector")
    # rescale first so tiny weighted vectors do not underflow in the norm
    a = a / ma
    b = b / mb
    return float(np.clip(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)), -1.0, 1.0))


def scale(v, theta) -> np.ndarray:
    return np.asarray(v, dtype=np.float64) * np.asarray(theta, dtype=np.float64)


def parameterized_cosine(a, b, theta) -> float:
    sa = scale(a, theta)
    sb = scale(b, theta)
    if not sa.any() or not sb.any():
        raise DegenerateTheta("theta removes every onset of one of the vectors")
    return cosine(sa, sb)


def parameterized_cosines(songs, reference, theta) -> np.ndarray:
    """Weighted cosine of each row of ``songs`` against ``reference``."""
    songs = np.ascontiguousarray(songs, dtype=np.float64).reshape(-1, N_SLOTS)
    out = _kernels.scaled_cosines(songs, np.ascontiguousarray(reference, dtype=np.float64),
                                  np.ascontiguousarray(theta, dtype=np.float64))
    if np.isnan(out).any():
        raise DegenerateTheta("theta removes every onset of at least one vector")
    return out


def save_theta(path, theta) -> None:
    theta = as_theta(theta)
    Path(path).write_text(json.dumps([float(t) for t in theta]) + "\n")


def load_theta(path) -> np.ndarray:
    values = json.loads(Path(path).read_text())
    if not isinstance(values, list) or len(values) != N_SLOTS:
        raise ValueError(f"{path}: expected a JSON array of {N_SLOTS} numbers")
    if not all(isinstance(x, (int, float)) and math.isfinite(x) for x in values):
        raise ValueError(f"{path}: theta components must be finite numbers")
    return as_theta(values)
