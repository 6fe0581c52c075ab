"""Bootstrap intervals, Welch's t-test and trailing rolling means.

Randomness: all resampling draws from numpy's ``Generator`` over the PCG64
bit generator, seeded as ``numpy.random.default_rng(seed)`` (or a
``SeedSequence`` entropy list for derived streams). Resample indices are
produced in one call, ``rng.integers(0, n, size=(draws, n))``, so a given
``(values, seed, draws)`` always yields the same resamples. Interval bounds
are ``numpy.percentile`` with its default linear interpolation.

The Student-t tail probability uses the regularized incomplete beta function,
evaluated with the modified Lentz continued fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EmptyInput, EmptySeries, InsufficientData, ZeroVariance


@dataclass(frozen=True)
class BootstrapConfig:
    draws: int = 1000
    confidence: float = 0.95
    seed: int = 42

    def __post_init__(self):
        if self.draws < 1:
            raise ValueError("draws must be >= 1")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must lie in (0, 1)")


@dataclass(frozen=True)
class IntervalEstimate:
    point: float
    lower: float
    upper: float


def make_rng(seed):
    """``seed`` is an int or a sequence of ints (hashed via SeedSequence)."""
    return np.random.default_rng(seed)


def bootstrap_mean_ci(values, config: BootstrapConfig = BootstrapConfig(),
                      rng=None) -> IntervalEstimate:
    """Percentile bootstrap interval for the mean.

    Each of ``config.draws`` resamples has the size of the input. ``rng``
    overrides the generator built from ``config.seed``.
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    n = values.size
    if n == 0:
        raise EmptyInput("bootstrap of an empty sample")
    if rng is None:
        rng = make_rng(config.seed)
    idx = rng.integers(0, n, size=(config.draws, n))
    means = _kernels.resample_means(values, idx)
    alpha = 1.0 - config.confidence
    lo, hi = np.percentile(means, [100 * alpha / 2, 100 * (1 - alpha / 2)])
    point = values.mean()
    if np.all(values == values[0]):
        # summation rounding must not open a gap around a constant sample
        point = lo = hi = values[0]
    return IntervalEstimate(float(point), float(lo), float(hi))


# -- incomplete beta / Student t ----------------------------------------------

_CF_EPS = 1e-15
_CF_TINY = 1e-300
_CF_MAX_ITER = 10000


def _beta_cf(a, b, x):
    """Continued fraction for I_x(a, b), modified Lentz method."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    # the fraction converges fast only below the mean; use symmetry above it
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def student_t_sf_two_sided(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isinf(t):
        return 0.0
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))


def student_t_cdf(t: float, df: float) -> float:
    tail = 0.5 * student_t_sf_two_sided(t, df)
    return 1.0 - tail if t > 0 else tail


@dataclass(frozen=True)
class WelchResult:
    t: float
    df: float
    p: float

    def __iter__(self):
        return iter((self.t, self.df, self.p))


def welch_t_test(x, y) -> WelchResult:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size < 2 or y.size < 2:
        raise InsufficientData("Welch's test needs at least two values per sample")
    vx = x.var(ddof=1) / x.size
    vy = y.var(ddof=1) / y.size
    se2 = vx + vy
    if se2 == 0:
        raise ZeroVariance("both samples have zero variance")
    t = (x.mean() - y.mean()) / math.sqrt(se2)
    # Welch-Satterthwaite on rescaled variances, so squaring cannot underflow
    s = max(vx, vy)
    ax, ay = vx / s, vy / s
    df = (ax + ay) ** 2 / (ax ** 2 / (x.size - 1) + ay ** 2 / (y.size - 1))
    return WelchResult(float(t), float(df), student_t_sf_two_sided(float(t), float(df)))


# -- rolling mean -------------------------------------------------------------

def rolling_mean(series, window: int):
    """Trailing mean over ``window`` entries of ``[(position, value), ...]``.

    The first ``window - 1`` outputs average everything seen so far, so the
    output is as long as the input.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    series = list(series)
    if not series:
        raise EmptySeries("rolling mean of an empty series")
    positions = [p for p, _ in series]
    if any(b <= a for a, b in zip(positions, positions[1:])):
        raise ValueError("positions must be strictly increasing")
    values = np.array([v for _, v in series], dtype=np.float64)
    out = []
    for i, p in enumerate(positions):
        chunk = values[max(0, i + 1 - window):i + 1]
        # summation rounding can push the mean of a constant run off its value
        m = min(max(chunk.mean(), chunk.min()), chunk.max())
        out.append((p, float(m)))
    return out
