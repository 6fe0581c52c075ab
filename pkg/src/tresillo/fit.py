"""Tresillo detection models and learning of per-slot weights.

Four models are compared, named after the reference point they measure
against and whether slot weights are applied:

    ========== =========== ============
    name       reference   weighted
    ========== =========== ============
    C          template    no
    C*         template    yes
    Centroid   centroid    no
    Centroid*  centroid    yes
    ========== =========== ============

Goodness of a model is the ratio of the mean similarity of tresillo songs to
the mean similarity of the other songs. Weights are learned by minimizing the
reciprocal ratio with Nelder-Mead from an all-ones start plus seeded
perturbed restarts.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Literal

import numpy as np

from . import _kernels
from .errors import (DegenerateTheta, FitFailed, InsufficientData,
                     ZeroDenominator)
from .rhythm import N_SLOTS, centroid, tresillo_template
from .similarity import as_theta, cosine, parameterized_cosine, unit_theta

Reference = Literal["template", "centroid"]


@dataclass
class ValidationSet:
    tresillo: list[tuple[str, np.ndarray]]
    non_tresillo: list[tuple[str, np.ndarray]]

    def __post_init__(self):
        if not self.tresillo or not self.non_tresillo:
            raise InsufficientData("both validation lists must be non-empty")
        shared = {s for s, _ in self.tresillo} & {s for s, _ in self.non_tresillo}
        if shared:
            raise ValueError(f"songs labelled both ways: {sorted(shared)}")

    @property
    def pos(self) -> np.ndarray:
        return np.stack([v for _, v in self.tresillo]).astype(np.float64)

    @property
    def neg(self) -> np.ndarray:
        return np.stack([v for _, v in self.non_tresillo]).astype(np.float64)

    def __len__(self):
        return len(self.tresillo) + len(self.non_tresillo)

    def without(self, index: int) -> "ValidationSet":
        """Copy with the ``index``-th song of ``tresillo + non_tresillo`` removed."""
        n = len(self.tresillo)
        if index < n:
            return ValidationSet(self.tresillo[:index] + self.tresillo[index + 1:],
                                 list(self.non_tresillo))
        k = index - n
        return ValidationSet(list(self.tresillo),
                             self.non_tresillo[:k] + self.non_tresillo[k + 1:])

    def swapped(self) -> "ValidationSet":
        return ValidationSet(list(self.non_tresillo), list(self.tresillo))


@dataclass(frozen=True)
class ModelSpec:
    reference: Reference = "template"
    parameterized: bool = False
    theta: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.reference not in ("template", "centroid"):
            raise ValueError(f"unknown reference {self.reference!r}")
        if self.parameterized and self.theta is None:
            raise ValueError("a weighted model needs theta")

    @property
    def name(self) -> str:
        base = "C" if self.reference == "template" else "Centroid"
        return base + ("*" if self.parameterized else "")

    def with_theta(self, theta) -> "ModelSpec":
        return replace(self, theta=as_theta(theta))


def model(name: str, theta=None) -> ModelSpec:
    """``model("C*", theta)`` etc. Unweighted models ignore ``theta``."""
    table = {"C": ("template", False), "C*": ("template", True),
             "Centroid": ("centroid", False), "Centroid*": ("centroid", True)}
    try:
        ref, weighted = table[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {sorted(table)}") from None
    if weighted and theta is None:
        theta = unit_theta()
    return ModelSpec(ref, weighted, as_theta(theta) if weighted else None)


MODEL_NAMES = ("C", "C*", "Centroid", "Centroid*")


def reference_vector(reference: Reference, vset: ValidationSet) -> np.ndarray:
    if reference == "template":
        return tresillo_template()
    return centroid([v for _, v in vset.tresillo])


def score(spec: ModelSpec, reference, song) -> float:
    if spec.parameterized:
        return parameterized_cosine(song, reference, spec.theta)
    return cosine(song, reference)


@dataclass
class GoodnessReport:
    s_star: float
    mean_sim_tresillo: float
    mean_sim_non_tresillo: float
    per_song: list[tuple[str, float]]

    @property
    def gap(self) -> float:
        return self.mean_sim_tresillo - self.mean_sim_non_tresillo


def s_star(spec: ModelSpec, vset: ValidationSet, reference=None) -> GoodnessReport:
    if reference is None:
        reference = reference_vector(spec.reference, vset)
    pos = [(sid, score(spec, reference, v)) for sid, v in vset.tresillo]
    neg = [(sid, score(spec, reference, v)) for sid, v in vset.non_tresillo]
    mp = float(np.mean([s for _, s in pos]))
    mn = float(np.mean([s for _, s in neg]))
    if mn == 0:
        raise ZeroDenominator("mean similarity of non-tresillo songs is zero")
    return GoodnessReport(mp / mn, mp, mn, pos + neg)


def objective(theta, reference, vset: ValidationSet) -> float:
    """Mean weighted similarity of non-tresillo songs over that of tresillo songs."""
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    ref = np.ascontiguousarray(reference, dtype=np.float64)
    value = _kernels.objective_ratio(theta, ref, vset.pos, vset.neg)
    if not np.isfinite(value):
        raise DegenerateTheta("theta is degenerate for this validation set")
    return float(value)


# -- fitting -----------------------------------------------------------------

@dataclass(frozen=True)
class FitConfig:
    max_iterations: int = 5000
    tolerance: float = 1e-8
    restarts: int = 5
    seed: int = 42
    initial_step: float = 0.25
    perturbation: float = 0.1

    @classmethod
    def from_file(cls, path, **overrides) -> "FitConfig":
        data = json.loads(Path(path).read_text())
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown FitConfig fields: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def to_dict(self):
        return asdict(self)


@dataclass
class RunTrace:
    start: np.ndarray
    theta: np.ndarray
    objective: float
    iterations: int
    history: np.ndarray


@dataclass
class FitResult:
    theta: np.ndarray
    objective: float
    trace: list[RunTrace]

    def __iter__(self):
        return iter((self.theta, self.objective, self.trace))


def start_points(config: FitConfig) -> np.ndarray:
    """All-ones, then ``config.restarts`` seeded gaussian perturbations of it."""
    rng = np.random.default_rng(config.seed)
    ones = np.ones(N_SLOTS)
    jitter = rng.normal(0.0, config.perturbation, size=(config.restarts, N_SLOTS))
    return np.vstack([ones, ones + jitter])


def fit_theta(reference, vset: ValidationSet, config: FitConfig = FitConfig()) -> FitResult:
    ref = np.ascontiguousarray(reference, dtype=np.float64)
    pos, neg = vset.pos, vset.neg
    trace = []
    for x0 in start_points(config):
        x, fx, iters, hist = _kernels.nelder_mead(
            np.ascontiguousarray(x0), float(config.initial_step), ref, pos, neg,
            float(config.tolerance), int(config.max_iterations))
        trace.append(RunTrace(x0, np.asarray(x), float(fx), int(iters), np.asarray(hist)))
    finite = [r for r in trace if np.isfinite(r.objective)]
    if not finite:
        raise FitFailed("every start is degenerate for this validation set")
    best = min(finite, key=lambda r: r.objective)
    return FitResult(best.theta.copy(), best.objective, trace)


def fold_seed(seed: int, fold: int) -> int:
    """Independent, reproducible seed for leave-one-out fold ``fold``."""
    return int(np.random.SeedSequence([seed, fold]).generate_state(1)[0])


def leave_one_out_s_star(kind: ModelSpec, vset: ValidationSet,
                         config: FitConfig = FitConfig()) -> list[float]:
    """Goodness on each training remainder after dropping one song.

    Only ``kind.reference`` and ``kind.parameterized`` are used: weighted
    models refit theta inside every fold, centroid models recompute the
    centroid from the remaining tresillo songs.
    """
    reference, parameterized = kind.reference, kind.parameterized
    if len(vset.tresillo) < 2 or len(vset.non_tresillo) < 2:
        raise InsufficientData("leave-one-out needs at least two songs per list")
    values = []
    for k in range(len(vset)):
        rest = vset.without(k)
        ref = reference_vector(reference, rest)
        if parameterized:
            fold_cfg = replace(config, seed=fold_seed(config.seed, k))
            theta = fit_theta(ref, rest, fold_cfg).theta
            spec = ModelSpec(reference, True, theta)
        else:
            spec = ModelSpec(reference, False)
        values.append(s_star(spec, rest, ref).s_star)
    return values


def percentile_interval(values, confidence: float = 0.975) -> tuple[float, float]:
    alpha = 1.0 - confidence
    lo, hi = np.percentile(np.asarray(values, dtype=np.float64),
                           [100 * alpha / 2, 100 * (1 - alpha / 2)])
    return float(lo), float(hi)
