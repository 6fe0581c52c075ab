"""Rhythm vectors: unit-norm 16-slot onset histograms and reference patterns.

Slots index sixteenth notes of a 4/4 bar, slot 0 on the downbeat. Vectors are
plain float64 numpy arrays of shape ``(16,)``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import EmptyInput, EmptyRhythm
from .onsets import OnsetTable, onset_histogram, quantize_onsets

N_SLOTS = 16

# 3+3+2 sixteenths, twice per bar
TRESILLO_SLOTS = (0, 3, 6, 8, 11, 14)
# first half tresillo, second half: eighth rest, two eighths, eighth rest
CLAVE_SLOTS = (0, 3, 6, 10, 12)
FOUR_ON_THE_FLOOR = (0, 4, 8, 12)


def normalize(counts) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.float64)
    if counts.shape != (N_SLOTS,):
        raise ValueError(f"expected {N_SLOTS} components, got shape {counts.shape}")
    if np.any(counts < 0):
        raise ValueError("rhythm counts must be non-negative")
    norm = np.linalg.norm(counts)
    if norm == 0:
        raise EmptyRhythm("no onsets")
    return counts / norm


def indicator(slots) -> np.ndarray:
    v = np.zeros(N_SLOTS)
    np.add.at(v, list(slots), 1.0)
    return v


def tresillo_template() -> np.ndarray:
    return normalize(indicator(TRESILLO_SLOTS))


def clave_template() -> np.ndarray:
    return normalize(indicator(CLAVE_SLOTS))


def reggaeton_template() -> np.ndarray:
    """Tresillo plus a kick on every quarter (slots 0 and 8 carry weight 2)."""
    return normalize(indicator(TRESILLO_SLOTS) + indicator(FOUR_ON_THE_FLOOR))


def centroid(vectors) -> np.ndarray:
    """Mean of unit vectors, renormalized.

    Inputs are normalized first so long songs do not dominate.
    """
    vectors = [np.asarray(v, dtype=np.float64) for v in vectors]
    if not vectors:
        raise EmptyInput("centroid of an empty list")
    stacked = np.stack([normalize(v) for v in vectors])
    return normalize(stacked.mean(axis=0))


def corpus_mean(vectors) -> np.ndarray:
    return centroid(vectors)


def rhythm_vector(table: OnsetTable) -> np.ndarray:
    """Onset table to rhythm vector; raises NotFourFour or EmptyRhythm."""
    hist = onset_histogram(quantize_onsets(table, N_SLOTS))
    try:
        return normalize(hist)
    except EmptyRhythm:
        raise EmptyRhythm(f"{table.song_id}: no note onsets") from None


def dumps_vector(v) -> str:
    return json.dumps([float(x) for x in np.asarray(v)])


def loads_vector(text: str) -> np.ndarray:
    values = json.loads(text)
    if not isinstance(values, list) or len(values) != N_SLOTS:
        raise ValueError(f"expected a JSON array of {N_SLOTS} numbers")
    return np.array([float(x) for x in values])


def save_vector(path, v) -> None:
    Path(path).write_text(dumps_vector(v) + "\n")


def load_vector(path) -> np.ndarray:
    return loads_vector(Path(path).read_text())
