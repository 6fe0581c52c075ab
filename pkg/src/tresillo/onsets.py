"""Onset tables and bar-relative quantization."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import NotFourFour
from .smf import NoteOn, SmfFile, extract_time_signatures

DEFAULT_METER = (4, 4)


@dataclass
class OnsetTable:
    """Note onsets of one song.

    ``onsets`` is an ``(n, 3)`` integer array with columns
    ``tick, track_index, channel``.
    """
    song_id: str
    ppq: int
    onsets: np.ndarray
    meter: tuple[int, int] = DEFAULT_METER

    @property
    def ticks(self) -> np.ndarray:
        return self.onsets[:, 0]

    def __len__(self):
        return len(self.onsets)


@dataclass(frozen=True)
class FourFour:
    pass


@dataclass(frozen=True)
class OtherMeter:
    numerator: int
    denominator: int


@dataclass
class QuantizedOnsets:
    bins: np.ndarray
    resolution: int


def build_onset_table(smf: SmfFile, song_id: str) -> OnsetTable:
    rows = [(ev.tick, track, ev.kind.channel)
            for track, ev in smf.iter_events()
            if isinstance(ev.kind, NoteOn)]
    onsets = np.array(rows, dtype=np.int64).reshape(-1, 3)
    sigs = extract_time_signatures(smf)
    # only the first signature is honoured; later meter changes are ignored
    meter = (sigs[0][1], sigs[0][2]) if sigs else DEFAULT_METER
    return OnsetTable(song_id=song_id, ppq=smf.ppq, onsets=onsets, meter=meter)


def classify_meter(table: OnsetTable):
    if tuple(table.meter) == (4, 4):
        return FourFour()
    return OtherMeter(*table.meter)


def quantize_ticks(ticks, ppq: int, resolution: int) -> np.ndarray:
    """Snap absolute ticks onto a ``resolution``-slot grid over one 4/4 bar.

    Rounds half up in exact integer arithmetic; an onset that snaps onto the
    next downbeat wraps to slot 0.
    """
    if resolution < 1:
        raise ValueError(f"resolution must be positive, got {resolution}")
    ticks = np.asarray(ticks, dtype=np.int64)
    per_bar = 4 * ppq
    pos = np.mod(ticks, per_bar)
    # round(pos * resolution / per_bar), half up == floor((2*pos*res + per_bar) / (2*per_bar))
    bins = (2 * pos * resolution + per_bar) // (2 * per_bar)
    return np.mod(bins, resolution)


def quantize_onsets(table: OnsetTable, resolution: int = 16) -> QuantizedOnsets:
    if not isinstance(classify_meter(table), FourFour):
        raise NotFourFour(f"{table.song_id}: meter {table.meter[0]}/{table.meter[1]}")
    return QuantizedOnsets(quantize_ticks(table.ticks, table.ppq, resolution), resolution)


def onset_histogram(q: QuantizedOnsets) -> np.ndarray:
    return np.bincount(q.bins, minlength=q.resolution).astype(np.int64)


def write_onset_csv(table: OnsetTable, path) -> None:
    """Debug dump: one row per onset, columns ``tick,track_index,channel``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tick", "track_index", "channel"])
        w.writerows(table.onsets.tolist())
