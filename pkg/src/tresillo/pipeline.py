"""Chart corpus processing: manifest in, per-song scores and weekly trends out.

File formats (UTF-8 CSV, header row required):

* manifest: ``week,rank,title,artist,midi_path``; ``week`` is YYYY-MM-DD,
  ``rank`` in 1..20, ``midi_path`` may be empty and is resolved relative to
  the manifest's directory.
* scores: ``song_id,week,similarity_c,similarity_cstar,excluded``; floats
  with 6 decimals, empty fields where not applicable.
* trend: ``week,n_songs,mean,ci_lower,ci_upper``.
* rolling: ``week,rolling_mean``.
"""

from __future__ import annotations

import csv
import datetime as dt
import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (DegenerateTheta, EmptyRhythm, ManifestParseError, NoScoredSongs,
                     NotFourFour, SmfError, TrendParseError)
from .onsets import FourFour, build_onset_table, classify_meter
from .rhythm import rhythm_vector
from .similarity import cosine, parameterized_cosine
from .smf import read_smf
from .stats import BootstrapConfig, bootstrap_mean_ci, make_rng, rolling_mean

log = logging.getLogger(__name__)

MANIFEST_FIELDS = ["week", "rank", "title", "artist", "midi_path"]
SCORE_FIELDS = ["song_id", "week", "similarity_c", "similarity_cstar", "excluded"]
TREND_FIELDS = ["week", "n_songs", "mean", "ci_lower", "ci_upper"]
ROLLING_FIELDS = ["week", "rolling_mean"]

EXCLUSION_REASONS = ("NotFourFour", "EmptyRhythm", "ParseError", "MissingFile")
MAX_RANK = 20


@dataclass(frozen=True)
class ChartEntry:
    week: dt.date
    rank: int
    title: str
    artist: str
    midi_path: Path | None = None

    @property
    def key(self) -> tuple[str, str]:
        return normalize_name(self.title), normalize_name(self.artist)

    @property
    def song_id(self) -> str:
        title, artist = self.key
        return f"{artist} - {title}"


@dataclass(frozen=True)
class SongScore:
    song_id: str
    week: dt.date
    similarity_c: float | None = None
    similarity_cstar: float | None = None
    excluded: str | None = None

    def __post_init__(self):
        scored = self.similarity_c is not None and self.similarity_cstar is not None
        if scored == (self.excluded is not None):
            raise ValueError("a score has either both similarities or an exclusion reason")
        if self.excluded is not None and self.excluded not in EXCLUSION_REASONS:
            raise ValueError(f"unknown exclusion reason {self.excluded!r}")


@dataclass(frozen=True)
class TrendPoint:
    week: dt.date
    n_songs: int
    mean: float
    ci_lower: float
    ci_upper: float


def normalize_name(s: str) -> str:
    return re.sub(r"\s+", " ", s.strip().lower())


# -- manifest -----------------------------------------------------------------

def load_manifest(path) -> list[ChartEntry]:
    path = Path(path)
    base = path.parent
    entries = []
    seen = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != MANIFEST_FIELDS:
            raise ManifestParseError(1, f"header must be {','.join(MANIFEST_FIELDS)}")
        for rowno, row in enumerate(reader, start=2):
            try:
                week = dt.date.fromisoformat((row["week"] or "").strip())
            except ValueError:
                raise ManifestParseError(rowno, f"bad week {row['week']!r}") from None
            try:
                rank = int((row["rank"] or "").strip())
            except ValueError:
                raise ManifestParseError(rowno, f"bad rank {row['rank']!r}") from None
            if not 1 <= rank <= MAX_RANK:
                raise ManifestParseError(rowno, f"rank {rank} outside 1..{MAX_RANK}")
            if (week, rank) in seen:
                raise ManifestParseError(rowno, f"duplicate slot {week} #{rank} (first on row {seen[week, rank]})")
            seen[week, rank] = rowno
            raw = (row["midi_path"] or "").strip()
            midi = None
            if raw:
                midi = Path(raw)
                if not midi.is_absolute():
                    midi = base / midi
            entries.append(ChartEntry(week, rank, (row["title"] or "").strip(),
                                      (row["artist"] or "").strip(), midi))
    return entries


# -- scoring ------------------------------------------------------------------

def _score_file(path, theta, reference):
    """Return ``(c, cstar, None)`` or ``(None, None, reason)``."""
    if path is None or not Path(path).is_file():
        return None, None, "MissingFile"
    try:
        table = build_onset_table(read_smf(path), str(path))
    except (SmfError, OSError) as exc:
        log.info("parse failure %s: %s", path, exc)
        return None, None, "ParseError"
    if not isinstance(classify_meter(table), FourFour):
        return None, None, "NotFourFour"
    try:
        v = rhythm_vector(table)
    except NotFourFour:
        return None, None, "NotFourFour"
    except EmptyRhythm:
        return None, None, "EmptyRhythm"
    try:
        cstar = parameterized_cosine(v, reference, theta)
    except DegenerateTheta:
        # every onset sits on a slot the weights switch off
        return None, None, "EmptyRhythm"
    return cosine(v, reference), cstar, None


def score_corpus(entries, theta, reference) -> list[SongScore]:
    """One SongScore per entry; songs charting in several weeks are scored once."""
    cache = {}
    out = []
    for e in entries:
        result = cache.get(e.key)
        if result is None or (result[2] == "MissingFile" and e.midi_path is not None):
            result = _score_file(e.midi_path, theta, reference)
            cache[e.key] = result
        c, cs, reason = result
        out.append(SongScore(e.song_id, e.week, c, cs, reason))
    return out


def exclusion_summary(scores) -> dict[str, int]:
    counts = {r: 0 for r in EXCLUSION_REASONS}
    for s in scores:
        if s.excluded:
            counts[s.excluded] += 1
    return counts


def week_seed(seed: int, week: dt.date):
    return [seed, week.toordinal()]


def weekly_trend(scores, which: str = "C", config: BootstrapConfig = BootstrapConfig()) -> list[TrendPoint]:
    """Mean similarity per chart week with a percentile bootstrap interval.

    ``which`` is ``"C"`` (plain cosine) or ``"Cstar"`` (weighted). Each week
    gets its own generator seeded from ``(config.seed, week)``.
    """
    attr = {"C": "similarity_c", "Cstar": "similarity_cstar", "C*": "similarity_cstar"}.get(which)
    if attr is None:
        raise ValueError(f"which must be 'C' or 'Cstar', got {which!r}")
    by_week = {}
    for s in scores:
        if s.excluded is None:
            by_week.setdefault(s.week, []).append(getattr(s, attr))
    if not by_week:
        raise NoScoredSongs("every chart entry was excluded")
    points = []
    for week in sorted(by_week):
        values = np.array(by_week[week])
        est = bootstrap_mean_ci(values, config, rng=make_rng(week_seed(config.seed, week)))
        points.append(TrendPoint(week, len(values), est.point, est.lower, est.upper))
    return points


def rolling_trend(weekly, window_weeks: int = 52):
    return rolling_mean([(p.week, p.mean) for p in weekly], window_weeks)


# -- persistence --------------------------------------------------------------

def _fmt(x):
    return "" if x is None else f"{x:.6f}"


def persist_scores(scores, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCORE_FIELDS)
        for s in scores:
            w.writerow([s.song_id, s.week.isoformat(), _fmt(s.similarity_c),
                        _fmt(s.similarity_cstar), s.excluded or ""])


def load_scores(path) -> list[SongScore]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.append(SongScore(
                row["song_id"], dt.date.fromisoformat(row["week"]),
                float(row["similarity_c"]) if row["similarity_c"] else None,
                float(row["similarity_cstar"]) if row["similarity_cstar"] else None,
                row["excluded"] or None))
    return out


def write_trend(points, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TREND_FIELDS)
        for p in points:
            w.writerow([p.week.isoformat(), p.n_songs, _fmt(p.mean),
                        _fmt(p.ci_lower), _fmt(p.ci_upper)])


def read_trend(path) -> list[TrendPoint]:
    points = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TREND_FIELDS:
            raise TrendParseError(f"{path}: header must be {','.join(TREND_FIELDS)}")
        for rowno, row in enumerate(reader, start=2):
            try:
                p = TrendPoint(dt.date.fromisoformat(row["week"]), int(row["n_songs"]),
                               float(row["mean"]), float(row["ci_lower"]), float(row["ci_upper"]))
            except (TypeError, ValueError) as exc:
                raise TrendParseError(f"{path}: row {rowno}: {exc}") from None
            if p.ci_lower > p.ci_upper:
                raise TrendParseError(f"{path}: row {rowno}: ci_lower > ci_upper")
            points.append(p)
    if not points:
        raise TrendParseError(f"{path}: no trend rows")
    return points


def write_rolling(series, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ROLLING_FIELDS)
        for week, m in series:
            w.writerow([week.isoformat(), _fmt(m)])


def read_rolling(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ROLLING_FIELDS:
            raise TrendParseError(f"{path}: header must be {','.join(ROLLING_FIELDS)}")
        try:
            return [(dt.date.fromisoformat(r["week"]), float(r["rolling_mean"])) for r in reader]
        except (TypeError, ValueError) as exc:
            raise TrendParseError(f"{path}: {exc}") from None
