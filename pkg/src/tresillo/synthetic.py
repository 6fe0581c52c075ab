"""Synthetic labelled corpora written as MIDI files.

A tresillo song repeats each of the six tresillo slots ``repeats`` times (one
hit per bar over ``repeats`` bars). A non-tresillo song plays the four
quarter-note slots ``backbeat_repeats`` times (once by default). Both get
``extras`` additional hits at uniformly random slots within the first
``repeats`` bars. All randomness comes from one seeded generator.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .rhythm import FOUR_ON_THE_FLOOR, TRESILLO_SLOTS
from .smf import NoteOff, NoteOn, TimeSignature, write_smf

PPQ = 480
TICKS_PER_SLOT = PPQ // 4
TICKS_PER_BAR = 4 * PPQ


def song_slots(pattern, rng, repeats=8, extras=12, span=None):
    """Return ``(bar, slot)`` pairs for one song; extras land in ``span`` bars."""
    hits = [(bar, s) for bar in range(repeats) for s in pattern]
    bars = rng.integers(0, span or repeats, size=extras)
    slots = rng.integers(0, 16, size=extras)
    hits += list(zip(bars.tolist(), slots.tolist()))
    return hits


def pattern_midi(hits, meter=(4, 4), ppq=PPQ, key=60, channel=9, velocity=100) -> bytes:
    """One-track MIDI file with a short note at every ``(bar, slot)`` hit."""
    per_slot = ppq // 4
    per_bar = 4 * ppq
    events = [(0, TimeSignature(*meter))]
    for bar, slot in hits:
        t = bar * per_bar + slot * per_slot
        events.append((t, NoteOn(channel, key, velocity)))
        events.append((t + per_slot // 2, NoteOff(channel, key)))
    return write_smf([events], ppq=ppq)


def validation_corpus(seed=42, n_per_class=10, repeats=8, extras=12, backbeat_repeats=1):
    """``{"tresillo": [...], "non_tresillo": [...]}`` lists of (name, midi bytes)."""
    rng = np.random.default_rng(seed)
    out = {"tresillo": [], "non_tresillo": []}
    classes = (("tresillo", TRESILLO_SLOTS, repeats),
               ("non_tresillo", FOUR_ON_THE_FLOOR, backbeat_repeats))
    for label, pattern, reps in classes:
        for i in range(n_per_class):
            hits = song_slots(pattern, rng, reps, extras, span=repeats)
            out[label].append((f"{label}_{i:02d}", pattern_midi(hits)))
    return out


def write_validation_corpus(root, seed=42, n_per_class=10, repeats=8, extras=12,
                            backbeat_repeats=1):
    """Write ``root/tresillo/*.mid`` and ``root/non_tresillo/*.mid``; return both dirs."""
    root = Path(root)
    dirs = {}
    corpus = validation_corpus(seed, n_per_class, repeats, extras, backbeat_repeats)
    for label, songs in corpus.items():
        d = root / label
        d.mkdir(parents=True, exist_ok=True)
        for name, data in songs:
            (d / f"{name}.mid").write_bytes(data)
        dirs[label] = d
    return dirs["tresillo"], dirs["non_tresillo"]
