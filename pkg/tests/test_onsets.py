import numpy as np
import pytest
from hypothesis import given, strategies as st

from tresillo import errors
from tresillo.onsets import (FourFour, OnsetTable, OtherMeter, build_onset_table, classify_meter,
                             onset_histogram, quantize_onsets, quantize_ticks, write_onset_csv)
from tresillo.smf import NoteOff, NoteOn, TimeSignature, parse_smf, write_smf


def table(ticks, ppq=480, meter=(4, 4)):
    ticks = np.asarray(ticks, dtype=np.int64)
    rows = np.column_stack([ticks, np.zeros_like(ticks), np.zeros_like(ticks)])
    return OnsetTable("t", ppq, rows.reshape(-1, 3), meter)


def test_build_across_tracks():
    f = parse_smf(write_smf([
        [(0, NoteOn(0, 60, 90)), (10, NoteOff(0, 60)), (480, NoteOn(1, 62, 90))],
        [(240, NoteOn(9, 36, 100))],
    ]))
    t = build_onset_table(f, "x")
    assert len(t) == 3
    assert sorted(t.onsets.tolist()) == [[0, 0, 0], [240, 1, 9], [480, 0, 1]]
    assert t.meter == (4, 4)


def test_only_note_offs():
    f = parse_smf(write_smf([[(0, NoteOff(0, 60)), (5, NoteOff(0, 61))]]))
    assert len(build_onset_table(f, "x")) == 0


def test_first_time_signature_wins():
    f = parse_smf(write_smf([[(0, TimeSignature(3, 4)), (1920, TimeSignature(4, 4))]]))
    assert build_onset_table(f, "x").meter == (3, 4)


@pytest.mark.parametrize("meter, expected", [
    ((4, 4), FourFour()),
    ((3, 4), OtherMeter(3, 4)),
    ((6, 8), OtherMeter(6, 8)),
])
def test_classify_meter(meter, expected):
    assert classify_meter(table([0], meter=meter)) == expected


@pytest.mark.parametrize("tick, expected", [(0, 0), (365, 3), (1915, 0), (60, 1), (59, 0), (1920 + 120, 1)])
def test_quantize_examples(tick, expected):
    assert quantize_onsets(table([tick]), 16).bins.tolist() == [expected]


def test_quantize_rejects_other_meter():
    with pytest.raises(errors.NotFourFour):
        quantize_onsets(table([0], meter=(3, 4)), 16)


def test_histogram_examples():
    from tresillo.onsets import QuantizedOnsets
    h = onset_histogram(QuantizedOnsets(np.array([0, 0, 3]), 16))
    assert h[0] == 2 and h[3] == 1 and h.sum() == 3
    assert onset_histogram(QuantizedOnsets(np.array([], dtype=np.int64), 16)).tolist() == [0] * 16
    # 128 evenly spaced onsets over one bar at ppq 480 -> one per 1/128 slot
    ticks = np.arange(128) * 15
    assert onset_histogram(quantize_onsets(table(ticks), 128)).tolist() == [1] * 128


ticks_lists = st.lists(st.integers(0, 10 * 1920), max_size=60)


@given(ticks_lists, st.sampled_from([1, 4, 16, 128]))
def test_conservation(ticks, res):
    q = quantize_onsets(table(ticks), res)
    assert len(q.bins) == len(ticks)
    assert onset_histogram(q).sum() == len(ticks)
    assert ((q.bins >= 0) & (q.bins < res)).all()


@given(ticks_lists, st.sampled_from([96, 480, 960]))
def test_bar_periodicity(ticks, ppq):
    t = np.asarray(ticks, dtype=np.int64)
    a = quantize_ticks(t, ppq, 16)
    b = quantize_ticks(t + 4 * ppq, ppq, 16)
    assert a.tolist() == b.tolist()


@given(st.lists(st.integers(0, 63), max_size=60))
def test_grid_refinement(slots):
    # every onset exactly on the 16th grid: folding the 128 histogram 8-into-1 matches
    ticks = np.asarray(slots, dtype=np.int64) * 120
    h16 = onset_histogram(quantize_onsets(table(ticks), 16))
    h128 = onset_histogram(quantize_onsets(table(ticks), 128))
    folded = h128.reshape(16, 8).sum(axis=1)
    assert h16.tolist() == folded.tolist()


def test_round_half_up_exact():
    # brute-force oracle: exact rational rounding with Python integers
    from fractions import Fraction
    ppq = 7
    for tick in range(0, 4 * ppq * 3):
        pos = tick % (4 * ppq)
        exact = Fraction(pos * 16, 4 * ppq)
        expected = int(exact + Fraction(1, 2)) % 16
        assert quantize_ticks([tick], ppq, 16)[0] == expected


def test_onset_csv(tmp_path):
    t = table([0, 120])
    p = tmp_path / "o.csv"
    write_onset_csv(t, p)
    assert p.read_text().splitlines() == ["tick,track_index,channel", "0,0,0", "120,0,0"]
