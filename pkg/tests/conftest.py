import struct

import numpy as np
import pytest

from tresillo import fit, onsets, rhythm, smf, synthetic


def mthd(fmt=0, ntrks=1, division=480):
    return b"MThd" + struct.pack(">IHHH", 6, fmt, ntrks, division)


def mtrk(body: bytes):
    return b"MTrk" + struct.pack(">I", len(body)) + body


# One 4/4 bar of tresillo on channel 9, key 36, 60-tick notes, ppq 480.
# Onsets at ticks 0, 360, 720, 960, 1320, 1680; deltas written out by hand:
#   60 = 3C, 300 = 82 2C, 180 = 81 34.
_BAR = bytes.fromhex(
    "99 24 64"      # on  @0
    "3C 89 24 00"   # off @60
    "82 2C 99 24 64"  # on  @360
    "3C 89 24 00"
    "82 2C 99 24 64"  # on  @720
    "3C 89 24 00"
    "81 34 99 24 64"  # on  @960
    "3C 89 24 00"
    "82 2C 99 24 64"  # on  @1320
    "3C 89 24 00"
    "82 2C 99 24 64"  # on  @1680
    "3C 89 24 00"   # off @1740
)
_TIMESIG_44 = bytes.fromhex("00 FF 58 04 04 02 18 08")
_EOT = bytes.fromhex("00 FF 2F 00")


def hand_tresillo_bytes(bars=4):
    body = _TIMESIG_44 + b"\x00" + _BAR
    for _ in range(bars - 1):
        body += b"\x81\x34" + _BAR   # 180 ticks from the last note-off to the next downbeat
    return mthd() + mtrk(body + _EOT)


@pytest.fixture
def tresillo_bytes():
    return hand_tresillo_bytes()


@pytest.fixture
def tresillo_file(tmp_path, tresillo_bytes):
    p = tmp_path / "tresillo.mid"
    p.write_bytes(tresillo_bytes)
    return p


def meter_bytes(num, den, bars=2):
    hits = [(b, s) for b in range(bars) for s in rhythm.TRESILLO_SLOTS]
    return synthetic.pattern_midi(hits, meter=(num, den))


@pytest.fixture
def silent_bytes():
    return smf.write_smf([[(0, smf.TimeSignature(4, 4))]])


def vector_from_bytes(data, song_id="song"):
    return rhythm.rhythm_vector(onsets.build_onset_table(smf.parse_smf(data), song_id))


@pytest.fixture(scope="session")
def synthetic_vset():
    corpus = synthetic.validation_corpus(seed=42)
    return fit.ValidationSet(
        [(n, vector_from_bytes(b, n)) for n, b in corpus["tresillo"]],
        [(n, vector_from_bytes(b, n)) for n, b in corpus["non_tresillo"]])


def unit_with_cosine(c, extra_slot=1):
    """Unit, non-negative vector whose cosine with the tresillo template is ``c``."""
    e = np.zeros(16)
    e[extra_slot] = 1.0
    return c * rhythm.tresillo_template() + np.sqrt(1 - c * c) * e


# -- acceptance summary ---------------------------------------------------------

def pytest_terminal_summary(terminalreporter):
    lines = []
    for status in ("passed", "failed"):
        for rep in terminalreporter.stats.get(status, []):
            if getattr(rep, "when", None) == "call" and "test_acceptance.py::test_criterion" in rep.nodeid:
                lines.append((rep.nodeid, status))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, status in sorted(lines):
        name = nodeid.split("::")[-1]
        terminalreporter.write_line(f"{'PASS' if status == 'passed' else 'FAIL'}  {name}")
