"""Standard MIDI File reading (formats 0 and 1).

Only what onset analysis needs is decoded into typed events: note on/off,
time signature and tempo. Every other meta event is kept as ``OtherMeta``,
other channel messages as ``OtherChannel``; sysex is skipped by length.

A small writer (``encode_vlq`` / ``write_smf``) exists for building test
fixtures and synthetic corpora. It is not a general MIDI authoring tool.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .errors import (BadHeader, MalformedEvent, MalformedVlq, TruncatedTrack,
                     UnsupportedDivision, UnsupportedFormat)

MAX_VLQ = 0x0FFFFFFF

META_END_OF_TRACK = 0x2F
META_TEMPO = 0x51
META_TIME_SIGNATURE = 0x58


@dataclass(frozen=True)
class NoteOn:
    channel: int
    key: int
    velocity: int


@dataclass(frozen=True)
class NoteOff:
    channel: int
    key: int


@dataclass(frozen=True)
class TimeSignature:
    numerator: int
    denominator: int


@dataclass(frozen=True)
class Tempo:
    microseconds_per_quarter: int


@dataclass(frozen=True)
class OtherMeta:
    meta_type: int
    data: bytes = b""

    @property
    def is_end_of_track(self):
        return self.meta_type == META_END_OF_TRACK


@dataclass(frozen=True)
class OtherChannel:
    status: int
    data: bytes


EventKind = Union[NoteOn, NoteOff, TimeSignature, Tempo, OtherMeta, OtherChannel]

END_OF_TRACK = OtherMeta(META_END_OF_TRACK)


@dataclass(frozen=True)
class TimedEvent:
    tick: int
    kind: EventKind


@dataclass
class Track:
    events: list[TimedEvent] = field(default_factory=list)


@dataclass
class SmfFile:
    format: int
    ppq: int
    tracks: list[Track]

    def iter_events(self):
        """Yield ``(track_index, TimedEvent)`` for every event of every track."""
        for i, track in enumerate(self.tracks):
            for ev in track.events:
                yield i, ev


def parse_vlq(data: bytes, offset: int = 0) -> tuple[int, int]:
    """Decode a variable-length quantity at ``offset``.

    Returns ``(value, bytes_consumed)``; at most four bytes are read.
    """
    if offset < 0 or offset >= len(data):
        raise MalformedVlq(f"offset {offset} outside data of length {len(data)}")
    value = 0
    for i in range(4):
        pos = offset + i
        if pos >= len(data):
            raise MalformedVlq("data ends inside a variable-length quantity")
        byte = data[pos]
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, i + 1
    raise MalformedVlq("continuation bit still set after 4 bytes")


def encode_vlq(value: int) -> bytes:
    if not 0 <= value <= MAX_VLQ:
        raise ValueError(f"VLQ value out of range: {value}")
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    return bytes(reversed(out))


def _data_length(status):
    kind = status & 0xF0
    return 1 if kind in (0xC0, 0xD0) else 2


def _parse_track(data: bytes) -> Track:
    events = []
    pos = 0
    tick = 0
    running = None
    n = len(data)
    while pos < n:
        delta, used = parse_vlq(data, pos)
        pos += used
        tick += delta
        if pos >= n:
            raise TruncatedTrack("track ends after a delta time")
        status = data[pos]

        if status == 0xFF:
            if pos + 2 > n:
                raise TruncatedTrack("truncated meta event")
            meta_type = data[pos + 1]
            length, used = parse_vlq(data, pos + 2)
            start = pos + 2 + used
            end = start + length
            if end > n:
                raise TruncatedTrack("meta event runs past end of track")
            payload = data[start:end]
            pos = end
            running = None
            if meta_type == META_END_OF_TRACK:
                events.append(TimedEvent(tick, END_OF_TRACK))
                # anything after End-of-Track inside the chunk is ignored
                return Track(events)
            if meta_type == META_TIME_SIGNATURE and length >= 2:
                kind = TimeSignature(payload[0], 2 ** payload[1])
            elif meta_type == META_TEMPO and length == 3:
                kind = Tempo(int.from_bytes(payload, "big"))
            else:
                kind = OtherMeta(meta_type, bytes(payload))
            events.append(TimedEvent(tick, kind))
            continue

        if status in (0xF0, 0xF7):
            length, used = parse_vlq(data, pos + 1)
            pos += 1 + used + length
            if pos > n:
                raise TruncatedTrack("sysex runs past end of track")
            running = None
            continue

        if status & 0x80:
            running = status
            pos += 1
        elif running is None:
            raise MalformedEvent(f"data byte 0x{status:02X} without running status")
        need = _data_length(running)
        if pos + need > n:
            raise TruncatedTrack("channel message runs past end of track")
        payload = data[pos:pos + need]
        pos += need

        kind_nibble = running & 0xF0
        channel = running & 0x0F
        if kind_nibble == 0x90:
            if payload[1] == 0:
                kind = NoteOff(channel, payload[0])
            else:
                kind = NoteOn(channel, payload[0], payload[1])
        elif kind_nibble == 0x80:
            kind = NoteOff(channel, payload[0])
        else:
            kind = OtherChannel(running, bytes(payload))
        events.append(TimedEvent(tick, kind))

    # chunk ended cleanly without End-of-Track; close the track ourselves
    events.append(TimedEvent(tick, END_OF_TRACK))
    return Track(events)


def parse_smf(data: bytes) -> SmfFile:
    data = bytes(data)
    if len(data) < 14 or data[:4] != b"MThd":
        raise BadHeader("missing MThd chunk")
    (hlen,) = struct.unpack(">I", data[4:8])
    if hlen != 6:
        raise BadHeader(f"header length {hlen}, expected 6")
    fmt, ntrks, division = struct.unpack(">HHH", data[8:14])
    if fmt == 2:
        raise UnsupportedFormat("format 2 (independent sequences) is not supported")
    if fmt not in (0, 1):
        raise UnsupportedFormat(f"unknown format {fmt}")
    if division & 0x8000:
        raise UnsupportedDivision("SMPTE time division is not supported")
    if division == 0:
        raise UnsupportedDivision("zero ticks per quarter note")

    tracks = []
    pos = 14
    while len(tracks) < ntrks:
        if pos + 8 > len(data):
            raise TruncatedTrack(f"expected {ntrks} tracks, found {len(tracks)}")
        magic = data[pos:pos + 4]
        (length,) = struct.unpack(">I", data[pos + 4:pos + 8])
        start = pos + 8
        end = start + length
        if end > len(data):
            raise TruncatedTrack("chunk length runs past end of file")
        if magic == b"MTrk":
            tracks.append(_parse_track(data[start:end]))
        pos = end
    return SmfFile(format=fmt, ppq=division, tracks=tracks)


def read_smf(path) -> SmfFile:
    return parse_smf(Path(path).read_bytes())


def extract_time_signatures(smf: SmfFile) -> list[tuple[int, int, int]]:
    """All time signatures of all tracks as ``(tick, numerator, denominator)``,
    sorted by tick (stable, so track order breaks ties)."""
    sigs = [(ev.tick, ev.kind.numerator, ev.kind.denominator)
            for _, ev in smf.iter_events()
            if isinstance(ev.kind, TimeSignature)]
    sigs.sort(key=lambda s: s[0])
    return sigs


# -- fixture writer -----------------------------------------------------------

def _encode_event(kind) -> bytes:
    if isinstance(kind, NoteOn):
        return bytes([0x90 | kind.channel, kind.key, kind.velocity])
    if isinstance(kind, NoteOff):
        return bytes([0x80 | kind.channel, kind.key, 0])
    if isinstance(kind, TimeSignature):
        dd = kind.denominator.bit_length() - 1
        if 2 ** dd != kind.denominator:
            raise ValueError(f"denominator must be a power of two: {kind.denominator}")
        return bytes([0xFF, META_TIME_SIGNATURE, 4, kind.numerator, dd, 24, 8])
    if isinstance(kind, Tempo):
        return bytes([0xFF, META_TEMPO, 3]) + kind.microseconds_per_quarter.to_bytes(3, "big")
    if isinstance(kind, OtherMeta):
        return bytes([0xFF, kind.meta_type]) + encode_vlq(len(kind.data)) + kind.data
    if isinstance(kind, OtherChannel):
        return bytes([kind.status]) + kind.data
    raise TypeError(f"cannot encode {kind!r}")


def encode_track(events) -> bytes:
    """Serialize ``(tick, kind)`` pairs (absolute ticks) into an MTrk chunk.

    Events are stably sorted by tick and an End-of-Track is appended if the
    list does not already end with one. Running status is never used.
    """
    events = sorted(events, key=lambda e: e[0])
    if not events or events[-1][1] != END_OF_TRACK:
        last = events[-1][0] if events else 0
        events.append((last, END_OF_TRACK))
    body = bytearray()
    prev = 0
    for tick, kind in events:
        body += encode_vlq(tick - prev)
        body += _encode_event(kind)
        prev = tick
    return b"MTrk" + struct.pack(">I", len(body)) + bytes(body)


def write_smf(tracks, ppq: int = 480, fmt: int | None = None) -> bytes:
    """Build SMF bytes from a list of tracks, each a list of ``(tick, kind)``."""
    if fmt is None:
        fmt = 0 if len(tracks) == 1 else 1
    header = b"MThd" + struct.pack(">IHHH", 6, fmt, len(tracks), ppq)
    return header + b"".join(encode_track(t) for t in tracks)
