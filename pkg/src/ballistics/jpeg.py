"""Marker-level JPEG parsing: segments, frame size, quantization tables.

Only the marker syntax is interpreted; entropy-coded data is skipped, never
decoded.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

from .errors import MalformedJpeg, NoFrameHeader, NoQuantTable

SOI = 0xD8
EOI = 0xD9
SOS = 0xDA
DQT = 0xDB
DNL = 0xDC
DRI = 0xDD
DHT = 0xC4
DAC = 0xCC
COM = 0xFE
APP1 = 0xE1
TEM = 0x01
RST = frozenset(range(0xD0, 0xD8))

# SOFn excludes C4 (DHT), C8 (JPG) and CC (DAC)
SOF = frozenset({0xC0, 0xC1, 0xC2, 0xC3, 0xC5, 0xC6, 0xC7, 0xC9, 0xCA, 0xCB, 0xCD, 0xCE, 0xCF})
FRAME_SIZE_SOF = frozenset({0xC0, 0xC1, 0xC2})
STANDALONE = RST | {SOI, EOI, TEM}

EXIF_PREAMBLE = b"Exif\x00\x00"

_NAMES = {SOI: "SOI", EOI: "EOI", SOS: "SOS", DQT: "DQT", DNL: "DNL", DRI: "DRI",
          DHT: "DHT", DAC: "DAC", COM: "COM", TEM: "TEM"}
_NAMES.update({m: f"SOF{m - 0xC0}" for m in SOF})
_NAMES.update({m: f"RST{m - 0xD0}" for m in RST})
_NAMES.update({m: f"APP{m - 0xE0}" for m in range(0xE0, 0xF0)})


def marker_name(code: int) -> str:
    return _NAMES.get(code, f"0x{code:02X}")


@dataclass(frozen=True)
class MarkerSegment:
    marker_code: int
    offset: int
    length: int = 0
    payload: bytes = b""

    @property
    def name(self) -> str:
        return marker_name(self.marker_code)


@dataclass(frozen=True)
class QuantizationTable:
    """One DQT table. ``coefficients`` are kept in file (zigzag) order."""

    table_id: int
    precision: int
    coefficients: tuple[int, ...]

    def __post_init__(self):
        if len(self.coefficients) != 64:
            raise ValueError("a quantization table has exactly 64 coefficients")
        if min(self.coefficients) < 1:
            raise ValueError("quantization coefficients must be >= 1")
        if self.table_id not in (0, 1, 2, 3) or self.precision not in (8, 16):
            raise ValueError("bad table id or precision")


@dataclass(frozen=True)
class JpegStructure:
    width: int
    height: int
    segments: list[MarkerSegment] = field(repr=False)
    luminance_table: QuantizationTable
    chrominance_table: QuantizationTable | None = None
    exif_payload: bytes | None = field(default=None, repr=False)


def _skip_entropy_data(data: bytes, pos: int) -> int:
    """Return the offset of the next real marker at or after ``pos``.

    Stuffed 0xFF00 pairs, fill bytes and RSTn markers are not returned here;
    RSTn are picked up by the caller because they are reported as segments.
    """
    n = len(data)
    while True:
        pos = data.find(b"\xff", pos)
        if pos < 0 or pos + 1 >= n:
            raise MalformedJpeg("entropy-coded data runs past end of file")
        nxt = data[pos + 1]
        if nxt == 0x00 or nxt == 0xFF:
            pos += 1
            continue
        return pos


def scan_markers(data: bytes) -> list[MarkerSegment]:
    """Split a JPEG byte stream into marker segments, SOI through EOI."""
    data = bytes(data)
    if len(data) < 2 or data[0] != 0xFF or data[1] != SOI:
        raise MalformedJpeg("missing SOI marker")
    segments = [MarkerSegment(SOI, 0)]
    pos = 2
    n = len(data)
    in_scan = False
    while True:
        if in_scan:
            pos = _skip_entropy_data(data, pos)
        if pos >= n:
            raise MalformedJpeg("no EOI marker")
        if data[pos] != 0xFF:
            raise MalformedJpeg(f"expected marker at offset {pos}")
        # fill bytes may precede any marker
        while pos + 1 < n and data[pos + 1] == 0xFF:
            pos += 1
        if pos + 1 >= n:
            raise MalformedJpeg("truncated marker")
        code = data[pos + 1]
        if code == 0x00:
            raise MalformedJpeg(f"stray 0xFF00 at offset {pos}")
        if code in STANDALONE:
            segments.append(MarkerSegment(code, pos))
            pos += 2
            if code == EOI:
                return segments
            if code == SOI:
                raise MalformedJpeg(f"nested SOI at offset {pos - 2}")
            continue
        if pos + 4 > n:
            raise MalformedJpeg(f"truncated {marker_name(code)} header at offset {pos}")
        length = struct.unpack_from(">H", data, pos + 2)[0]
        if length < 2:
            raise MalformedJpeg(f"{marker_name(code)} declares length {length}")
        end = pos + 2 + length
        if end > n:
            raise MalformedJpeg(f"{marker_name(code)} at offset {pos} overruns the file")
        segments.append(MarkerSegment(code, pos, length, data[pos + 4:end]))
        pos = end
        in_scan = code == SOS


def extract_dimensions(segments: list[MarkerSegment]) -> tuple[int, int]:
    """(width, height) from the first SOF0/SOF1/SOF2 header."""
    for seg in segments:
        if seg.marker_code in FRAME_SIZE_SOF:
            if len(seg.payload) < 6:
                raise MalformedJpeg("short frame header")
            _, height, width = struct.unpack_from(">BHH", seg.payload)
            if width < 1 or height < 1:
                raise MalformedJpeg(f"frame header declares {width}x{height}")
            return width, height
    raise NoFrameHeader("no SOF0/SOF1/SOF2 marker")


def parse_dqt(payload: bytes) -> list[QuantizationTable]:
    tables = []
    pos = 0
    while pos < len(payload):
        pq, tq = payload[pos] >> 4, payload[pos] & 0x0F
        if pq > 1 or tq > 3:
            raise MalformedJpeg(f"bad DQT table header 0x{payload[pos]:02X}")
        pos += 1
        size = 128 if pq else 64
        if pos + size > len(payload):
            raise MalformedJpeg("DQT table truncated")
        fmt = ">64H" if pq else "64B"
        coefs = struct.unpack_from(fmt, payload, pos)
        pos += size
        if min(coefs) < 1:
            raise MalformedJpeg("zero quantizer in DQT")
        tables.append(QuantizationTable(tq, 16 if pq else 8, coefs))
    return tables


def extract_quant_tables(
    segments: list[MarkerSegment],
) -> tuple[QuantizationTable, QuantizationTable | None]:
    """Table 0 as luminance, table 1 as chrominance; first definition of an id wins."""
    found: dict[int, QuantizationTable] = {}
    for seg in segments:
        if seg.marker_code == DQT:
            for table in parse_dqt(seg.payload):
                found.setdefault(table.table_id, table)
    if 0 not in found:
        raise NoQuantTable("no quantization table with id 0")
    return found[0], found.get(1)


def count_structural_markers(segments: list[MarkerSegment]) -> int:
    """Number of markers describing file structure; RSTn and TEM are not counted."""
    return sum(1 for s in segments if s.marker_code not in RST and s.marker_code != TEM)


def find_exif_payload(segments: list[MarkerSegment]) -> bytes | None:
    for seg in segments:
        if seg.marker_code == APP1 and seg.payload.startswith(EXIF_PREAMBLE):
            return seg.payload
    return None


def parse_jpeg(data: bytes) -> JpegStructure:
    segments = scan_markers(data)
    width, height = extract_dimensions(segments)
    lum, chroma = extract_quant_tables(segments)
    return JpegStructure(width, height, segments, lum, chroma, find_exif_payload(segments))
