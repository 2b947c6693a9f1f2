"""Minimal EXIF/TIFF writer used to emit and edit APP1 payloads."""
from __future__ import annotations

import struct
from fractions import Fraction

from ..exif import (
    EXIF_IFD_POINTER, GPS_IFD_POINTER, INTEROP_IFD_POINTER, THUMBNAIL_LENGTH,
    THUMBNAIL_OFFSET, ExifMap, RawEntry,
)
from ..jpeg import EXIF_PREAMBLE

_LAYOUT = ("Image", "Photo", "Iop", "GPSInfo", "Thumbnail")
_POINTERS = {
    ("Image", EXIF_IFD_POINTER), ("Image", GPS_IFD_POINTER), ("Photo", INTEROP_IFD_POINTER),
    ("Thumbnail", THUMBNAIL_OFFSET), ("Thumbnail", THUMBNAIL_LENGTH),
}


def make_entry(group: str, tag: int, value, order: str = "<") -> RawEntry:
    """Build a RawEntry from a Python value (str, int, float/Fraction, tuple, bytes)."""
    if isinstance(value, str):
        data = value.encode("latin-1") + b"\x00"
        return RawEntry(group, tag, 2, len(data), data)
    if isinstance(value, bytes):
        return RawEntry(group, tag, 7, len(value), value)
    values = value if isinstance(value, tuple) else (value,)
    if all(isinstance(v, int) for v in values):
        if max(values) < 1 << 16 and min(values) >= 0:
            return RawEntry(group, tag, 3, len(values), struct.pack(f"{order}{len(values)}H", *values))
        return RawEntry(group, tag, 4, len(values), struct.pack(f"{order}{len(values)}L", *values))
    packed = b""
    for v in values:
        f = Fraction(v).limit_denominator(1 << 20)
        packed += struct.pack(order + "LL", f.numerator, f.denominator)
    return RawEntry(group, tag, 5, len(values), packed)


def build_exif(entries: list[RawEntry], order: str = "<", thumbnail: bytes | None = None) -> bytes:
    """Serialize entries into an ``Exif\\0\\0`` + TIFF payload.

    Entry data must already be packed in ``order``. IFD pointer and thumbnail
    location tags are regenerated; any present in ``entries`` are ignored.
    Entries whose data is missing are dropped.
    """
    groups: dict[str, list[RawEntry]] = {g: [] for g in _LAYOUT}
    for e in entries:
        if e.data is None or (e.group, e.tag) in _POINTERS:
            continue
        groups[e.group].append(e)
    if thumbnail is not None:
        groups["Thumbnail"].append(make_entry("Thumbnail", THUMBNAIL_OFFSET, 0xFFFFFFFF, order))
        groups["Thumbnail"].append(make_entry("Thumbnail", THUMBNAIL_LENGTH, 0xFFFFFFFF, order))
    if groups["Iop"]:
        groups["Photo"].append(make_entry("Photo", INTEROP_IFD_POINTER, 0xFFFFFFFF, order))
    if groups["Photo"]:
        groups["Image"].append(make_entry("Image", EXIF_IFD_POINTER, 0xFFFFFFFF, order))
    if groups["GPSInfo"]:
        groups["Image"].append(make_entry("Image", GPS_IFD_POINTER, 0xFFFFFFFF, order))
    present = [g for g in _LAYOUT if groups[g] or g == "Image"]
    for g in present:
        groups[g].sort(key=lambda e: e.tag)

    def data_size(group):
        return sum(_padded(len(e.data)) for e in groups[group] if len(e.data) > 4)

    offsets = {}
    pos = 8
    for g in present:
        offsets[g] = pos
        pos += 2 + 12 * len(groups[g]) + 4 + data_size(g)
    thumb_offset = pos

    pointer_values = {
        ("Image", EXIF_IFD_POINTER): offsets.get("Photo"),
        ("Image", GPS_IFD_POINTER): offsets.get("GPSInfo"),
        ("Photo", INTEROP_IFD_POINTER): offsets.get("Iop"),
        ("Thumbnail", THUMBNAIL_OFFSET): thumb_offset,
        ("Thumbnail", THUMBNAIL_LENGTH): len(thumbnail) if thumbnail is not None else 0,
    }
    out = bytearray(b"II*\x00" if order == "<" else b"MM\x00*")
    out += struct.pack(order + "L", 8)
    for g in present:
        ifd = groups[g]
        value_pos = offsets[g] + 2 + 12 * len(ifd) + 4
        table = bytearray(struct.pack(order + "H", len(ifd)))
        blob = bytearray()
        for e in ifd:
            data = e.data
            if (e.group, e.tag) in pointer_values:
                data = struct.pack(order + "L", pointer_values[(e.group, e.tag)])
            table += struct.pack(order + "HHL", e.tag, e.type, e.count)
            if len(data) <= 4:
                table += data.ljust(4, b"\x00")
            else:
                table += struct.pack(order + "L", value_pos + len(blob))
                blob += data.ljust(_padded(len(data)), b"\x00")
        nxt = offsets["Thumbnail"] if g == "Image" and "Thumbnail" in offsets else 0
        table += struct.pack(order + "L", nxt)
        out += table + blob
    if thumbnail is not None:
        out += thumbnail
    return EXIF_PREAMBLE + bytes(out)


def _padded(n: int) -> int:
    return n + (n & 1)


def filter_exif(exif: ExifMap, keep) -> bytes | None:
    """Rebuild ``exif`` keeping entries for which ``keep(entry)`` is true.

    Returns None when nothing is left, meaning the APP1 segment should go.
    """
    kept = [e for e in exif.raw if keep(e) and (e.group, e.tag) not in _POINTERS]
    thumbnail = exif.thumbnail if any(e.group == "Thumbnail" for e in kept) else None
    if not kept and thumbnail is None:
        return None
    return build_exif(kept, exif.byte_order, thumbnail)

