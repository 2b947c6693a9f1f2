"""Reader for the TIFF structure inside an APP1 ``Exif`` payload.

Entries are collected from IFD0, the Exif sub-IFD, the GPS IFD, the
Interoperability IFD and the thumbnail IFD (IFD1). Maker notes are kept as
one opaque entry.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

from .errors import MalformedTiff, NotExif
from .jpeg import EXIF_PREAMBLE

EXIF_IFD_POINTER = 0x8769
GPS_IFD_POINTER = 0x8825
INTEROP_IFD_POINTER = 0xA005
MAKER_NOTE = 0x927C
UNIQUE_CAMERA_MODEL = 0xC614
THUMBNAIL_OFFSET = 0x0201
THUMBNAIL_LENGTH = 0x0202

POINTER_TAGS = {EXIF_IFD_POINTER: "Photo", GPS_IFD_POINTER: "GPSInfo"}

# TIFF field type -> (struct code, byte size)
TYPE_FORMATS = {
    1: ("B", 1), 2: ("s", 1), 3: ("H", 2), 4: ("L", 4), 5: ("LL", 8),
    6: ("b", 1), 7: ("s", 1), 8: ("h", 2), 9: ("l", 4), 10: ("ll", 8),
    11: ("f", 4), 12: ("d", 8), 13: ("L", 4),
}

# Group names follow the exiv2 key convention (Exif.<group>.<tag>).
IFD_GROUPS = ("Image", "Photo", "GPSInfo", "Iop", "Thumbnail")

TAG_NAMES = {
    "Image": {
        0x010E: "ImageDescription", 0x010F: "Make", 0x0110: "Model", 0x0112: "Orientation",
        0x011A: "XResolution", 0x011B: "YResolution", 0x0128: "ResolutionUnit",
        0x0131: "Software", 0x0132: "DateTime", 0x013B: "Artist", 0x0213: "YCbCrPositioning",
        0x8298: "Copyright", EXIF_IFD_POINTER: "ExifTag", GPS_IFD_POINTER: "GPSTag",
        UNIQUE_CAMERA_MODEL: "UniqueCameraModel", 0xC615: "LocalizedCameraModel",
        0xC62F: "CameraSerialNumber",
    },
    "Photo": {
        0x829A: "ExposureTime", 0x829D: "FNumber", 0x8822: "ExposureProgram",
        0x8827: "ISOSpeedRatings", 0x9000: "ExifVersion", 0x9003: "DateTimeOriginal",
        0x9004: "DateTimeDigitized", 0x9101: "ComponentsConfiguration",
        0x9201: "ShutterSpeedValue", 0x9202: "ApertureValue", 0x9204: "ExposureBiasValue",
        0x9207: "MeteringMode", 0x9209: "Flash", 0x920A: "FocalLength", MAKER_NOTE: "MakerNote",
        0x9286: "UserComment", 0xA000: "FlashpixVersion", 0xA001: "ColorSpace",
        0xA002: "PixelXDimension", 0xA003: "PixelYDimension", INTEROP_IFD_POINTER: "InteroperabilityTag",
        0xA402: "ExposureMode", 0xA403: "WhiteBalance", 0xA406: "SceneCaptureType",
        0xA430: "CameraOwnerName", 0xA431: "BodySerialNumber", 0xA432: "LensSpecification",
        0xA433: "LensMake", 0xA434: "LensModel", 0xA435: "LensSerialNumber",
    },
    "GPSInfo": {
        0x0000: "GPSVersionID", 0x0001: "GPSLatitudeRef", 0x0002: "GPSLatitude",
        0x0003: "GPSLongitudeRef", 0x0004: "GPSLongitude", 0x0005: "GPSAltitudeRef",
        0x0006: "GPSAltitude", 0x0007: "GPSTimeStamp", 0x001D: "GPSDateStamp",
    },
    "Iop": {0x0001: "InteroperabilityIndex", 0x0002: "InteroperabilityVersion"},
    "Thumbnail": {
        0x0103: "Compression", 0x011A: "XResolution", 0x011B: "YResolution",
        0x0128: "ResolutionUnit", THUMBNAIL_OFFSET: "JPEGInterchangeFormat",
        THUMBNAIL_LENGTH: "JPEGInterchangeFormatLength",
    },
}


@dataclass(frozen=True)
class RawEntry:
    """One IFD entry as stored: the value bytes are in the payload's byte order."""

    group: str
    tag: int
    type: int
    count: int
    data: bytes | None


@dataclass
class ExifMap:
    entries: dict[str, object] = field(default_factory=dict)
    ifd_count: int = 0
    byte_order: str = "<"
    raw: list[RawEntry] = field(default_factory=list, repr=False)
    thumbnail: bytes | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, key: str, default=None):
        return self.entries.get(key, default)


def tag_path(group: str, tag: int) -> str:
    name = TAG_NAMES.get(group, {}).get(tag, f"0x{tag:04x}")
    return f"Exif.{group}.{name}"


def _decode_value(typ: int, count: int, data: bytes, order: str):
    if typ == 2:
        return data.split(b"\x00", 1)[0].decode("latin-1")
    if typ == 7 or typ not in TYPE_FORMATS:
        return data
    code, size = TYPE_FORMATS[typ]
    if typ in (5, 10):
        nums = struct.unpack(f"{order}{2 * count}{code[0]}", data)
        vals = tuple(n / d if d else float("nan") for n, d in zip(nums[::2], nums[1::2]))
    else:
        vals = struct.unpack(f"{order}{count}{code}", data)
    return vals[0] if count == 1 else vals


def parse_exif(payload: bytes) -> ExifMap:
    """Parse an APP1 payload (starting with ``Exif\\0\\0``) into an ExifMap."""
    payload = bytes(payload)
    if not payload.startswith(EXIF_PREAMBLE):
        raise NotExif("payload does not start with the Exif preamble")
    tiff = payload[len(EXIF_PREAMBLE):]
    if len(tiff) < 8:
        raise MalformedTiff("TIFF header truncated")
    if tiff[:2] == b"II":
        order = "<"
    elif tiff[:2] == b"MM":
        order = ">"
    else:
        raise MalformedTiff(f"bad byte-order mark {tiff[:2]!r}")
    if struct.unpack_from(order + "H", tiff, 2)[0] != 42:
        raise MalformedTiff("bad TIFF magic")
    ifd0 = struct.unpack_from(order + "L", tiff, 4)[0]
    if ifd0 < 8 or ifd0 + 2 > len(tiff):
        raise MalformedTiff(f"IFD0 offset {ifd0} outside payload")

    result = ExifMap(byte_order=order)
    visited: set[int] = set()

    def u16(off):
        return struct.unpack_from(order + "H", tiff, off)[0]

    def u32(off):
        return struct.unpack_from(order + "L", tiff, off)[0]

    def read_ifd(offset: int, group: str) -> int | None:
        """Read one IFD; returns the next-IFD offset (or None)."""
        if offset in visited or offset < 8 or offset + 2 > len(tiff):
            return None
        visited.add(offset)
        n = u16(offset)
        if offset + 2 + 12 * n > len(tiff):
            return None
        result.ifd_count += 1
        children = []
        for i in range(n):
            e = offset + 2 + 12 * i
            tag, typ, count = u16(e), u16(e + 2), u32(e + 4)
            size = TYPE_FORMATS.get(typ, ("s", 1))[1] * count
            if size <= 4:
                data = tiff[e + 8:e + 8 + size]
            else:
                voff = u32(e + 8)
                data = tiff[voff:voff + size] if voff + size <= len(tiff) else None
            result.raw.append(RawEntry(group, tag, typ, count, data))
            key = tag_path(group, tag)
            while key in result.entries:
                key += "#"
            if data is None:
                value = None
            elif tag == MAKER_NOTE:
                value = data
            else:
                try:
                    value = _decode_value(typ, count, data, order)
                except struct.error:
                    value = None
            result.entries[key] = value
            if typ in (3, 4, 13) and count == 1 and data is not None:
                ptr = u16(e + 8) if typ == 3 else u32(e + 8)
                if group == "Image" and tag in POINTER_TAGS:
                    children.append((ptr, POINTER_TAGS[tag]))
                elif group == "Photo" and tag == INTEROP_IFD_POINTER:
                    children.append((ptr, "Iop"))
        for ptr, child in children:
            read_ifd(ptr, child)
        end = offset + 2 + 12 * n
        return u32(end) if end + 4 <= len(tiff) else None

    nxt = read_ifd(ifd0, "Image")
    if nxt:
        read_ifd(nxt, "Thumbnail")
        off = result.get(tag_path("Thumbnail", THUMBNAIL_OFFSET))
        length = result.get(tag_path("Thumbnail", THUMBNAIL_LENGTH))
        if isinstance(off, int) and isinstance(length, int) and off + length <= len(tiff):
            result.thumbnail = tiff[off:off + length]
    return result


def empty_exif() -> ExifMap:
    return ExifMap()


def count_entries(exif: ExifMap) -> int:
    return len(exif.entries)


def unique_camera_model(exif: ExifMap) -> str | None:
    value = exif.get(tag_path("Image", UNIQUE_CAMERA_MODEL))
    if value is None:
        return None
    if isinstance(value, bytes):
        value = value.split(b"\x00", 1)[0].decode("latin-1")
    return str(value).strip() or None
