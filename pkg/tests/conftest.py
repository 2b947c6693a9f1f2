"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the package's own parsing code: the
segment dump walks bytes with a regex, the zigzag order is generated from
diagonals, and pixel sizes / DQTs / EXIF counts come from Pillow's decoder.
"""
from __future__ import annotations

import io
import re

import numpy as np
import pytest
from PIL import ExifTags, Image

from ballistics.features import FeatureVector
from ballistics.labels import SelectionMethod, Sns, UploadClient
from ballistics.store import LabeledSample, ReferenceDataset

_NEXT_MARKER = re.compile(rb"\xff+([^\x00\xff\xd0-\xd7])")
_RST = re.compile(rb"\xff[\xd0-\xd7]")


def segment_dump(data: bytes) -> list[tuple[int, bytes]]:
    """(marker code, payload) for every length-bearing or standalone marker.

    RST markers inside scans are returned with code 0xD0-0xD7 and empty payload.
    """
    assert data[:2] == b"\xff\xd8"
    out = [(0xD8, b"")]
    i = 2
    while i < len(data):
        m = _NEXT_MARKER.match(data, i)
        assert m, f"no marker at {i}"
        code = m.group(1)[0]
        i = m.end()
        if code == 0xD9:
            out.append((code, b""))
            break
        n = int.from_bytes(data[i:i + 2], "big")
        out.append((code, data[i + 2:i + n]))
        i += n
        if code == 0xDA:
            m = _NEXT_MARKER.search(data, i)
            out.extend((r.group()[1], b"") for r in _RST.finditer(data, i, m.start()))
            i = m.start()
    return out


def oracle_structural_count(data: bytes) -> int:
    return sum(1 for code, _ in segment_dump(data) if not 0xD0 <= code <= 0xD7)


def oracle_dimensions(data: bytes) -> tuple[int, int]:
    return Image.open(io.BytesIO(data)).size


def zigzag_positions() -> list[int]:
    """Natural (row-major) index of each zigzag storage position."""
    cells = [(r, c) for r in range(8) for c in range(8)]
    cells.sort(key=lambda rc: (rc[0] + rc[1], rc[0] if (rc[0] + rc[1]) % 2 else -rc[0]))
    return [r * 8 + c for r, c in cells]


def oracle_tables(data: bytes) -> dict[int, list[int]]:
    """Pillow's decoded tables (natural order) converted to storage order."""
    q = Image.open(io.BytesIO(data)).quantization
    zz = zigzag_positions()
    return {tid: [int(t[n]) for n in zz] for tid, t in q.items()}


def oracle_exif_count(data: bytes) -> int:
    """IFD0 plus the Exif, GPS, Interop and thumbnail IFDs as Pillow reads them."""
    exif = Image.open(io.BytesIO(data)).getexif()
    subs = (ExifTags.IFD.Exif, ExifTags.IFD.GPSInfo, ExifTags.IFD.Interop, ExifTags.IFD.IFD1)
    n = len(exif)
    for i in subs:
        try:
            n += len(exif.get_ifd(i))
        except KeyError:  # Pillow raises for an Interop pointer that is absent
            pass
    return n


def encode(size=(16, 16), mode="RGB", seed=0, **save) -> bytes:
    rng = np.random.default_rng(seed)
    shape = (size[1], size[0]) + ((3,) if mode == "RGB" else ())
    im = Image.fromarray(rng.integers(0, 256, shape, dtype=np.uint8))
    buf = io.BytesIO()
    im.save(buf, "JPEG", **save)
    return buf.getvalue()


def vec(values) -> FeatureVector:
    return FeatureVector.from_sequence(values)


def make_vector(w=640, h=480, exif=0, markers=11, lum=16, chroma=17) -> FeatureVector:
    return FeatureVector(w, h, exif, markers, (lum,) * 32, (chroma,) * 8)


def make_dataset(vectors_and_labels) -> ReferenceDataset:
    samples = []
    for i, item in enumerate(vectors_and_labels):
        v, sns = item[0], item[1]
        client = item[2] if len(item) > 2 else UploadClient.BROWSER
        method = item[3] if len(item) > 3 else SelectionMethod.NOT_APPLICABLE
        v = v if isinstance(v, FeatureVector) else vec(v)
        samples.append(LabeledSample(i, v, Sns(sns), client, method, f"s{i}.jpg"))
    return ReferenceDataset(samples)


@pytest.fixture(scope="session")
def q50_rgb() -> bytes:
    return encode((16, 16), "RGB", quality=50)


@pytest.fixture(scope="session")
def q50_gray() -> bytes:
    return encode((16, 16), "L", quality=50)
