"""Synthetic camera originals used as simulator input and test fixtures."""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

from ..quant import ijg_table, to_natural
from .tiff import build_exif, make_entry

DEVICES = {
    "Canon Eos 650D": ("Canon", "Canon EOS 650D"),
    "Samsung Galaxy Note 3 Neo": ("SAMSUNG", "SM-N7505"),
    "iPhone 5": ("Apple", "iPhone 5"),
    "HTC Desire 526g": ("HTC", "HTC Desire 526G dual sim"),
    "Huawei G Play Mini": ("HUAWEI", "CHC-U01"),
}


def camera_exif(model: str, width: int, height: int, seed: int = 0,
                unique_model: bool = False, gps: bool = True) -> bytes:
    """A camera-like APP1 payload.

    Entry count, pointer tags included: 24, plus 1 with ``unique_model`` and
    6 with ``gps`` (five GPS tags and the GPS pointer).
    """
    rng = np.random.default_rng(seed)
    make, model_tag = DEVICES.get(model, (model.split()[0], model))
    stamp = f"2016:03:{1 + int(rng.integers(28)):02d} {int(rng.integers(24)):02d}:{int(rng.integers(60)):02d}:00"
    entries = [
        make_entry("Image", 0x010F, make),
        make_entry("Image", 0x0110, model_tag),
        make_entry("Image", 0x0112, 1),
        make_entry("Image", 0x011A, 72.0),
        make_entry("Image", 0x011B, 72.0),
        make_entry("Image", 0x0128, 2),
        make_entry("Image", 0x0131, "firmware 1.0"),
        make_entry("Image", 0x0132, stamp),
        make_entry("Image", 0x0213, 1),
        make_entry("Photo", 0x829A, float(1 / int(rng.choice([60, 125, 250])))),
        make_entry("Photo", 0x829D, float(rng.choice([2.2, 2.8, 4.0]))),
        make_entry("Photo", 0x8827, int(rng.choice([100, 200, 400]))),
        make_entry("Photo", 0x9000, b"0230"),
        make_entry("Photo", 0x9003, stamp),
        make_entry("Photo", 0x9004, stamp),
        make_entry("Photo", 0x9209, 16),
        make_entry("Photo", 0x920A, 4.1),
        make_entry("Photo", 0xA001, 1),
        make_entry("Photo", 0xA002, width),
        make_entry("Photo", 0xA003, height),
        make_entry("Photo", 0xA431, f"{int(rng.integers(10**9)):09d}"),
        make_entry("Iop", 0x0001, "R98"),
    ]
    if unique_model:
        entries.append(make_entry("Image", 0xC614, model))
    if gps:
        entries += [
            make_entry("GPSInfo", 0x0000, b"\x02\x02\x00\x00"),
            make_entry("GPSInfo", 0x0001, "N"),
            make_entry("GPSInfo", 0x0002, (37.0, 30.0, float(rng.integers(60)))),
            make_entry("GPSInfo", 0x0003, "E"),
            make_entry("GPSInfo", 0x0004, (15.0, 5.0, float(rng.integers(60)))),
        ]
    # the Exif, Interop and GPS pointers are regenerated by build_exif
    return build_exif(entries)


def synthetic_pixels(width: int, height: int, seed: int = 0) -> np.ndarray:
    """Smooth random scene with mild noise, uint8 RGB of shape (height, width, 3)."""
    rng = np.random.default_rng(seed)
    coarse = rng.random((max(2, height // 64), max(2, width // 64), 3)) * 255
    im = Image.fromarray(coarse.astype(np.uint8)).resize((width, height), Image.Resampling.BICUBIC)
    pixels = np.asarray(im, dtype=np.float64)
    pixels += rng.normal(0, 6, pixels.shape)
    return np.clip(pixels, 0, 255).astype(np.uint8)


def make_camera_jpeg(width: int, height: int, seed: int = 0, quality: int = 92,
                     model: str | None = "Canon Eos 650D", unique_model: bool = False,
                     gps: bool = True) -> bytes:
    """Encode a synthetic camera original; ``model=None`` omits EXIF entirely."""
    im = Image.fromarray(synthetic_pixels(width, height, seed))
    buf = io.BytesIO()
    kwargs = {}
    if model is not None:
        kwargs["exif"] = camera_exif(model, width, height, seed, unique_model, gps)
    tables = [to_natural(ijg_table(quality, 0).coefficients), to_natural(ijg_table(quality, 1).coefficients)]
    im.save(buf, "JPEG", qtables=tables, subsampling=2, **kwargs)
    return buf.getvalue()


def write_camera_sources(out_dir, count: int, width: int = 2200, height: int = 1650, seed: int = 0,
                         quality: int = 92) -> list[Path]:
    """Write ``count`` synthetic originals named IMG_0001.jpg, IMG_0002.jpg, ..."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    models = list(DEVICES)
    paths = []
    for i in range(count):
        path = out_dir / f"IMG_{i + 1:04d}.jpg"
        path.write_bytes(make_camera_jpeg(width, height, seed + i, quality, models[i % len(models)]))
        paths.append(path)
    return paths
