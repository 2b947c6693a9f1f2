"""The 44-dimensional feature vector and the per-file identity."""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .exif import ExifMap, count_entries, empty_exif, parse_exif
from .jpeg import JpegStructure, count_structural_markers, parse_jpeg

N_LUMA = 32
N_CHROMA = 8
DIM = 4 + N_LUMA + N_CHROMA

FEATURE_NAMES = (
    ["w", "h", "exif_count", "marker_count"]
    + [f"l{j}" for j in range(N_LUMA)]
    + [f"c{k}" for k in range(N_CHROMA)]
)


@dataclass(frozen=True)
class FeatureVector:
    w: int
    h: int
    exif_count: int
    marker_count: int
    lum: tuple[int, ...]
    chroma: tuple[int, ...]

    def __post_init__(self):
        if len(self.lum) != N_LUMA or len(self.chroma) != N_CHROMA:
            raise ValueError(f"expected {N_LUMA} luminance and {N_CHROMA} chrominance values")
        if min(self.w, self.h, self.exif_count, self.marker_count, *self.chroma) < 0:
            raise ValueError("feature components must be non-negative")
        if min(self.lum) < 1:
            raise ValueError("luminance quantizers must be >= 1")

    def flatten(self) -> list[int]:
        return vector_flatten(self)

    def to_array(self) -> np.ndarray:
        return np.asarray(vector_flatten(self), dtype=np.float64)

    @classmethod
    def from_sequence(cls, values) -> "FeatureVector":
        return vector_unflatten(values)


@dataclass(frozen=True)
class FileIdentity:
    filename: str
    byte_size: int

    def __post_init__(self):
        if not self.filename:
            raise ValueError("filename must be non-empty")

    @classmethod
    def of(cls, path) -> "FileIdentity":
        return cls(os.path.basename(os.fspath(path)), os.path.getsize(path))


def build_feature_vector(structure: JpegStructure, exif: ExifMap) -> FeatureVector:
    """Assemble the feature vector; chroma is zero-filled for single-table files."""
    lum = structure.luminance_table.coefficients[:N_LUMA]
    if structure.chrominance_table is None:
        chroma = (0,) * N_CHROMA
    else:
        chroma = structure.chrominance_table.coefficients[:N_CHROMA]
    return FeatureVector(
        structure.width,
        structure.height,
        count_entries(exif),
        count_structural_markers(structure.segments),
        tuple(lum),
        tuple(chroma),
    )


def vector_flatten(v: FeatureVector) -> list[int]:
    return [v.w, v.h, v.exif_count, v.marker_count, *v.lum, *v.chroma]


def vector_unflatten(values) -> FeatureVector:
    values = [int(round(float(x))) for x in values]
    if len(values) != DIM:
        raise ValueError(f"expected {DIM} values, got {len(values)}")
    return FeatureVector(values[0], values[1], values[2], values[3],
                         tuple(values[4:4 + N_LUMA]), tuple(values[4 + N_LUMA:]))


def analyze_bytes(data: bytes) -> tuple[JpegStructure, ExifMap, FeatureVector]:
    """Parse a JPEG byte string end to end: structure, EXIF, features."""
    structure = parse_jpeg(data)
    exif = parse_exif(structure.exif_payload) if structure.exif_payload else empty_exif()
    return structure, exif, build_feature_vector(structure, exif)


def featurize_file(path) -> tuple[FileIdentity, FeatureVector, ExifMap]:
    with open(path, "rb") as fh:
        data = fh.read()
    _, exif, vector = analyze_bytes(data)
    return FileIdentity(os.path.basename(os.fspath(path)), len(data)), vector, exif
