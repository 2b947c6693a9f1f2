"""Quantization-table helpers: zigzag reordering and IJG quality scaling."""
from __future__ import annotations

from .jpeg import QuantizationTable

# ZIGZAG[k] is the natural (row-major) index of the k-th coefficient in file order.
ZIGZAG = (
    0, 1, 8, 16, 9, 2, 3, 10,
    17, 24, 32, 25, 18, 11, 4, 5,
    12, 19, 26, 33, 40, 48, 41, 34,
    27, 20, 13, 6, 7, 14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36,
    29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46,
    53, 60, 61, 54, 47, 55, 62, 63,
)

# Example tables from ITU-T T.81 Annex K, natural order.
ANNEX_K_LUMINANCE = (
    16, 11, 10, 16, 24, 40, 51, 61,
    12, 12, 14, 19, 26, 58, 60, 55,
    14, 13, 16, 24, 40, 57, 69, 56,
    14, 17, 22, 29, 51, 87, 80, 62,
    18, 22, 37, 56, 68, 109, 103, 77,
    24, 35, 55, 64, 81, 104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103, 99,
)
ANNEX_K_CHROMINANCE = (
    17, 18, 24, 47, 99, 99, 99, 99,
    18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99,
    47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
)


def to_natural(zigzag_coefs) -> list[int]:
    natural = [0] * 64
    for k, idx in enumerate(ZIGZAG):
        natural[idx] = zigzag_coefs[k]
    return natural


def to_zigzag(natural_coefs) -> list[int]:
    return [natural_coefs[idx] for idx in ZIGZAG]


def ijg_scale(base_natural, quality: int) -> list[int]:
    """Scale a base table the way libjpeg's ``jpeg_set_quality`` does (baseline clamp)."""
    if not 1 <= quality <= 100:
        raise ValueError(f"quality {quality} outside 1..100")
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    return [min(255, max(1, (b * scale + 50) // 100)) for b in base_natural]


def ijg_table(quality: int, table_id: int = 0) -> QuantizationTable:
    """IJG table for ``quality``; id 0 is luminance, id 1 chrominance. Zigzag order."""
    base = ANNEX_K_LUMINANCE if table_id == 0 else ANNEX_K_CHROMINANCE
    return QuantizationTable(table_id, 8, tuple(to_zigzag(ijg_scale(base, quality))))
