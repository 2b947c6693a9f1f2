"""
Anatomy of a JPEG file
======================

Walk through the structural elements the classifier looks at: the marker
segments, the quantization tables, the EXIF entries and finally the
44-number feature vector built from them.
"""
import numpy as np

from ballistics.exif import count_entries, parse_exif, unique_camera_model
from ballistics.features import FEATURE_NAMES, build_feature_vector
from ballistics.jpeg import count_structural_markers, marker_name, parse_jpeg
from ballistics.quant import to_natural
from ballistics.simulator import make_camera_jpeg

# A synthetic camera original: 1024x768 pixels, quality 92, with the kind of
# metadata a phone writes (make, model, timestamps, GPS, ...).
data = make_camera_jpeg(1024, 768, seed=7, model="iPhone 5", unique_model=True)
structure = parse_jpeg(data)

# Marker segments in file order. Restart markers inside the scan would be
# listed too but are not counted as structure.
for seg in structure.segments:
    print(f"{seg.offset:8d}  {marker_name(seg.marker_code):5s} length={seg.length}")
print("structural markers:", count_structural_markers(structure.segments))

# Quantization tables are stored in zigzag order; the feature keeps the first
# 32 luminance and 8 chrominance coefficients in that order. Shown here in
# raster layout for readability.
print("luminance table (natural 8x8 layout):")
print(np.array(to_natural(structure.luminance_table.coefficients)).reshape(8, 8))

# EXIF entries across IFD0, the Exif and GPS sub-IFDs and the Interop IFD.
exif = parse_exif(structure.exif_payload)
print("EXIF entries:", count_entries(exif))
for key in list(exif.entries)[:8]:
    print(f"  {key} = {exif.entries[key]!r}")
print("unique camera model:", unique_camera_model(exif))

# The feature vector: w, h, EXIF count, marker count, 32 + 8 coefficients.
v = build_feature_vector(structure, exif)
for name, value in list(zip(FEATURE_NAMES, v.flatten()))[:8]:
    print(f"  {name:12s} {value}")
print("dimension:", len(v.flatten()))
