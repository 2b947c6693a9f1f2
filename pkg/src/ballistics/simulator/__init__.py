"""Platform upload-pipeline simulator for building labeled corpora."""
from .pipeline import (
    SimulationJob, SimulationResult, corpus_jobs, generate_corpus, platform_decisions,
    render_name, replace_exif_segment, resized_dimensions, simulate_upload,
)
from .sources import camera_exif, make_camera_jpeg, write_camera_sources
from .tiff import build_exif, filter_exif, make_entry

__all__ = [
    "SimulationJob", "SimulationResult", "build_exif", "camera_exif", "corpus_jobs",
    "filter_exif", "generate_corpus", "make_camera_jpeg", "make_entry", "platform_decisions",
    "render_name", "replace_exif_segment", "resized_dimensions", "simulate_upload",
    "write_camera_sources",
]
