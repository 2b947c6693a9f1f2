"""Image ballistics for JPEG files shared through social platforms.

Tells whether an image went through a social platform, which one, and how it
was uploaded, from its file-structure features and a labeled reference set.
"""
from .classify import (
    DEFAULT_K, DEFAULT_T, Anomaly, AnomalyParams, ClassificationReport, Consistency, Engine,
    anomaly_check, classify, consistency_test, id3_predict, id3_train, knn_sns,
)
from .errors import BallisticsError
from .evaluate import Metrics, cross_validate
from .exif import ExifMap, count_entries, parse_exif
from .features import FeatureVector, FileIdentity, analyze_bytes, build_feature_vector, featurize_file
from .filenames import FilenameMatch, match_filename
from .jpeg import JpegStructure, parse_jpeg, scan_markers
from .labels import NOT_SURE, SelectionMethod, Sns, UploadClient
from .profiles import PlatformProfile, ProfileSet, default_profiles, load_profiles
from .store import LabeledSample, ReferenceDataset, build_similarity_matrix, ingest, load_index, save_index

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_K", "DEFAULT_T", "NOT_SURE", "Anomaly", "AnomalyParams", "BallisticsError",
    "ClassificationReport", "Consistency", "Engine", "ExifMap", "FeatureVector", "FileIdentity",
    "FilenameMatch", "JpegStructure", "LabeledSample", "Metrics", "PlatformProfile", "ProfileSet",
    "ReferenceDataset", "SelectionMethod", "Sns", "UploadClient", "analyze_bytes", "anomaly_check",
    "build_feature_vector", "build_similarity_matrix", "classify", "consistency_test", "count_entries",
    "cross_validate", "default_profiles", "featurize_file", "id3_predict", "id3_train", "ingest",
    "knn_sns", "load_index", "load_profiles", "match_filename", "parse_exif", "parse_jpeg",
    "save_index", "scan_markers",
]
