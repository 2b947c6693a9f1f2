"""Labeled reference dataset: ingestion, index files and the similarity matrix."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BallisticsError, EmptyDataset, FormatError, ManifestError, ZeroVector
from .features import DIM, FEATURE_NAMES, FeatureVector, featurize_file
from .labels import SelectionMethod, Sns, UploadClient, check_scenario

log = logging.getLogger(__name__)

MANIFEST_COLUMNS = ["filename", "sns", "upload_client", "selection_method"]
INDEX_COLUMNS = ["id", "filename", *FEATURE_NAMES, "sns", "upload_client", "selection_method"]


@dataclass(frozen=True)
class LabeledSample:
    id: int
    vector: FeatureVector
    sns: Sns
    upload_client: UploadClient
    selection_method: SelectionMethod
    filename: str = ""

    def __post_init__(self):
        check_scenario(self.upload_client, self.selection_method)

    @property
    def scenario(self) -> tuple[UploadClient, SelectionMethod]:
        return self.upload_client, self.selection_method


def unit_rows(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(matrix, axis=-1, keepdims=True)
    if np.any(norms == 0):
        raise ZeroVector("cosine similarity is undefined for an all-zero vector")
    return matrix / norms


def build_similarity_matrix(vectors) -> np.ndarray:
    """N x N cosine similarities of the rows of ``vectors`` (samples or arrays).

    The result is exactly symmetric with a unit diagonal; values are clipped
    to [0, 1] to absorb rounding.
    """
    rows = [s.vector.to_array() if isinstance(s, LabeledSample) else
            s.to_array() if isinstance(s, FeatureVector) else np.asarray(s, dtype=np.float64)
            for s in vectors]
    if not rows:
        return np.zeros((0, 0))
    unit = unit_rows(np.vstack(rows))
    sim = unit @ unit.T
    sim = (sim + sim.T) / 2.0
    np.fill_diagonal(sim, 1.0)
    return np.clip(sim, 0.0, 1.0)


@dataclass
class ReferenceDataset:
    samples: list[LabeledSample]
    similarity: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.similarity is None:
            self.similarity = build_similarity_matrix(self.samples)
        self._matrix = np.vstack([s.vector.to_array() for s in self.samples]) if self.samples \
            else np.zeros((0, DIM))
        self._unit = unit_rows(self._matrix) if self.samples else self._matrix

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def matrix(self) -> np.ndarray:
        """Flattened feature vectors, one row per sample."""
        return self._matrix

    def similarities_to(self, v) -> np.ndarray:
        """Cosine similarity of ``v`` to every sample, clipped to [0, 1]."""
        q = v.to_array() if isinstance(v, FeatureVector) else np.asarray(v, dtype=np.float64)
        norm = np.linalg.norm(q)
        if norm == 0:
            raise ZeroVector("query vector is all zeros")
        return np.clip(self._unit @ (q / norm), 0.0, 1.0)

    def subset(self, indices) -> "ReferenceDataset":
        indices = list(indices)
        return ReferenceDataset([self.samples[i] for i in indices],
                                self.similarity[np.ix_(indices, indices)])

    def class_counts(self) -> dict[Sns, int]:
        counts: dict[Sns, int] = {}
        for s in self.samples:
            counts[s.sns] = counts.get(s.sns, 0) + 1
        return counts


@dataclass(frozen=True)
class ManifestRow:
    filename: str
    sns: Sns
    upload_client: UploadClient
    selection_method: SelectionMethod


def read_manifest(path) -> list[ManifestRow]:
    rows = []
    with open(path, newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh, delimiter="\t"), start=1):
            if not rec or rec[0].startswith("#") or rec == MANIFEST_COLUMNS:
                continue
            if len(rec) != 4:
                raise ManifestError(f"{path}:{lineno}: expected 4 columns, got {len(rec)}")
            try:
                row = ManifestRow(rec[0], Sns(rec[1]), UploadClient(rec[2]), SelectionMethod(rec[3]))
                check_scenario(row.upload_client, row.selection_method)
            except ValueError as exc:
                raise ManifestError(f"{path}:{lineno}: {exc}") from None
            rows.append(row)
    return rows


def write_manifest(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(MANIFEST_COLUMNS)
        for r in rows:
            w.writerow([r.filename, r.sns.value, r.upload_client.value, r.selection_method.value])


def ingest(manifest, image_root=None) -> tuple[ReferenceDataset, list[tuple[str, str]]]:
    """Featurize every manifest row; returns the dataset and per-file errors.

    ``manifest`` is a path or a list of ManifestRow. Relative filenames are
    resolved against ``image_root`` (default: the manifest's directory).
    """
    if isinstance(manifest, (str, Path)):
        root = Path(image_root) if image_root is not None else Path(manifest).parent
        rows = read_manifest(manifest)
    else:
        root = Path(image_root) if image_root is not None else Path(".")
        rows = list(manifest)
    samples, errors = [], []
    for row in rows:
        path = root / row.filename
        try:
            _, vector, _ = featurize_file(path)
            if not any(vector.flatten()):
                raise ZeroVector("all-zero feature vector")
        except (OSError, BallisticsError, ValueError) as exc:
            log.warning("skipping %s: %s", row.filename, exc)
            errors.append((row.filename, f"{type(exc).__name__}: {exc}"))
            continue
        samples.append(LabeledSample(len(samples), vector, row.sns, row.upload_client,
                                     row.selection_method, row.filename))
    if not samples:
        raise EmptyDataset("no manifest row produced a usable sample")
    return ReferenceDataset(samples), errors


def save_index(ds: ReferenceDataset, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(INDEX_COLUMNS)
        for s in ds.samples:
            w.writerow([s.id, s.filename, *s.vector.flatten(), s.sns.value,
                        s.upload_client.value, s.selection_method.value])


def load_index(path) -> ReferenceDataset:
    samples = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        header = next(reader, None)
        if header != INDEX_COLUMNS:
            raise FormatError(f"{path}: unexpected index header")
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(INDEX_COLUMNS):
                raise FormatError(f"{path}:{lineno}: expected {len(INDEX_COLUMNS)} columns, "
                                  f"got {len(rec)}")
            try:
                vector = FeatureVector.from_sequence(rec[2:2 + DIM])
                samples.append(LabeledSample(int(rec[0]), vector, Sns(rec[-3]),
                                             UploadClient(rec[-2]), SelectionMethod(rec[-1]), rec[1]))
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
    if not samples:
        raise EmptyDataset(f"{path}: index holds no samples")
    return ReferenceDataset(samples)
