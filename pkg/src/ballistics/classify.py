"""Anomaly detector, K-NN platform classifier, upload-scenario tree and the
consistency loop that joins them into one report."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import id3
from .errors import BadParams, EmptyDataset, EmptySamples
from .exif import ExifMap, unique_camera_model
from .features import FeatureVector, FileIdentity, featurize_file
from .filenames import FilenameMatch, match_filename
from .labels import ALL_SCENARIOS, NOT_SURE, SelectionMethod, Sns, UploadClient
from .profiles import ProfileSet, default_profiles
from .store import LabeledSample, ReferenceDataset

DEFAULT_K = 3
DEFAULT_T = 2.90
# Similarities (and their sums) are compared at this many decimals, so that
# mathematically tied cosines that differ by rounding noise still tie and a
# query duplicated K times reaches T = K exactly.
RANK_DECIMALS = 12


class Anomaly(str, Enum):
    PROCESSED = "Processed"
    NOT_PROCESSED = "NotProcessed"


class Consistency(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"


@dataclass(frozen=True)
class AnomalyParams:
    K: int = DEFAULT_K
    T: float = DEFAULT_T

    def __post_init__(self):
        if not isinstance(self.K, (int, np.integer)) or self.K < 1:
            raise BadParams(f"K must be a positive integer, got {self.K!r}")
        if not 0 <= self.T <= self.K:
            raise BadParams(f"T must lie in [0, K={self.K}], got {self.T}")


def top_k_similarity_sum(v, ds: ReferenceDataset, K: int) -> float:
    sims = ds.similarities_to(v)
    return float(np.round(np.sort(sims)[::-1][:K].sum(), RANK_DECIMALS))


def anomaly_check(v: FeatureVector, ds: ReferenceDataset, p: AnomalyParams = AnomalyParams()) -> Anomaly:
    """Processed when the K largest similarities to the dataset sum to at least T."""
    if len(ds) == 0:
        raise EmptyDataset("anomaly check needs a non-empty dataset")
    if p.K > len(ds):
        raise BadParams(f"K={p.K} exceeds dataset size {len(ds)}")
    return Anomaly.PROCESSED if top_k_similarity_sum(v, ds, p.K) >= p.T else Anomaly.NOT_PROCESSED


def nearest_neighbors(sims: np.ndarray, ids, K: int) -> list[int]:
    """Positions of the K highest similarities; ties go to the lowest sample id."""
    sims = np.round(sims, RANK_DECIMALS)
    order = sorted(range(len(sims)), key=lambda i: (-sims[i], ids[i]))
    return order[:K]


def knn_sns(v: FeatureVector, ds: ReferenceDataset, K: int = DEFAULT_K) -> list[tuple[Sns, float]]:
    """Rank every platform in ``ds`` by K-NN vote.

    Score is the fraction of the K neighbours voting for the platform.
    Ranking keys: votes, then the platform's best similarity, then the
    lowest id among its best-similarity samples. Platforms with no vote
    follow, ordered by the same two tie-breaks.
    """
    if len(ds) == 0:
        raise EmptyDataset("K-NN needs a non-empty dataset")
    if K < 1:
        raise BadParams(f"K must be >= 1, got {K}")
    sims = np.round(ds.similarities_to(v), RANK_DECIMALS)
    ids = [s.id for s in ds.samples]
    votes: dict[Sns, int] = {}
    for i in nearest_neighbors(sims, ids, K):
        votes[ds.samples[i].sns] = votes.get(ds.samples[i].sns, 0) + 1
    best: dict[Sns, tuple[float, int]] = {}
    for i, s in enumerate(ds.samples):
        key = (-sims[i], s.id)
        if s.sns not in best or key < best[s.sns]:
            best[s.sns] = key
    k = min(K, len(ds))
    ranked = sorted(best, key=lambda c: (-votes.get(c, 0), *best[c]))
    return [(c, votes.get(c, 0) / k) for c in ranked]


def joint_label(sample: LabeledSample) -> tuple[UploadClient, SelectionMethod]:
    return sample.upload_client, sample.selection_method


def id3_train(samples, max_depth: int = id3.DEFAULT_MAX_DEPTH) -> id3.DecisionTree:
    """Train the upload-scenario tree on the joint (client, selection method) label."""
    samples = list(samples.samples if isinstance(samples, ReferenceDataset) else samples)
    if not samples:
        raise EmptySamples("cannot train on zero samples")
    X = np.vstack([s.vector.to_array() for s in samples])
    return id3.fit(X, [joint_label(s) for s in samples], classes=list(ALL_SCENARIOS),
                   max_depth=max_depth)


def id3_predict(tree: id3.DecisionTree, v: FeatureVector) -> tuple[UploadClient, SelectionMethod]:
    return tree.predict(v.to_array())


def consistency_test(sns, v: FeatureVector, profiles: ProfileSet | None = None) -> Consistency:
    """Fail when a size-conditional platform is predicted for an image below its threshold.

    Such a platform leaves smaller images untouched, so it cannot have left
    its fingerprint on them.
    """
    profiles = default_profiles() if profiles is None else profiles
    profile = profiles[sns]
    if profile.conditional_on_size and max(v.w, v.h) < profile.resize_threshold:
        return Consistency.FAIL
    return Consistency.PASS


@dataclass
class ClassificationReport:
    filename: str
    anomaly: Anomaly
    sns_prediction: Sns | str | None = None
    sns_ranking: list[tuple[Sns, float]] = field(default_factory=list)
    upload_client: UploadClient | None = None
    selection_method: SelectionMethod | None = None
    filename_evidence: list[FilenameMatch] = field(default_factory=list)
    camera_model: str | None = None
    consistency_trace: list[tuple[Sns, Consistency]] = field(default_factory=list)
    similarity_sum: float | None = None

    @property
    def not_sure(self) -> bool:
        return self.sns_prediction == NOT_SURE

    def to_dict(self) -> dict:
        def val(x):
            return None if x is None else getattr(x, "value", x)
        return {
            "filename": self.filename,
            "anomaly": self.anomaly.value,
            "sns_prediction": val(self.sns_prediction),
            "sns_ranking": [[s.value, score] for s, score in self.sns_ranking],
            "upload_client": val(self.upload_client),
            "selection_method": val(self.selection_method),
            "filename_evidence": [m.to_dict() for m in self.filename_evidence],
            "camera_model": self.camera_model,
            "consistency_trace": [[s.value, c.value] for s, c in self.consistency_trace],
            "similarity_sum": self.similarity_sum,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassificationReport":
        pred = d.get("sns_prediction")
        return cls(
            filename=d["filename"],
            anomaly=Anomaly(d["anomaly"]),
            sns_prediction=None if pred is None else (NOT_SURE if pred == NOT_SURE else Sns(pred)),
            sns_ranking=[(Sns(s), float(score)) for s, score in d.get("sns_ranking", [])],
            upload_client=UploadClient(d["upload_client"]) if d.get("upload_client") else None,
            selection_method=SelectionMethod(d["selection_method"]) if d.get("selection_method") else None,
            filename_evidence=[FilenameMatch.from_dict(m) for m in d.get("filename_evidence", [])],
            camera_model=d.get("camera_model"),
            consistency_trace=[(Sns(s), Consistency(c)) for s, c in d.get("consistency_trace", [])],
            similarity_sum=d.get("similarity_sum"),
        )

    def render(self) -> str:
        lines = [f"{self.filename}:"]
        if self.anomaly is Anomaly.NOT_PROCESSED:
            lines.append("  verdict: not processed by any known platform")
        else:
            pred = "Not Sure" if self.not_sure else str(self.sns_prediction)
            lines.append(f"  platform: {pred}")
            lines.append(f"  upload client: {self.upload_client}  selection: {self.selection_method}")
            ranking = ", ".join(f"{s}={score:.2f}" for s, score in self.sns_ranking)
            lines.append(f"  ranking: {ranking}")
        if self.similarity_sum is not None:
            lines.append(f"  top-K similarity sum: {self.similarity_sum:.6f}")
        for m in self.filename_evidence:
            extra = ", ".join(f"{k}={v}" for k, v in m.to_dict().items()
                              if v is not None and k not in ("sns", "specificity"))
            lines.append(f"  filename evidence: {m.sns} ({m.specificity.value})"
                         + (f" {extra}" if extra else ""))
        if self.camera_model:
            lines.append(f"  camera model: {self.camera_model}")
        return "\n".join(lines)


def resolve_ranking(ranking, v: FeatureVector, profiles: ProfileSet):
    """Walk the ranking until a platform passes the consistency test.

    Returns (prediction or NOT_SURE, trace). A platform that already failed
    counts as a stall.
    """
    failed: set[Sns] = set()
    trace = []
    for sns, _ in ranking:
        if sns in failed:
            break
        verdict = consistency_test(sns, v, profiles)
        trace.append((sns, verdict))
        if verdict is Consistency.PASS:
            return sns, trace
        failed.add(sns)
    return NOT_SURE, trace


def classify(identity: FileIdentity, v: FeatureVector, ds: ReferenceDataset, tree: id3.DecisionTree,
             p: AnomalyParams = AnomalyParams(), profiles: ProfileSet | None = None,
             exif: ExifMap | None = None) -> ClassificationReport:
    profiles = default_profiles() if profiles is None else profiles
    report = ClassificationReport(
        filename=identity.filename,
        anomaly=Anomaly.NOT_PROCESSED,
        filename_evidence=match_filename(identity.filename, profiles),
        camera_model=unique_camera_model(exif) if exif is not None else None,
    )
    report.anomaly = anomaly_check(v, ds, p)
    report.similarity_sum = top_k_similarity_sum(v, ds, p.K)
    if report.anomaly is Anomaly.NOT_PROCESSED:
        return report
    report.sns_ranking = knn_sns(v, ds, p.K)
    report.upload_client, report.selection_method = id3_predict(tree, v)
    report.sns_prediction, report.consistency_trace = resolve_ranking(report.sns_ranking, v, profiles)
    return report


@dataclass
class Engine:
    """A reference dataset plus its trained tree, ready to classify files."""

    dataset: ReferenceDataset
    params: AnomalyParams = field(default_factory=AnomalyParams)
    profiles: ProfileSet = field(default_factory=default_profiles)
    tree: id3.DecisionTree | None = None

    def __post_init__(self):
        if self.tree is None:
            self.tree = id3_train(self.dataset.samples)

    def classify_vector(self, v: FeatureVector, filename: str = "<vector>", exif=None):
        return classify(FileIdentity(filename, 0), v, self.dataset, self.tree, self.params,
                        self.profiles, exif)

    def classify_file(self, path) -> ClassificationReport:
        identity, vector, exif = featurize_file(path)
        return classify(identity, vector, self.dataset, self.tree, self.params, self.profiles, exif)
