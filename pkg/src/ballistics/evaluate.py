"""Stratified K-fold cross-validation of the full classification pipeline."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .classify import Anomaly, AnomalyParams, anomaly_check, classify, id3_train
from .errors import BadParams, TooFewSamples
from .features import FileIdentity
from .labels import ALL_SCENARIOS, NOT_SURE, Sns, UploadClient, scenario_key
from .profiles import ProfileSet, default_profiles
from .store import ReferenceDataset

NOT_PROCESSED = "NotProcessed"


def stratified_folds(labels, folds: int, seed: int = 0) -> list[np.ndarray]:
    """Split sample positions into ``folds`` disjoint test sets, stratified by label.

    Each class is shuffled with a seeded generator and dealt round-robin,
    continuing where the previous class stopped so fold sizes stay balanced.
    """
    labels = list(labels)
    rng = np.random.default_rng(seed)
    buckets: list[list[int]] = [[] for _ in range(folds)]
    start = 0
    for cls in sorted(set(labels), key=str):
        members = np.array([i for i, lab in enumerate(labels) if lab == cls])
        rng.shuffle(members)
        for j, idx in enumerate(members):
            buckets[(start + j) % folds].append(int(idx))
        start = (start + len(members)) % folds
    return [np.array(sorted(b), dtype=int) for b in buckets]


@dataclass
class ConfusionMatrix:
    """Rows are true labels, columns predicted labels; cells are fold-averaged counts."""

    rows: list[str]
    cols: list[str]
    values: np.ndarray

    def to_dict(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, d) -> "ConfusionMatrix":
        return cls(list(d["rows"]), list(d["cols"]), np.asarray(d["values"], dtype=np.float64))

    def render(self, title: str) -> str:
        width = max(8, *(len(c) for c in self.cols)) + 1
        head = max(len(r) for r in self.rows) + 2
        out = [title, " " * head + "".join(c.rjust(width) for c in self.cols)]
        for r, row in zip(self.rows, self.values):
            out.append(r.ljust(head) + "".join(f"{x:{width}.1f}" for x in row))
        return "\n".join(out)


@dataclass
class Metrics:
    folds: int
    seed: int
    K: int
    T: float
    n_samples: int
    sns_accuracy: float
    client_accuracy: float
    selection_accuracy: float | None
    scenario_accuracy: float
    processed_rate: float
    not_sure_rate: float
    sns_confusion: ConfusionMatrix = field(repr=False)
    scenario_confusion: ConfusionMatrix = field(repr=False)
    fold_sns_accuracy: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "folds", "seed", "K", "T", "n_samples", "sns_accuracy", "client_accuracy",
            "selection_accuracy", "scenario_accuracy", "processed_rate", "not_sure_rate",
            "fold_sns_accuracy")}
        d["sns_confusion"] = self.sns_confusion.to_dict()
        d["scenario_confusion"] = self.scenario_confusion.to_dict()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d) -> "Metrics":
        d = dict(d)
        d["sns_confusion"] = ConfusionMatrix.from_dict(d["sns_confusion"])
        d["scenario_confusion"] = ConfusionMatrix.from_dict(d["scenario_confusion"])
        return cls(**d)

    def render(self) -> str:
        sel = "n/a" if self.selection_accuracy is None else f"{100 * self.selection_accuracy:.2f}%"
        lines = [
            f"{self.folds}-fold cross-validation, N={self.n_samples}, K={self.K}, T={self.T}, seed={self.seed}",
            f"SNS accuracy:              {100 * self.sns_accuracy:.2f}%",
            f"upload client accuracy:    {100 * self.client_accuracy:.2f}%",
            f"selection method accuracy: {sel} (native-app uploads)",
            f"upload scenario accuracy:  {100 * self.scenario_accuracy:.2f}%",
            f"processed: {100 * self.processed_rate:.2f}%  not sure: {100 * self.not_sure_rate:.2f}%",
            "",
            self.sns_confusion.render("SNS confusion matrix (mean counts per fold)"),
            "",
            self.scenario_confusion.render("Upload scenario confusion matrix (mean counts per fold)"),
        ]
        return "\n".join(lines)


def _confusion(pairs, rows, cols, folds) -> ConfusionMatrix:
    r = {x: i for i, x in enumerate(rows)}
    c = {x: i for i, x in enumerate(cols)}
    m = np.zeros((len(rows), len(cols)))
    for truth, pred in pairs:
        m[r[truth], c[pred]] += 1
    return ConfusionMatrix(rows, cols, m / folds)


def cross_validate(ds: ReferenceDataset, folds: int = 5, p: AnomalyParams = AnomalyParams(),
                   seed: int = 0, profiles: ProfileSet | None = None) -> Metrics:
    """Run the whole pipeline (anomaly gate, K-NN, tree, consistency) fold by fold.

    Folds are stratified on the joint (platform, client, selection method)
    label. A test image counts as an SNS error when it is gated out or ends as
    Not Sure. Selection-method accuracy only covers native-app uploads.
    """
    profiles = default_profiles() if profiles is None else profiles
    if folds < 2:
        raise BadParams("folds must be >= 2")
    counts = ds.class_counts()
    short = {str(k): v for k, v in counts.items() if v < folds}
    if short:
        raise TooFewSamples(f"classes with fewer than {folds} samples: {short}")

    sns_pairs, scen_pairs = [], []
    n_processed = n_not_sure = 0
    client_hits = sel_hits = sel_total = 0
    fold_acc = []
    # stratify on the full label so every (platform, scenario) cell is spread across folds
    strata = [(s.sns.value, scenario_key(*s.scenario)) for s in ds.samples]
    for test_idx in stratified_folds(strata, folds, seed):
        train_idx = np.setdiff1d(np.arange(len(ds)), test_idx)
        train = ds.subset(train_idx)
        tree = id3_train(train.samples)
        hits = 0
        for i in test_idx:
            s = ds.samples[i]
            rep = classify(FileIdentity(s.filename or f"sample-{s.id}", 0), s.vector, train, tree, p,
                           profiles)
            if rep.anomaly is Anomaly.NOT_PROCESSED:
                sns_pred = scen_pred = NOT_PROCESSED
            else:
                n_processed += 1
                n_not_sure += rep.not_sure
                sns_pred = NOT_SURE if rep.not_sure else rep.sns_prediction.value
                scen_pred = scenario_key(rep.upload_client, rep.selection_method)
            hits += sns_pred == s.sns.value
            sns_pairs.append((s.sns.value, sns_pred))
            scen_pairs.append((scenario_key(*s.scenario), scen_pred))
            client_hits += rep.upload_client is s.upload_client
            if s.upload_client is not UploadClient.BROWSER:
                sel_total += 1
                sel_hits += rep.selection_method is s.selection_method
        fold_acc.append(hits / len(test_idx))

    n = len(sns_pairs)
    sns_labels = [x.value for x in Sns if x in counts]
    scen_labels = [scenario_key(*sc) for sc in ALL_SCENARIOS
                   if any(s.scenario == sc for s in ds.samples)]
    return Metrics(
        folds=folds, seed=seed, K=p.K, T=p.T, n_samples=n,
        sns_accuracy=sum(t == q for t, q in sns_pairs) / n,
        client_accuracy=client_hits / n,
        selection_accuracy=sel_hits / sel_total if sel_total else None,
        scenario_accuracy=sum(t == q for t, q in scen_pairs) / n,
        processed_rate=n_processed / n,
        not_sure_rate=n_not_sure / n,
        sns_confusion=_confusion(sns_pairs, sns_labels, sns_labels + [NOT_SURE, NOT_PROCESSED], folds),
        scenario_confusion=_confusion(scen_pairs, scen_labels, scen_labels + [NOT_PROCESSED], folds),
        fold_sns_accuracy=fold_acc,
    )


def anomaly_error(ds: ReferenceDataset, processed, pristine, p: AnomalyParams = AnomalyParams()) -> float:
    """Error rate of the anomaly gate on held-out processed and never-uploaded vectors."""
    processed, pristine = list(processed), list(pristine)
    wrong = sum(anomaly_check(v, ds, p) is not Anomaly.PROCESSED for v in processed)
    wrong += sum(anomaly_check(v, ds, p) is not Anomaly.NOT_PROCESSED for v in pristine)
    total = len(processed) + len(pristine)
    if total == 0:
        raise TooFewSamples("no vectors to evaluate")
    return wrong / total


def best_anomaly_params(ds: ReferenceDataset, processed, pristine, ks=(1, 2, 3, 4, 5),
                        ts_per_k: int = 101):
    """Grid-search (K, T) minimizing anomaly_error; returns (error, params)."""
    best = None
    for k in ks:
        if k > len(ds):
            continue
        for t in np.linspace(0.0, k, ts_per_k):
            params = AnomalyParams(k, float(t))
            err = anomaly_error(ds, processed, pristine, params)
            if best is None or err < best[0]:
                best = (err, params)
    return best

