import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ballistics.classify import AnomalyParams
from ballistics.errors import BadParams, TooFewSamples
from ballistics.evaluate import (
    Metrics, anomaly_error, best_anomaly_params, cross_validate, stratified_folds,
)
from ballistics.features import FeatureVector
from ballistics.labels import scenarios_for
from ballistics.profiles import default_profiles
from ballistics.store import LabeledSample, ReferenceDataset

P = default_profiles()


def separable(n_per_cell=5):
    """Vectors whose luminance identifies the platform and chroma the scenario."""
    samples = []
    for pi, profile in enumerate(P):
        scen = [sc for c in profile.clients for sc in scenarios_for(c)]
        for si, (client, method) in enumerate(scen):
            for j in range(n_per_cell):
                v = FeatureVector(2048, 1536, j, 11, tuple([3 + 7 * pi] * 32), tuple([2 + 5 * si] * 8))
                samples.append(LabeledSample(len(samples), v, profile.sns, client, method))
    return ReferenceDataset(samples)


def test_separable_corpus_is_perfect():
    m = cross_validate(separable(), folds=5, seed=0, profiles=P)
    assert m.sns_accuracy == 1.0 and m.scenario_accuracy == 1.0
    assert m.client_accuracy == 1.0 and m.selection_accuracy == 1.0
    assert m.processed_rate == 1.0 and m.not_sure_rate == 0.0
    # mean counts per fold add back up to the sample count
    assert m.sns_confusion.values.sum() * m.folds == pytest.approx(m.n_samples)
    assert len(m.fold_sns_accuracy) == 5


def test_deterministic_and_round_trip():
    a = cross_validate(separable(), folds=3, seed=4, profiles=P)
    b = cross_validate(separable(), folds=3, seed=4, profiles=P)
    assert a.to_json() == b.to_json()
    back = Metrics.from_dict(a.to_dict())
    assert back.to_json() == a.to_json()
    assert "SNS accuracy" in a.render()


def test_too_few_samples():
    with pytest.raises(TooFewSamples):
        cross_validate(separable(1), folds=2, profiles=P)


def test_bad_folds():
    with pytest.raises(BadParams):
        cross_validate(separable(), folds=1, profiles=P)


def test_not_processed_counts_as_error():
    ds = separable()
    # T = K: only exact duplicates pass, and the exif count differs across copies
    m = cross_validate(ds, folds=5, p=AnomalyParams(3, 3.0), profiles=P)
    assert m.processed_rate < 1.0
    assert m.sns_accuracy <= m.processed_rate


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=4, max_size=80), st.integers(2, 6), st.integers(0, 100))
def test_stratified_fold_properties(labels, folds, seed):
    parts = stratified_folds(labels, folds, seed)
    flat = np.concatenate(parts)
    assert sorted(flat.tolist()) == list(range(len(labels)))
    sizes = [len(p) for p in parts]
    assert max(sizes) - min(sizes) <= 1
    for lab in set(labels):
        per = [sum(labels[i] == lab for i in p) for p in parts]
        assert max(per) - min(per) <= 1
    assert [p.tolist() for p in parts] == [p.tolist() for p in stratified_folds(labels, folds, seed)]


def test_anomaly_error_and_grid():
    ds = separable(3)
    processed = [s.vector for s in ds.samples[:10]]
    pristine = [FeatureVector(4000, 3000, 30, 12, (2,) * 32, (3,) * 8)]
    assert anomaly_error(ds, processed, pristine, AnomalyParams(3, 2.9)) == pytest.approx(1 / 11)
    err, params = best_anomaly_params(ds, processed, pristine)
    assert err == 0.0
    assert anomaly_error(ds, processed, pristine, params) == 0.0
