"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]`` / ``[FAIL]`` / ``[SKIP]`` line (visible
with ``pytest -s`` or in ``test_output.txt``) and then asserts. Run directly
with ``python3 tests/test_acceptance.py``.

Criterion 9 needs the published 2720-image dataset. Point
``BALLISTICS_DATASET`` at its manifest (TSV: filename, sns, upload_client,
selection_method) or at an index file built by ``ballistics index``;
optionally ``BALLISTICS_PRISTINE`` at a directory of never-uploaded
originals for the anomaly-error figure.
"""
from __future__ import annotations

import os
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from ballistics.classify import Anomaly, AnomalyParams, Consistency, anomaly_check, classify, consistency_test, \
    id3_train, knn_sns
from ballistics.evaluate import anomaly_error, cross_validate, stratified_folds
from ballistics.features import FileIdentity, featurize_file
from ballistics.filenames import lookup_url, match_filename
from ballistics.id3 import entropy, fit
from ballistics.jpeg import count_structural_markers, extract_dimensions, extract_quant_tables, scan_markers
from ballistics.labels import NOT_SURE, Sns
from ballistics.profiles import default_profiles
from ballistics.simulator import generate_corpus, make_camera_jpeg, write_camera_sources
from ballistics.store import INDEX_COLUMNS, build_similarity_matrix, ingest, load_index

from conftest import encode, make_dataset, make_vector, oracle_dimensions, oracle_structural_count, \
    oracle_tables, vec
from test_filenames import TABLE as RENAME_TABLE
from test_id3 import check_tree
from test_knn import brute_force

P = default_profiles()


def report(capsys, n: int, ok: bool, title: str, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {title}: {detail}")


# 1 -----------------------------------------------------------------------------

def parser_fixtures() -> list[bytes]:
    return [
        encode((16, 16), quality=50),
        encode((16, 16), "L", quality=50),
        encode((640, 480), quality=75),
        encode((1, 1), quality=90),
        encode((33, 17), quality=10, seed=2),
        encode((64, 48), quality=95, subsampling=0),
        encode((40, 30), quality=80, progressive=True),
        encode((64, 48), quality=50, restart_marker_blocks=1),
        encode((64, 48), "L", quality=60, restart_marker_rows=1),
        encode((32, 32), qtables=[[i % 30 + 1 for i in range(64)], [2] * 64]),
        make_camera_jpeg(120, 90, seed=3, unique_model=True),
        make_camera_jpeg(90, 120, seed=4, gps=False),
    ]


def test_criterion_1_parser_fixtures(capsys):
    fixtures = parser_fixtures()
    start = time.perf_counter()
    failures = []
    for i, data in enumerate(fixtures):
        segs = scan_markers(data)
        lum, chroma = extract_quant_tables(segs)
        tables = oracle_tables(data)
        got = {0: list(lum.coefficients)} | ({1: list(chroma.coefficients)} if chroma else {})
        checks = {
            "dims": extract_dimensions(segs) == oracle_dimensions(data),
            "dqt": got == {k: v for k, v in tables.items() if k in (0, 1)},
            "markers": count_structural_markers(segs) == oracle_structural_count(data),
        }
        failures += [f"fixture {i} {k}" for k, ok in checks.items() if not ok]
    elapsed = time.perf_counter() - start
    ok = not failures and len(fixtures) >= 10 and elapsed < 1.0
    report(capsys, 1, ok, "parser fixtures vs segment-dump oracle",
           f"{len(fixtures)} fixtures, {len(failures)} mismatches, {elapsed:.3f} s (< 1 s)")
    assert ok, failures


# 2 -----------------------------------------------------------------------------

def test_criterion_2_cosine_oracle(capsys):
    rng = np.random.default_rng(2)
    X = rng.uniform(0, 255, size=(1000, 44))
    S = build_similarity_matrix(X)
    Xl = X.astype(np.longdouble)
    G = Xl @ Xl.T
    norms = np.sqrt(np.diag(G))
    oracle = G / np.outer(norms, norms)
    err = float(np.max(np.abs(S - oracle.astype(np.float64))))
    symmetric = bool(np.array_equal(S, S.T))
    unit_diag = bool(np.all(np.diag(S) == 1.0))
    ok = err <= 1e-9 and symmetric and unit_diag and S.min() >= 0 and S.max() <= 1
    report(capsys, 2, ok, "cosine matrix vs extended-precision oracle",
           f"max |err| = {err:.2e} (<= 1e-9), symmetric={symmetric}, unit diagonal={unit_diag}")
    assert ok


# 3 -----------------------------------------------------------------------------

def test_criterion_3_knn_oracle(capsys):
    rng = np.random.default_rng(3)
    sns = list(Sns)
    rows = [[int(x) for x in rng.integers(1, 4 if i % 2 else 200, 44)] for i in range(100)]
    labels = [sns[int(rng.integers(len(sns)))] for _ in rows]
    ds = make_dataset(list(zip(rows, labels)))
    ids = [s.id for s in ds.samples]
    agree = 0
    for k in range(200):
        q = rows[int(rng.integers(100))] if k % 4 == 0 else [int(x) for x in rng.integers(1, 4 if k % 2 else 200, 44)]
        K = int(rng.integers(1, 8))
        expected, _ = brute_force(q, rows, labels, ids, K)
        agree += [s for s, _ in knn_sns(vec(q), ds, K)] == expected
    ok = agree == 200
    report(capsys, 3, ok, "K-NN ranking vs brute force", f"{agree}/200 queries identical (100% required)")
    assert ok


# 4 -----------------------------------------------------------------------------

def test_criterion_4_id3_oracle(capsys):
    rng = np.random.default_rng(4)
    nodes = 0
    bad = []
    for trial in range(50):
        X = rng.integers(0, 5, size=(10, 6)).astype(float)
        y = [int(v) for v in rng.integers(0, 3, 10)]
        try:
            nodes += check_tree(fit(X, y, classes=[0, 1, 2]).root, X, y)
        except AssertionError as exc:
            bad.append((trial, str(exc)))
    pure = entropy(["a"] * 9)
    balanced = entropy(["a", "b"] * 5)
    ok = not bad and pure == 0 and abs(balanced - 1.0) <= 1e-12
    report(capsys, 4, ok, "ID3 splits vs exhaustive gain oracle",
           f"50 training sets, {nodes} splits checked, {len(bad)} mismatches; "
           f"H(pure)={pure}, H(balanced)={balanced:.15f}")
    assert ok, bad


# 5 -----------------------------------------------------------------------------

def test_criterion_5_anomaly_properties(capsys):
    rng = np.random.default_rng(5)
    grid = [(k, float(t)) for k in (1, 2, 3, 4, 5) for t in np.linspace(0, k, 11)]
    self_ok = far_ok = 0
    for K, T in grid:
        q = [int(x) for x in rng.integers(1, 60, 44)]
        others = [([int(x) for x in rng.integers(1, 60, 44)], "Twitter") for _ in range(5)]
        ds = make_dataset([(q, "Facebook")] * K + others)
        self_ok += anomaly_check(vec(q), ds, AnomalyParams(K, T)) is Anomaly.PROCESSED
        far = make_dataset([([0, 0, 0, 0] + [int(x) for x in rng.integers(1, 9, 40)], "Facebook")
                            for _ in range(K + 2)])
        fq = np.array([6000, 4000, 0, 0] + [1] * 40, dtype=float)
        if T > 0:   # at T = 0 no similarity can lie below T/K, so the premise is unsatisfiable
            assert far.similarities_to(fq).max() < T / K
            far_ok += anomaly_check(fq, far, AnomalyParams(K, T)) is Anomaly.NOT_PROCESSED
    mono_ok = 0
    for _ in range(100):
        n = int(rng.integers(3, 15))
        rows = [[int(x) for x in rng.integers(1, 30, 44)] for _ in range(n)]
        q = [int(x) for x in rng.integers(1, 30, 44)]
        K = int(rng.integers(1, n + 1))
        p = AnomalyParams(K, float(rng.uniform(0, K)))
        before = anomaly_check(vec(q), make_dataset([(r, "Facebook") for r in rows]), p)
        after = anomaly_check(vec(q), make_dataset([(r, "Facebook") for r in rows + [q]]), p)
        mono_ok += not (before is Anomaly.PROCESSED and after is Anomaly.NOT_PROCESSED)
    n_far = sum(1 for _, T in grid if T > 0)
    ok = self_ok == len(grid) and far_ok == n_far and mono_ok == 100
    report(capsys, 5, ok, "anomaly detector properties",
           f"self-inclusion {self_ok}/{len(grid)}, far-query {far_ok}/{n_far} (T > 0), "
           f"duplicate monotonicity {mono_ok}/100")
    assert ok


# 6 -----------------------------------------------------------------------------

def test_criterion_6_closed_loop(capsys, tmp_path):
    start = time.perf_counter()
    sources = write_camera_sources(tmp_path / "sources", 5, width=2200, height=1650, seed=60)
    manifest, rows = generate_corpus(sources, tmp_path / "corpus", P, seed=6)
    ds, errors = ingest(manifest)
    metrics = cross_validate(ds, folds=5, seed=0, profiles=P)
    elapsed = time.perf_counter() - start

    browser_lums = [p.dqt["Browser"][0].coefficients for p in P]
    disjoint = len(set(browser_lums)) == len(browser_lums)

    golden_fail = []
    for sns, name, image_id in RENAME_TABLE:
        if not any(m.sns is sns and m.image_id == image_id for m in match_filename(name, P)):
            golden_fail.append(name)
    for row in rows:
        base = row.filename.rsplit("/", 1)[-1]
        if row.sns is not Sns.GOOGLE_PLUS and not any(m.sns is row.sns for m in match_filename(base, P)):
            golden_fail.append(row.filename)
    consistency_fail = [s.filename for s in ds.samples
                        if consistency_test(s.sns, s.vector, P) is not Consistency.PASS]

    ok = (len(sources) >= 5 and disjoint and not errors and metrics.sns_accuracy >= 0.95
          and metrics.scenario_accuracy >= 0.90 and not golden_fail and not consistency_fail and elapsed < 60)
    report(capsys, 6, ok, "closed-loop simulation",
           f"{len(sources)} sources x {len(P)} platforms x 3 clients = {len(rows)} files; "
           f"SNS {100 * metrics.sns_accuracy:.2f}% (>= 95), scenario {100 * metrics.scenario_accuracy:.2f}% "
           f"(>= 90); filename failures {len(golden_fail)}, consistency failures {len(consistency_fail)}; "
           f"{elapsed:.1f} s (< 60 s)")
    assert ok


# 7 -----------------------------------------------------------------------------

def test_criterion_7_consistency_and_not_sure(capsys):
    checks = {
        "Tumblr 800x600 fails": consistency_test(Sns.TUMBLR, make_vector(800, 600), P) is Consistency.FAIL,
        "Facebook passes": all(consistency_test(Sns.FACEBOOK, make_vector(w, h), P) is Consistency.PASS
                               for w, h in [(1, 1), (800, 600), (6000, 4000)]),
        "Google+ 2048x1536 passes": consistency_test(Sns.GOOGLE_PLUS, make_vector(2048, 1536), P)
        is Consistency.PASS,
    }
    rows = [(make_vector(640, 480, lum=20 + i), "Tumblr") for i in range(3)]
    rows += [(make_vector(640, 480, lum=40 + i), "Tinypic") for i in range(3)]
    ds = make_dataset(rows)
    rep = classify(FileIdentity("q.jpg", 1), make_vector(640, 480, lum=21), ds, id3_train(ds.samples),
                   AnomalyParams(3, 2.5), P)
    checks["NotSure on Tumblr/Tinypic-only dataset"] = rep.anomaly is Anomaly.PROCESSED and rep.sns_prediction == NOT_SURE
    ok = all(checks.values())
    report(capsys, 7, ok, "consistency examples and NotSure",
           ", ".join(f"{k}: {'ok' if v else 'WRONG'}" for k, v in checks.items()))
    assert ok


# 8 -----------------------------------------------------------------------------

def test_criterion_8_table_goldens(capsys):
    matched = sum(any(m.sns is sns and m.image_id == image_id for m in match_filename(name, P))
                  for sns, name, image_id in RENAME_TABLE)
    urls = [lookup_url(Sns.TWITTER, "CdqCPQ-WAAAzrHI", P) == "https://pbs.twimg.com/media/CdqCPQ-WAAAzrHI",
            lookup_url(Sns.IMGUR, "Dw0KXG2", P) == "http://imgur.com/Dw0KXG2"]
    ok = matched == 9 and all(urls)
    report(capsys, 8, ok, "renaming-table goldens", f"{matched}/9 rows matched, {sum(urls)}/2 lookup URLs exact")
    assert ok


# 9 -----------------------------------------------------------------------------

def _load_published(path: Path):
    with open(path) as fh:
        header = fh.readline().rstrip("\n").split("\t")
    if header == INDEX_COLUMNS:
        return load_index(path)
    return ingest(path)[0]


def test_criterion_9_conditional_reproduction(capsys):
    path = os.environ.get("BALLISTICS_DATASET")
    if not path or not Path(path).exists():
        with capsys.disabled():
            print("\n[SKIP] criterion 9: published 2720-image dataset not available "
                  "(set BALLISTICS_DATASET to its manifest or index)")
        pytest.skip("published dataset unavailable")
    ds = _load_published(Path(path))
    p = AnomalyParams(3, 2.90)
    m = cross_validate(ds, folds=5, p=p, seed=0, profiles=P)
    checks = {
        "SNS": abs(100 * m.sns_accuracy - 96.0) <= 3,
        "client": abs(100 * m.client_accuracy - 97.69) <= 3,
        "selection": m.selection_accuracy is not None and abs(100 * m.selection_accuracy - 91.0) <= 4,
    }
    detail = (f"SNS {100 * m.sns_accuracy:.2f}% (96 +/- 3), client {100 * m.client_accuracy:.2f}% (97.69 +/- 3), "
              f"selection {100 * (m.selection_accuracy or 0):.2f}% (91 +/- 4)")
    pristine_dir = os.environ.get("BALLISTICS_PRISTINE")
    if pristine_dir:
        pristine = [featurize_file(f)[1] for f in sorted(Path(pristine_dir).glob("*.jp*g"))]
        # processed images are scored against folds that do not contain them
        wrong = total = 0
        for test_idx in stratified_folds([s.sns for s in ds.samples], 5, 0):
            train = ds.subset(np.setdiff1d(np.arange(len(ds)), test_idx))
            held = [ds.samples[i].vector for i in test_idx]
            wrong += round(anomaly_error(train, held, pristine, p) * (len(held) + len(pristine)))
            total += len(held) + len(pristine)
        err = wrong / total
        checks["anomaly"] = abs(100 * err - 3.37) <= 2
        detail += f", anomaly error {100 * err:.2f}% (3.37 +/- 2)"
    else:
        detail += ", anomaly error not evaluated (set BALLISTICS_PRISTINE)"
    ok = all(checks.values())
    report(capsys, 9, ok, "reproduction on the published dataset", detail)
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
