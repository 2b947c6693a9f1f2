"""
Measuring accuracy with cross-validation
========================================

Five-fold stratified cross-validation over a simulated corpus, followed by a
look at how the anomaly threshold T trades false alarms for misses.
"""
import tempfile
import time
from pathlib import Path

import numpy as np

from ballistics import AnomalyParams, cross_validate, ingest
from ballistics.evaluate import anomaly_error
from ballistics.features import analyze_bytes
from ballistics.simulator import generate_corpus, make_camera_jpeg, write_camera_sources

work = Path(tempfile.mkdtemp(prefix="ballistics-cv-"))
start = time.perf_counter()
sources = write_camera_sources(work / "sources", 5, seed=10)
manifest, _ = generate_corpus(sources, work / "corpus", seed=10)
dataset, _ = ingest(manifest)
metrics = cross_validate(dataset, folds=5, p=AnomalyParams(3, 2.90), seed=0)
print(metrics.render())
print(f"\n(corpus + evaluation in {time.perf_counter() - start:.1f} s)\n")

# Anomaly threshold sweep. Processed queries come from a separate corpus;
# pristine ones are camera originals of assorted shapes. Raw pixel sizes
# dominate the cosine, so originals shaped like the reference images score
# as "processed": the gate is only as good as the geometry spread.
held_out = write_camera_sources(work / "held", 2, seed=77)
held_manifest, held_rows = generate_corpus(held_out, work / "held-corpus", seed=77)
processed = [analyze_bytes((work / "held-corpus" / r.filename).read_bytes())[2] for r in held_rows]
shapes = [(2200, 1650), (1650, 2200), (3000, 1000), (1000, 3000), (4000, 3000), (800, 800)]
pristine = [analyze_bytes(make_camera_jpeg(w, h, seed=i))[2] for i, (w, h) in enumerate(shapes)]
for T in np.linspace(2.5, 3.0, 11):
    err = anomaly_error(dataset, processed, pristine, AnomalyParams(3, float(T)))
    print(f"T={T:.2f}  anomaly error {100 * err:5.1f}%")
