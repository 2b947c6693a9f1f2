"""
Classifying images against a reference set
==========================================

Build a small labeled reference set with the simulator, then run the whole
chain on a few query images: the anomaly gate, the K-NN platform ranking,
the upload-scenario tree and the consistency loop.
"""
import tempfile
from pathlib import Path

from ballistics import AnomalyParams, Engine, ingest
from ballistics.classify import id3_train
from ballistics.features import FeatureVector
from ballistics.labels import Sns
from ballistics.simulator import generate_corpus, make_camera_jpeg, write_camera_sources
from ballistics.store import LabeledSample, ReferenceDataset

work = Path(tempfile.mkdtemp(prefix="ballistics-demo-"))
sources = write_camera_sources(work / "sources", 3, seed=30)
manifest, rows = generate_corpus(sources, work / "corpus", seed=3)
dataset, _ = ingest(manifest)
print(f"reference set: {len(dataset)} images, {len(dataset.class_counts())} platforms")

engine = Engine(dataset, AnomalyParams(K=3, T=2.90))

# A fresh upload of a new photo (not in the reference set) through WhatsApp's
# Android app.
new_photo = write_camera_sources(work / "new", 1, seed=99)[0]
_, new_rows = generate_corpus([new_photo], work / "query", seed=42)
query = next(r for r in new_rows if r.sns is Sns.WHATSAPP and r.upload_client.value == "AndroidApp")
print(engine.classify_file(work / "query" / query.filename).render())
print(f"  (truth: {query.sns.value}, {query.upload_client.value}/{query.selection_method.value})\n")

# A camera original with a geometry unlike anything in the reference set is
# gated out as never processed.
portrait = work / "IMG_0042.jpg"
portrait.write_bytes(make_camera_jpeg(1200, 3000, seed=5, unique_model=True))
print(engine.classify_file(portrait).render(), "\n")

# When every ranked platform fails the consistency test the answer is
# "Not Sure": here only Tumblr and Tinypic are known, and both recompress
# only images larger than the query.
def small(lum):
    return FeatureVector(640, 480, 0, 11, (lum,) * 32, (lum,) * 8)

tiny = ReferenceDataset([LabeledSample(i, small(20 + i), sns, *dataset.samples[0].scenario)
                         for i, sns in enumerate([Sns.TUMBLR] * 3 + [Sns.TINYPIC] * 3)])
report = Engine(tiny, AnomalyParams(3, 2.5), tree=id3_train(tiny.samples)).classify_vector(small(21), "q.jpg")
print(report.render())
print("consistency trace:", [(s.value, c.value) for s, c in report.consistency_trace])
