import json
import subprocess
import sys

import pytest

from ballistics.classify import ClassificationReport
from ballistics.cli import main
from ballistics.labels import Sns, UploadClient
from ballistics.simulator import make_camera_jpeg

from conftest import encode


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert main(["simulate", "--synthetic", "3", "--out", str(root / "corpus"),
                 "--clients", "Browser", "AndroidApp", "--seed", "1"]) == 0
    assert main(["index", str(root / "corpus" / "manifest.tsv"), "--out", str(root / "index.tsv")]) == 0
    return root


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_extract_quality50(tmp_path, capsys):
    p = tmp_path / "q50.jpg"
    p.write_bytes(encode((640, 480), quality=50))
    code, out, _ = run(capsys, "extract", p)
    assert code == 0
    assert "q50.jpg,640,480,0,11,16," in out


def test_extract_structured_and_evidence(tmp_path, capsys):
    p = tmp_path / "CdqCPQ-WAAAzrHI.jpg"
    p.write_bytes(make_camera_jpeg(64, 48, unique_model=True))
    code, out, _ = run(capsys, "extract", "--format", "structured", p)
    doc = json.loads(out)
    assert code == 0
    assert doc["features"]["l0"] >= 1 and doc["camera_model"] == "Canon Eos 650D"
    assert doc["filename_evidence"][0]["lookup_url"] == "https://pbs.twimg.com/media/CdqCPQ-WAAAzrHI"


def test_extract_unreadable(tmp_path, capsys):
    bad = tmp_path / "broken.jpg"
    bad.write_bytes(b"nope")
    code, _, err = run(capsys, "extract", bad)
    assert code == 1 and "broken.jpg" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["extract"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["evaluate", "--index", "x", "--k", "0"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["evaluate", "--index", "x", "--folds", "1"])
    assert e.value.code == 2
    capsys.readouterr()


def test_classify_requires_index(tmp_path, capsys):
    code, _, err = run(capsys, "classify", tmp_path / "a.jpg")
    assert code == 2 and "--index" in err


def test_index_summary_and_determinism(workspace, tmp_path, capsys):
    code, out, _ = run(capsys, "index", workspace / "corpus" / "manifest.tsv", "--out", tmp_path / "again.tsv")
    assert code == 0 and out.startswith("N=")
    assert (tmp_path / "again.tsv").read_bytes() == (workspace / "index.tsv").read_bytes()


def test_index_empty_manifest(tmp_path, capsys):
    (tmp_path / "m.tsv").write_text("filename\tsns\tupload_client\tselection_method\n")
    code, _, err = run(capsys, "index", tmp_path / "m.tsv", "--out", tmp_path / "i.tsv")
    assert code == 1 and "EmptyDataset" in err


def test_classify_simulated_facebook_android(workspace, capsys):
    from ballistics.store import read_manifest
    rows = read_manifest(workspace / "corpus" / "manifest.tsv")
    row = next(r for r in rows if r.sns is Sns.FACEBOOK and r.upload_client is UploadClient.ANDROID_APP)
    code, out, _ = run(capsys, "classify", "--index", workspace / "index.tsv", "--format", "structured",
                       workspace / "corpus" / row.filename)
    rep = ClassificationReport.from_dict(json.loads(out))
    assert code == 0
    assert rep.sns_prediction is Sns.FACEBOOK and rep.upload_client is UploadClient.ANDROID_APP
    assert rep.selection_method is row.selection_method
    # structured output recovers every field
    assert ClassificationReport.from_dict(rep.to_dict()) == rep


def test_classify_pristine_camera_original(workspace, tmp_path, capsys):
    # a portrait original shares no geometry with the landscape reference corpus
    p = tmp_path / "IMG_2641.jpg"
    p.write_bytes(make_camera_jpeg(900, 2700, seed=8))
    code, out, _ = run(capsys, "classify", "--index", workspace / "index.tsv", p)
    assert code == 0 and "not processed" in out


def test_classify_partial_failure(workspace, tmp_path, capsys):
    (tmp_path / "bad.jpg").write_bytes(b"\xff\xd8")
    code, out, err = run(capsys, "classify", "--index", workspace / "index.tsv", tmp_path / "bad.jpg")
    assert code == 1 and "bad.jpg" in err


def test_evaluate(workspace, tmp_path, capsys):
    code, out, _ = run(capsys, "evaluate", "--index", workspace / "index.tsv", "--folds", "3",
                       "--out", tmp_path / "m.json")
    assert code == 0
    assert "SNS accuracy:              100.00%" in out
    code2, out2, _ = run(capsys, "evaluate", "--index", workspace / "index.tsv", "--folds", "3")
    assert out == out2
    assert json.loads((tmp_path / "m.json").read_text())["sns_accuracy"] == 1.0


def test_evaluate_too_few(workspace, capsys):
    code, _, err = run(capsys, "evaluate", "--index", workspace / "index.tsv", "--folds", "9")
    assert code == 1 and "TooFewSamples" in err


def test_simulate_missing_source(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", tmp_path / "gone.jpg", "--out", tmp_path / "o")
    assert code == 1 and "gone.jpg" in err


def test_simulate_three_sources_browser(tmp_path, capsys):
    from ballistics.simulator import write_camera_sources
    srcs = write_camera_sources(tmp_path / "s", 3, width=100, height=75)
    code, out, _ = run(capsys, "simulate", *srcs, "--out", tmp_path / "o", "--clients", "Browser")
    assert code == 0 and out.startswith("30 files")


def test_console_entry_point(q50_rgb, tmp_path):
    p = tmp_path / "a.jpg"
    p.write_bytes(q50_rgb)
    r = subprocess.run([sys.executable, "-m", "ballistics.cli", "extract", str(p)], capture_output=True, text=True)
    assert r.returncode == 0 and "a.jpg,16,16,0,11,16," in r.stdout
