"""Command-line front end.

    ballistics extract IMG...                      print the 44 features per file
    ballistics index MANIFEST --out INDEX          featurize a labeled manifest
    ballistics classify IMG... --index INDEX       full classification report
    ballistics evaluate --index INDEX              stratified cross-validation
    ballistics simulate SRC... --out DIR           emulate platform uploads

Exit codes: 0 ok, 1 data error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from .classify import DEFAULT_K, DEFAULT_T, AnomalyParams, Engine
from .errors import BadParams, BallisticsError
from .evaluate import cross_validate
from .features import FEATURE_NAMES, featurize_file
from .filenames import match_filename
from .exif import unique_camera_model
from .labels import UploadClient
from .profiles import ProfileSet, load_profiles
from .store import ingest, load_index, save_index

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("ballistics")


@dataclass(frozen=True)
class CliConfig:
    index_path: Path | None
    profile_path: Path | None
    K: int = DEFAULT_K
    T: float = DEFAULT_T
    folds: int = 5
    seed: int = 0
    output_format: str = "human"

    def __post_init__(self):
        AnomalyParams(self.K, self.T)
        if self.folds < 2:
            raise BadParams(f"folds must be >= 2, got {self.folds}")

    @property
    def params(self) -> AnomalyParams:
        return AnomalyParams(self.K, self.T)

    @property
    def structured(self) -> bool:
        return self.output_format == "structured"

    def profiles(self) -> ProfileSet:
        return load_profiles(self.profile_path)

    def require_index(self) -> Path:
        if self.index_path is None:
            raise BadParams("--index is required for this command")
        return self.index_path


def _err(msg: str) -> None:
    print(f"ballistics: {msg}", file=sys.stderr)


def cmd_extract(args, cfg: CliConfig) -> int:
    profiles = cfg.profiles()
    status = EXIT_OK
    if not cfg.structured:
        print("# filename," + ",".join(FEATURE_NAMES))
    for path in args.images:
        try:
            identity, vector, exif = featurize_file(path)
        except (OSError, BallisticsError) as exc:
            _err(f"{path}: {exc}")
            status = EXIT_DATA
            continue
        evidence = match_filename(identity.filename, profiles)
        model = unique_camera_model(exif)
        if cfg.structured:
            print(json.dumps({
                "filename": identity.filename,
                "byte_size": identity.byte_size,
                "features": dict(zip(FEATURE_NAMES, vector.flatten())),
                "filename_evidence": [m.to_dict() for m in evidence],
                "camera_model": model,
            }, sort_keys=True))
            continue
        print(identity.filename + "," + ",".join(str(x) for x in vector.flatten()))
        for m in evidence:
            print(f"  filename evidence: {m.sns.value} ({m.specificity.value})"
                  + (f" id={m.image_id}" if m.image_id else ""))
        if model:
            print(f"  camera model: {model}")
    return status


def cmd_index(args, cfg: CliConfig) -> int:
    ds, errors = ingest(args.manifest, args.image_root)
    for name, msg in errors:
        _err(f"{name}: {msg}")
    save_index(ds, args.out)
    counts = ", ".join(f"{k.value}={v}" for k, v in sorted(ds.class_counts().items(), key=lambda kv: kv[0].value))
    print(f"N={len(ds)} ({counts}) -> {args.out}")
    return EXIT_DATA if errors else EXIT_OK


def cmd_classify(args, cfg: CliConfig) -> int:
    engine = Engine(load_index(cfg.require_index()), cfg.params, cfg.profiles())
    status = EXIT_OK
    for path in args.images:
        try:
            report = engine.classify_file(path)
        except (OSError, BallisticsError) as exc:
            _err(f"{path}: {exc}")
            status = EXIT_DATA
            continue
        print(json.dumps(report.to_dict(), sort_keys=True) if cfg.structured else report.render())
    return status


def cmd_evaluate(args, cfg: CliConfig) -> int:
    ds = load_index(cfg.require_index())
    metrics = cross_validate(ds, cfg.folds, cfg.params, cfg.seed, cfg.profiles())
    print(metrics.to_json() if cfg.structured else metrics.render())
    if args.out:
        Path(args.out).write_text(metrics.to_json() + "\n")
    return EXIT_OK


def cmd_simulate(args, cfg: CliConfig) -> int:
    # imported lazily: the simulator pulls in the image codec
    from .simulator import generate_corpus, write_camera_sources

    sources = [Path(s) for s in args.sources]
    if args.synthetic:
        sources += write_camera_sources(Path(args.out) / "_sources", args.synthetic, seed=cfg.seed)
    if not sources:
        raise BadParams("give source images or --synthetic N")
    for s in sources:
        if not s.is_file():
            _err(f"{s}: no such file")
            return EXIT_DATA
    clients = [UploadClient(c) for c in args.clients] if args.clients else None
    manifest, rows = generate_corpus(sources, args.out, cfg.profiles(), clients, cfg.seed, args.workers)
    print(f"{len(rows)} files -> {manifest}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--index", type=Path, help="reference index file (TSV)")
    common.add_argument("--profiles", type=Path, help="platform profile file (JSON); default: bundled")
    common.add_argument("--k", type=int, default=DEFAULT_K, help=f"neighbours K (default {DEFAULT_K})")
    common.add_argument("--t", type=float, default=DEFAULT_T, help=f"anomaly threshold T (default {DEFAULT_T})")
    common.add_argument("--folds", type=int, default=5, help="cross-validation folds (default 5)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["human", "structured"], default="human",
                        help="structured = one JSON document per line")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="ballistics", description="Platform provenance of shared JPEG images.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", parents=[common], help="print feature vectors")
    p.add_argument("images", nargs="+")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("index", parents=[common], help="build a reference index from a manifest")
    p.add_argument("manifest", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--image-root", type=Path, help="base for relative paths (default: manifest dir)")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("classify", parents=[common], help="classify images against an index")
    p.add_argument("images", nargs="+")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", parents=[common], help="cross-validate an index")
    p.add_argument("--out", type=Path, help="also write the metrics bundle (JSON) here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("simulate", parents=[common], help="generate a labeled corpus")
    p.add_argument("sources", nargs="*")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--clients", nargs="+", choices=[c.value for c in UploadClient])
    p.add_argument("--synthetic", type=int, default=0, metavar="N",
                   help="also synthesize N camera originals as sources")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = CliConfig(args.index, args.profiles, args.k, args.t, args.folds, args.seed, args.format)
    except BadParams as exc:
        ap.error(str(exc))
    try:
        return args.func(args, cfg)
    except BadParams as exc:
        _err(str(exc))
        return EXIT_USAGE
    except (OSError, BallisticsError) as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
