"""Emulation of platform upload pipelines.

An upload goes through two stages. Native apps first re-encode the picture
on the device (the client fingerprint). The platform then resizes and
recompresses it according to its profile, applies its EXIF policy and
renames the file.
"""
from __future__ import annotations

import datetime as dt
import io
import logging
import random
import re
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from PIL import Image

from ..errors import BallisticsError, DecodeError
from ..exif import RawEntry, empty_exif, parse_exif
from ..jpeg import APP1, EXIF_PREAMBLE, QuantizationTable, find_exif_payload, parse_jpeg, scan_markers
from ..labels import SelectionMethod, Sns, UploadClient, check_scenario, scenario_key, scenarios_for
from ..profiles import (
    CameraExifPolicy, OtherExifPolicy, PlatformProfile, ProfileSet, Recompression, default_profiles,
)
from ..quant import to_natural
from ..store import ManifestRow, write_manifest
from .tiff import build_exif, filter_exif, make_entry

log = logging.getLogger(__name__)

# Tags that identify the capturing device ("camera data"); everything else is "other data".
CAMERA_TAGS = {
    "Image": {0x010F, 0x0110, 0xC614, 0xC615, 0xC62F},
    "Photo": {0x927C, 0xA430, 0xA431, 0xA432, 0xA433, 0xA434, 0xA435},
}


def is_camera_entry(e: RawEntry) -> bool:
    return e.tag in CAMERA_TAGS.get(e.group, ())


@dataclass(frozen=True)
class SimulationJob:
    source: Path | bytes
    profile: PlatformProfile
    upload_client: UploadClient = UploadClient.BROWSER
    selection_method: SelectionMethod = SelectionMethod.NOT_APPLICABLE
    seed: int = 0
    source_name: str | None = None

    def __post_init__(self):
        check_scenario(self.upload_client, self.selection_method)
        if self.upload_client not in self.profile.clients:
            raise ValueError(f"{self.profile.sns} has no {self.upload_client} client")

    def read_source(self) -> bytes:
        if isinstance(self.source, (bytes, bytearray)):
            return bytes(self.source)
        return Path(self.source).read_bytes()

    @property
    def name(self) -> str:
        if self.source_name:
            return self.source_name
        return Path(self.source).name if not isinstance(self.source, (bytes, bytearray)) else "IMG_0001.jpg"


@dataclass
class SimulationResult:
    data: bytes
    filename: str
    sns: Sns
    upload_client: UploadClient
    selection_method: SelectionMethod
    steps: list[str] = field(default_factory=list)

    def manifest_row(self, relpath: str) -> ManifestRow:
        return ManifestRow(relpath, self.sns, self.upload_client, self.selection_method)


@lru_cache(maxsize=32)
def _decode(data: bytes) -> Image.Image:
    try:
        im = Image.open(io.BytesIO(data))
        im = im.convert("RGB")
    except (OSError, ValueError, Image.DecompressionBombError) as exc:
        raise DecodeError(f"cannot decode source image: {exc}") from exc
    return im


def encode(im: Image.Image, tables: tuple[QuantizationTable, QuantizationTable],
           exif_payload: bytes | None) -> bytes:
    """Baseline JPEG with exactly the given (zigzag-order) tables."""
    lum, chroma = tables
    buf = io.BytesIO()
    kwargs = {}
    if exif_payload:
        kwargs["exif"] = exif_payload
    im.save(buf, "JPEG", qtables=[to_natural(lum.coefficients), to_natural(chroma.coefficients)],
            subsampling=2, optimize=False, **kwargs)
    return buf.getvalue()


def replace_exif_segment(data: bytes, payload: bytes | None) -> bytes:
    """Swap (or drop, or insert) the APP1 Exif segment without touching scan data."""
    segments = scan_markers(data)
    new = b""
    if payload:
        new = b"\xff\xe1" + (len(payload) + 2).to_bytes(2, "big") + payload
    for seg in segments:
        if seg.marker_code == APP1 and seg.payload.startswith(EXIF_PREAMBLE):
            end = seg.offset + 2 + seg.length
            return data[:seg.offset] + new + data[end:]
    if not new:
        return data
    # insert after SOI and any APP0
    pos = 2
    for seg in segments[1:]:
        if seg.marker_code != 0xE0:
            break
        pos = seg.offset + 2 + seg.length
    return data[:pos] + new + data[pos:]


def _app_capture_exif(width: int, height: int, client: UploadClient, rng: random.Random) -> bytes:
    stamp = dt.datetime(2016, 1, 1) + dt.timedelta(seconds=rng.randrange(366 * 86400))
    when = stamp.strftime("%Y:%m:%d %H:%M:%S")
    entries = [
        make_entry("Image", 0x0112, 1),
        make_entry("Image", 0x0131, f"{client.value} camera"),
        make_entry("Image", 0x0132, when),
        make_entry("Photo", 0x9003, when),
        make_entry("Photo", 0xA001, 1),
        make_entry("Photo", 0xA002, width),
        make_entry("Photo", 0xA003, height),
    ]
    return build_exif(entries)


@lru_cache(maxsize=16)
def _prestage(source: bytes, client: UploadClient, method: SelectionMethod,
              tables: tuple[QuantizationTable, QuantizationTable], seed: int) -> bytes:
    """Client-side re-encode done by a native app before upload."""
    structure = parse_jpeg(source)
    if method is SelectionMethod.EMBEDDED_CAMERA:
        # captured inside the app: the app writes its own minimal metadata
        payload = _app_capture_exif(structure.width, structure.height, client, random.Random(seed))
    else:
        exif = parse_exif(structure.exif_payload) if structure.exif_payload else empty_exif()
        # gallery picks keep metadata except location
        payload = filter_exif(exif, lambda e: e.group != "GPSInfo")
    return encode(_decode(source), tables, payload)


def _platform_exif(data: bytes, profile: PlatformProfile) -> bytes | None:
    payload = find_exif_payload(scan_markers(data))
    if payload is None:
        return None
    keep_camera = profile.exif_camera_policy is CameraExifPolicy.MAINTAIN
    keep_other = profile.exif_other_policy is OtherExifPolicy.MAINTAIN_OR_EDIT
    if keep_camera and keep_other:
        return payload
    if not keep_camera and not keep_other:
        return None
    exif = parse_exif(payload)
    return filter_exif(exif, lambda e: keep_camera if is_camera_entry(e) else keep_other)


def resized_dimensions(width: int, height: int, threshold: int) -> tuple[int, int]:
    """Scale so the longest side equals ``threshold``, keeping the aspect ratio."""
    if width >= height:
        return threshold, max(1, round(height * threshold / width))
    return max(1, round(width * threshold / height)), threshold


def platform_decisions(profile: PlatformProfile, width: int, height: int, byte_size: int):
    """(resize, recompress) flags for an upload of the given geometry and size."""
    longest = max(width, height)
    over = profile.resize_threshold is not None and longest > profile.resize_threshold
    rc = profile.recompression
    if rc is Recompression.ALWAYS:
        recompress = True
    elif rc is Recompression.CONDITIONAL_ON_BYTE_SIZE:
        recompress = byte_size > profile.byte_size_threshold
    else:
        recompress = over
    return over, recompress or over


_TOKEN = re.compile(r"\{(digits|hex|alnum|websafe|lower|date)(?::(\d+))?\}")
_ALPHABETS = {
    "digits": "0123456789",
    "hex": "0123456789abcdef",
    "alnum": "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz",
    "websafe": "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz-_",
    "lower": "0123456789abcdefghijklmnopqrstuvwxyz",
}


def render_name(template: str, rng: random.Random) -> str:
    """Expand a rename template such as ``{digits:8}_{hex:10}_h.jpg``."""
    def sub(m):
        kind, n = m.group(1), int(m.group(2) or 1)
        if kind == "date":
            day = dt.date(2015, 1, 1) + dt.timedelta(days=rng.randrange(730))
            return day.strftime("%Y%m%d")
        alphabet = _ALPHABETS[kind]
        token = "".join(rng.choice(alphabet) for _ in range(n))
        if kind == "digits" and token[0] == "0":
            token = rng.choice("123456789") + token[1:]
        if kind == "lower" and not (any(c.isdigit() for c in token) and any(c.isalpha() for c in token)):
            token = rng.choice("0123456789") + token[1:-1] + rng.choice("abcdefghijklmnopqrstuvwxyz")
        return token
    return _TOKEN.sub(sub, template)


def simulate_upload(job: SimulationJob, profiles: ProfileSet | None = None) -> SimulationResult:
    profiles = default_profiles() if profiles is None else profiles
    profile = job.profile
    rng = random.Random(f"{job.seed}:{profile.sns.value}:{scenario_key(job.upload_client, job.selection_method)}")
    source = job.read_source()
    try:
        parse_jpeg(source)
    except BallisticsError as exc:
        raise DecodeError(f"source is not a usable JPEG: {exc}") from exc
    steps = []
    data = source
    if job.upload_client is not UploadClient.BROWSER:
        key = scenario_key(job.upload_client, job.selection_method)
        data = _prestage(source, job.upload_client, job.selection_method, profiles.app_prestage[key],
                         zlib.crc32(source))
        steps.append(f"app re-encode ({key})")

    structure = parse_jpeg(data)
    resize, recompress = platform_decisions(profile, structure.width, structure.height, len(data))
    exif_payload = _platform_exif(data, profile)
    if recompress:
        im = _decode(data)
        if resize:
            size = resized_dimensions(structure.width, structure.height, profile.resize_threshold)
            im = im.resize(size, Image.Resampling.BILINEAR)
            steps.append(f"resize to {size[0]}x{size[1]}")
        data = encode(im, profile.platform_dqt(job.upload_client, job.selection_method), exif_payload)
        steps.append("recompress with platform tables")
    else:
        data = replace_exif_segment(data, exif_payload)
        steps.append("pass-through")
    steps.append("exif kept" if exif_payload else "exif removed")

    if profile.rename is None:
        filename = job.name
    else:
        filename = render_name(profile.rename.template, rng)
    return SimulationResult(data, filename, profile.sns, job.upload_client, job.selection_method, steps)


def _slug(client: UploadClient, method: SelectionMethod) -> str:
    return scenario_key(client, method).replace("/", "-")


def corpus_jobs(sources, profiles: ProfileSet, clients=None, seed: int = 0) -> list[SimulationJob]:
    """Cross product of sources x platforms x applicable client scenarios, in a fixed order."""
    clients = list(clients) if clients is not None else list(UploadClient)
    jobs = []
    n = 0
    for src in sources:
        for profile in profiles:
            for client in clients:
                if client not in profile.clients:
                    continue
                for c, m in scenarios_for(client):
                    jobs.append(SimulationJob(Path(src), profile, c, m, seed=seed * 1_000_003 + n))
                    n += 1
    return jobs


def generate_corpus(sources, out_dir, profiles: ProfileSet | None = None, clients=None, seed: int = 0,
                    workers: int = 1) -> tuple[Path, list[ManifestRow]]:
    """Simulate every job, write the images under ``out_dir`` and a ``manifest.tsv``.

    Returns the manifest path and its rows. Output is deterministic for a
    fixed seed regardless of ``workers``.
    """
    profiles = default_profiles() if profiles is None else profiles
    sources = [Path(s) for s in sources]
    if not sources:
        raise ValueError("at least one source image is required")
    for s in sources:
        if not s.is_file():
            raise FileNotFoundError(s)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = corpus_jobs(sources, profiles, clients, seed)

    def run(job):
        return simulate_upload(job, profiles)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    rows, used = [], set()
    for res in results:
        sub = Path(res.sns.value) / _slug(res.upload_client, res.selection_method)
        name = res.filename
        stem, dot, ext = name.rpartition(".")
        k = 1
        while (sub / name).as_posix() in used:
            k += 1
            name = f"{stem}-{k}.{ext}" if dot else f"{name}-{k}"
        rel = (sub / name).as_posix()
        used.add(rel)
        (out_dir / sub).mkdir(parents=True, exist_ok=True)
        (out_dir / rel).write_bytes(res.data)
        rows.append(res.manifest_row(rel))
    manifest = out_dir / "manifest.tsv"
    write_manifest(rows, manifest)
    log.info("wrote %d simulated uploads to %s", len(rows), out_dir)
    return manifest, rows
