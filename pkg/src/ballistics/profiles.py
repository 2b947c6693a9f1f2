"""Per-platform processing profiles and the shared profile file loader."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from .errors import FormatError, UnknownProfile
from .jpeg import QuantizationTable
from .labels import Sns, UploadClient, SelectionMethod, scenario_key
from .quant import ijg_table


class Recompression(str, Enum):
    ALWAYS = "Always"
    CONDITIONAL_ON_M = "ConditionalOnM"
    CONDITIONAL_ON_BYTE_SIZE = "ConditionalOnByteSize"
    USER_OPTION = "UserOption"


class CameraExifPolicy(str, Enum):
    DELETE = "Delete"
    MAINTAIN = "Maintain"


class OtherExifPolicy(str, Enum):
    DELETE = "Delete"
    MAINTAIN_OR_EDIT = "MaintainOrEdit"


class Specificity(str, Enum):
    STRONG = "Strong"
    WEAK = "Weak"


@dataclass(frozen=True)
class RenameRule:
    pattern: re.Pattern
    template: str
    specificity: Specificity
    lookup: bool
    lookup_url: str | None = None
    lookup_note: str | None = None
    resolution_hints: dict[str, str] = field(default_factory=dict)


TablePair = tuple[QuantizationTable, QuantizationTable]


@dataclass(frozen=True)
class PlatformProfile:
    sns: Sns
    resize_threshold: int | None
    recompression: Recompression
    exif_camera_policy: CameraExifPolicy
    exif_other_policy: OtherExifPolicy
    dqt: dict[str, TablePair] = field(repr=False)
    byte_size_threshold: int | None = None
    resize_threshold_lq: int | None = None
    clients: tuple[UploadClient, ...] = tuple(UploadClient)
    rename: RenameRule | None = None

    def __post_init__(self):
        if self.recompression is Recompression.CONDITIONAL_ON_M and self.resize_threshold is None:
            raise ValueError(f"{self.sns}: ConditionalOnM needs a resize threshold")
        if (self.recompression is Recompression.CONDITIONAL_ON_BYTE_SIZE
                and self.byte_size_threshold is None):
            raise ValueError(f"{self.sns}: ConditionalOnByteSize needs a byte-size threshold")

    def platform_dqt(self, client: UploadClient, method: SelectionMethod) -> TablePair:
        """Table pair the platform uses when recompressing an upload from this scenario."""
        key = scenario_key(client, method)
        if key in self.dqt:
            return self.dqt[key]
        return self.dqt[UploadClient.BROWSER.value]

    @property
    def conditional_on_size(self) -> bool:
        """Membership in the conditional-recompression set used by the consistency test."""
        return self.recompression is Recompression.CONDITIONAL_ON_M


@dataclass(frozen=True)
class ProfileSet:
    profiles: dict[Sns, PlatformProfile]
    app_prestage: dict[str, TablePair] = field(default_factory=dict, repr=False)

    def __getitem__(self, sns) -> PlatformProfile:
        try:
            return self.profiles[Sns(sns)]
        except (KeyError, ValueError):
            raise UnknownProfile(f"no profile for {sns!r}") from None

    def __contains__(self, sns) -> bool:
        try:
            return Sns(sns) in self.profiles
        except ValueError:
            return False

    def __iter__(self):
        return iter(self.profiles.values())

    def __len__(self) -> int:
        return len(self.profiles)

    @property
    def conditional_set(self) -> set[Sns]:
        return {p.sns for p in self if p.conditional_on_size}


def _table(spec, table_id: int) -> QuantizationTable:
    if isinstance(spec, int):
        return ijg_table(spec, table_id)
    if isinstance(spec, list) and len(spec) == 64:
        return QuantizationTable(table_id, 8 if max(spec) < 256 else 16, tuple(int(x) for x in spec))
    raise FormatError(f"bad quantization table spec {spec!r}")


def _per_scenario(spec, table_id: int, keys) -> dict[str, QuantizationTable]:
    if isinstance(spec, dict):
        return {k: _table(v, table_id) for k, v in spec.items()}
    table = _table(spec, table_id)
    return {k: table for k in keys}


def _parse_dqt(spec: dict, clients) -> dict[str, TablePair]:
    keys = [UploadClient.BROWSER.value] + [
        scenario_key(c, m) for c in clients if c is not UploadClient.BROWSER
        for m in (SelectionMethod.LOCAL_GALLERY, SelectionMethod.EMBEDDED_CAMERA)
    ]
    lum = _per_scenario(spec["luminance"], 0, keys)
    chroma = _per_scenario(spec["chrominance"], 1, keys)
    out = {}
    for k in set(lum) | set(chroma):
        out[k] = (lum.get(k, lum.get("Browser")), chroma.get(k, chroma.get("Browser")))
        if out[k][0] is None or out[k][1] is None:
            raise FormatError(f"incomplete DQT spec for scenario {k}")
    return out


def _parse_rename(spec) -> RenameRule | None:
    if spec is None:
        return None
    return RenameRule(
        pattern=re.compile(spec["pattern"]),
        template=spec["template"],
        specificity=Specificity(spec.get("specificity", "Strong")),
        lookup=bool(spec.get("lookup", False)),
        lookup_url=spec.get("lookup_url"),
        lookup_note=spec.get("lookup_note"),
        resolution_hints=dict(spec.get("resolution_hints", {})),
    )


def profiles_from_dict(doc: dict) -> ProfileSet:
    try:
        platforms = {}
        for name, spec in doc["platforms"].items():
            sns = Sns(name)
            clients = tuple(UploadClient(c) for c in spec.get("clients", [c.value for c in UploadClient]))
            platforms[sns] = PlatformProfile(
                sns=sns,
                resize_threshold=spec.get("resize_threshold"),
                recompression=Recompression(spec["recompression"]),
                exif_camera_policy=CameraExifPolicy(spec["exif_camera_policy"]),
                exif_other_policy=OtherExifPolicy(spec["exif_other_policy"]),
                dqt=_parse_dqt(spec["dqt"], clients),
                byte_size_threshold=spec.get("byte_size_threshold"),
                resize_threshold_lq=spec.get("resize_threshold_lq"),
                clients=clients,
                rename=_parse_rename(spec.get("rename")),
            )
        prestage = {
            key: (_table(v["luminance"], 0), _table(v["chrominance"], 1))
            for key, v in doc.get("app_prestage", {}).items()
        }
    except (KeyError, TypeError, ValueError, re.error) as exc:
        raise FormatError(f"invalid profile document: {exc}") from exc
    return ProfileSet(platforms, prestage)


def load_profiles(path=None) -> ProfileSet:
    """Load a profile file; ``None`` loads the shipped default."""
    if path is None:
        text = resources.files("ballistics").joinpath("data/profiles.json").read_text()
    else:
        text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"profile file is not valid JSON: {exc}") from exc
    return profiles_from_dict(doc)


_DEFAULT: ProfileSet | None = None


def default_profiles() -> ProfileSet:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_profiles()
    return _DEFAULT
