"""Platform renaming schemes: pattern matching, image IDs and lookup URLs."""
from __future__ import annotations

import datetime as dt
import os
from dataclasses import dataclass

from .labels import Sns
from .profiles import ProfileSet, Specificity, default_profiles


@dataclass(frozen=True)
class FilenameMatch:
    sns: Sns
    specificity: Specificity
    image_id: str | None = None
    date: dt.date | None = None
    resolution_hint: str | None = None
    lookup_url: str | None = None
    lookup_note: str | None = None

    def to_dict(self) -> dict:
        return {
            "sns": self.sns.value,
            "specificity": self.specificity.value,
            "image_id": self.image_id,
            "date": self.date.isoformat() if self.date else None,
            "resolution_hint": self.resolution_hint,
            "lookup_url": self.lookup_url,
            "lookup_note": self.lookup_note,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FilenameMatch":
        return cls(
            Sns(d["sns"]), Specificity(d["specificity"]), d.get("image_id"),
            dt.date.fromisoformat(d["date"]) if d.get("date") else None,
            d.get("resolution_hint"), d.get("lookup_url"), d.get("lookup_note"),
        )


def match_filename(name: str, profiles: ProfileSet | None = None) -> list[FilenameMatch]:
    """Every platform whose renaming scheme fits ``name``, in profile order.

    Directory components are ignored. Never raises.
    """
    profiles = default_profiles() if profiles is None else profiles
    base = os.path.basename(str(name))
    matches = []
    for profile in profiles:
        rule = profile.rename
        if rule is None:
            continue
        m = rule.pattern.match(base)
        if m is None:
            continue
        groups = m.groupdict()
        date = None
        if groups.get("date"):
            try:
                date = dt.datetime.strptime(groups["date"], "%Y%m%d").date()
            except ValueError:
                continue
        hint = groups.get("res")
        if hint is not None:
            hint = rule.resolution_hints.get(hint, hint)
        image_id = groups.get("id")
        matches.append(FilenameMatch(
            sns=profile.sns,
            specificity=rule.specificity,
            image_id=image_id,
            date=date,
            resolution_hint=hint,
            lookup_url=lookup_url(profile.sns, image_id, profiles) if image_id else None,
            lookup_note=rule.lookup_note if rule.lookup and rule.lookup_url is None else None,
        ))
    return matches


def lookup_url(sns, image_id: str, profiles: ProfileSet | None = None) -> str | None:
    """Direct URL for platforms that expose one (Twitter, Imgur); otherwise None."""
    if not image_id:
        raise ValueError("image_id must be non-empty")
    profiles = default_profiles() if profiles is None else profiles
    if sns not in profiles:
        return None
    rule = profiles[sns].rename
    if rule is None or not rule.lookup or rule.lookup_url is None:
        return None
    return rule.lookup_url.format(id=image_id)
