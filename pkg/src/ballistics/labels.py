"""Label vocabularies: platforms, upload clients and image selection methods."""
from __future__ import annotations

from enum import Enum


class Sns(str, Enum):
    FACEBOOK = "Facebook"
    GOOGLE_PLUS = "GooglePlus"
    FLICKR = "Flickr"
    TUMBLR = "Tumblr"
    IMGUR = "Imgur"
    TWITTER = "Twitter"
    WHATSAPP = "WhatsApp"
    TINYPIC = "Tinypic"
    INSTAGRAM = "Instagram"
    TELEGRAM = "Telegram"

    def __str__(self) -> str:
        return self.value


class UploadClient(str, Enum):
    BROWSER = "Browser"
    ANDROID_APP = "AndroidApp"
    IOS_APP = "IosApp"

    def __str__(self) -> str:
        return self.value


class SelectionMethod(str, Enum):
    LOCAL_GALLERY = "LocalGallery"
    EMBEDDED_CAMERA = "EmbeddedCamera"
    NOT_APPLICABLE = "NotApplicable"

    def __str__(self) -> str:
        return self.value


#: Output value of the SNS classifier when the consistency loop gives up.
NOT_SURE = "NotSure"


def check_scenario(client: UploadClient, method: SelectionMethod) -> None:
    """Raise ValueError unless ``method`` is NotApplicable exactly for browser uploads."""
    if (client is UploadClient.BROWSER) != (method is SelectionMethod.NOT_APPLICABLE):
        raise ValueError(f"selection method {method} is invalid for client {client}")


def scenarios_for(client: UploadClient) -> list[tuple[UploadClient, SelectionMethod]]:
    """All (client, selection method) pairs a given client can produce."""
    if client is UploadClient.BROWSER:
        return [(client, SelectionMethod.NOT_APPLICABLE)]
    return [(client, SelectionMethod.LOCAL_GALLERY), (client, SelectionMethod.EMBEDDED_CAMERA)]


def scenario_key(client: UploadClient, method: SelectionMethod) -> str:
    if client is UploadClient.BROWSER:
        return client.value
    return f"{client.value}/{method.value}"


ALL_SCENARIOS: list[tuple[UploadClient, SelectionMethod]] = [
    s for c in UploadClient for s in scenarios_for(c)
]
