"""PNG/JPEG decoding and base64 PNG encoding for images and masks.

Masks travel as single-channel PNGs holding only the values 0 and 255.
JPEG is accepted for image upload only; everything written out is PNG.
"""

from __future__ import annotations

import base64
import io

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from .errors import BadMask, DecodeError
from .model import Image, Mask, validate_image

_ACCEPTED_FORMATS = {"PNG", "JPEG"}


def decode_image(data: bytes) -> Image:
    """Decode PNG or JPEG bytes into a validated :class:`Image`."""
    try:
        with PILImage.open(io.BytesIO(data)) as pil:
            if pil.format not in _ACCEPTED_FORMATS:
                raise DecodeError(f"unsupported format {pil.format!r}; expected PNG or JPEG")
            if pil.mode in ("P", "LA", "PA"):
                pil = pil.convert("RGBA")
            elif pil.mode not in ("RGB", "RGBA"):
                pil = pil.convert("RGB")
            raster = np.asarray(pil)
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise DecodeError(f"could not decode image bytes: {exc}") from exc
    return validate_image(raster)


def encode_image_png(image: Image) -> bytes:
    buf = io.BytesIO()
    PILImage.fromarray(image.pixels, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def decode_mask(data: bytes) -> Mask:
    """Decode a single-channel 0/255 PNG into a :class:`Mask`."""
    try:
        with PILImage.open(io.BytesIO(data)) as pil:
            if pil.format != "PNG":
                raise BadMask(f"mask must be PNG, got {pil.format!r}")
            gray = np.asarray(pil.convert("L"))
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise BadMask(f"could not decode mask bytes: {exc}") from exc
    values = np.unique(gray)
    if not np.isin(values, (0, 255)).all():
        raise BadMask(f"mask values must be 0 or 255, found {values[:8].tolist()}")
    return Mask(gray == 255)


def encode_mask_png(mask: Mask) -> bytes:
    buf = io.BytesIO()
    gray = np.where(mask.bits, 255, 0).astype(np.uint8)
    PILImage.fromarray(gray, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def to_base64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def from_base64(text: str) -> bytes:
    try:
        return base64.b64decode(text, validate=True)
    except (ValueError, TypeError) as exc:
        raise DecodeError(f"invalid base64 payload: {exc}") from exc


def image_to_base64_png(image: Image) -> str:
    return to_base64(encode_image_png(image))


def mask_to_base64_png(mask: Mask) -> str:
    return to_base64(encode_mask_png(mask))
