"""HTTP adapters that run a backend role on a remote worker.

The wire format mirrors the service's own job protocol: images and masks are
base64 PNG strings, prompt and seed are scalar fields, and the response
carries a base64 PNG of identical dimensions.  Endpoints are
``POST {base_url}/segment``, ``/inpaint``, and ``/generate``.
"""

from __future__ import annotations

import httpx

from ..errors import BackendFailure
from ..model import ClickPrompt, Image, Mask
from .. import codec
from .base import SegmentationCandidate


class _RemoteCall:
    def __init__(self, base_url: str, client: httpx.Client | None = None, timeout: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self._client = client or httpx.Client(timeout=timeout)

    def _post(self, path: str, payload: dict) -> dict:
        try:
            response = self._client.post(f"{self.base_url}{path}", json=payload)
            response.raise_for_status()
            return response.json()
        except httpx.HTTPError as exc:
            raise BackendFailure(f"remote backend call {path} failed: {exc}") from exc


class RemoteSegmenter(_RemoteCall):
    def segment(self, image: Image, clicks: ClickPrompt) -> list[SegmentationCandidate]:
        payload = {
            "image_png": codec.image_to_base64_png(image),
            "points": [
                {"x": p.x, "y": p.y, "label": p.label.value} for p in clicks.points
            ],
        }
        body = self._post("/segment", payload)
        candidates = []
        for item in body.get("candidates", []):
            mask = codec.decode_mask(codec.from_base64(item["mask_png"]))
            candidates.append(SegmentationCandidate(mask, float(item["score"])))
        return candidates


class RemoteInpainter(_RemoteCall):
    def inpaint(self, image: Image, mask: Mask) -> Image:
        body = self._post(
            "/inpaint",
            {
                "image_png": codec.image_to_base64_png(image),
                "mask_png": codec.mask_to_base64_png(mask),
            },
        )
        return codec.decode_image(codec.from_base64(body["image_png"]))


class RemoteGenerator(_RemoteCall):
    def generate(self, image: Image, mask: Mask, prompt: str, seed: int) -> Image:
        body = self._post(
            "/generate",
            {
                "image_png": codec.image_to_base64_png(image),
                "mask_png": codec.mask_to_base64_png(mask),
                "prompt": prompt,
                "seed": seed,
            },
        )
        return codec.decode_image(codec.from_base64(body["image_png"]))
