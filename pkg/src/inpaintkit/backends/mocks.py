"""Deterministic mock backends.

These stand in for the real segmentation/inpainting/generation models so the
entire pipeline can be exercised, byte for byte, on any machine.  They are
pure functions of their inputs (plus the seed for generation), reentrant, and
fast enough for large synthetic scenes.
"""

from __future__ import annotations

import hashlib

import numpy as np
from scipy import ndimage

from ..errors import BackendFailure, EmptyMask
from ..model import ClickPrompt, Image, Mask
from .base import SegmentationCandidate

_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


class RegionGrowSegmenter:
    """Segment by growing a 4-connected region of similar colour from each click.

    A pixel joins the region grown from a click when every channel is within
    ``tolerance`` of the clicked pixel's colour.  Regions grown from negative
    clicks are carved out of the result.  With several positive clicks the
    union of their regions is offered first, followed by each per-click
    region; scores are the fraction of positive clicks a mask contains.
    """

    def __init__(self, tolerance: int = 32):
        self.tolerance = tolerance

    def _grow(self, pixels: np.ndarray, x: int, y: int) -> np.ndarray:
        seed_colour = pixels[y, x].astype(np.int16)
        within = (np.abs(pixels.astype(np.int16) - seed_colour) <= self.tolerance).all(axis=2)
        labels, _ = ndimage.label(within, structure=_CROSS)
        return labels == labels[y, x]

    def segment(self, image: Image, clicks: ClickPrompt) -> list[SegmentationCandidate]:
        positives = clicks.positives
        grown = [self._grow(image.pixels, p.x, p.y) for p in positives]
        carved = np.zeros((image.height, image.width), dtype=bool)
        for p in clicks.negatives:
            carved |= self._grow(image.pixels, p.x, p.y)

        proposals: list[np.ndarray] = []
        if len(grown) > 1:
            union = np.zeros_like(carved)
            for g in grown:
                union |= g
            proposals.append(union & ~carved)
        proposals.extend(g & ~carved for g in grown)

        candidates: list[SegmentationCandidate] = []
        seen: list[np.ndarray] = []
        for bits in proposals:
            if not bits.any():
                continue
            if any(np.array_equal(bits, prev) for prev in seen):
                continue
            seen.append(bits)
            contained = sum(1 for p in positives if bits[p.y, p.x])
            candidates.append(
                SegmentationCandidate(Mask(bits), contained / len(positives))
            )
        candidates.sort(key=lambda c: -c.score)
        return candidates


class HarmonicFillInpainter:
    """Fill the hole with the discrete harmonic extension of its boundary.

    Jacobi iteration of the Laplace equation over hole pixels: each step
    replaces a hole pixel by the mean of its in-image 4-neighbours, with all
    known pixels held fixed.  Hole values start at the boundary mean, and
    iteration stops once the largest per-channel change drops below
    ``tolerance`` or after ``max_iterations`` sweeps.  Filled values obey the
    discrete maximum principle: they stay within the range of the boundary.
    """

    def __init__(self, tolerance: float = 0.5, max_iterations: int = 10_000):
        self.tolerance = tolerance
        self.max_iterations = max_iterations

    def inpaint(self, image: Image, mask: Mask) -> Image:
        hole = mask.bits
        if not hole.any():
            raise EmptyMask("inpaint called with an empty mask")
        known = ~hole

        ring = np.zeros_like(hole)
        ring[:-1, :] |= hole[1:, :]
        ring[1:, :] |= hole[:-1, :]
        ring[:, :-1] |= hole[:, 1:]
        ring[:, 1:] |= hole[:, :-1]
        boundary = ring & known
        if not boundary.any():
            raise BackendFailure("hole covers the whole image; no boundary to fill from")

        values = image.pixels.astype(np.float64)
        values[hole] = values[boundary].mean(axis=0)

        height, width = hole.shape
        neighbour_count = np.full((height, width), 4.0)
        neighbour_count[0, :] -= 1
        neighbour_count[-1, :] -= 1
        neighbour_count[:, 0] -= 1
        neighbour_count[:, -1] -= 1

        for _ in range(self.max_iterations):
            acc = np.zeros_like(values)
            acc[:-1, :] += values[1:, :]
            acc[1:, :] += values[:-1, :]
            acc[:, :-1] += values[:, 1:]
            acc[:, 1:] += values[:, :-1]
            updated = acc[hole] / neighbour_count[hole][:, None]
            delta = np.abs(updated - values[hole]).max()
            values[hole] = updated
            if delta < self.tolerance:
                break

        out = image.pixels.copy()
        out[hole] = np.clip(np.floor(values[hole] + 0.5), 0, 255).astype(np.uint8)
        return Image(out)


def prompt_colour(prompt: str, seed: int) -> tuple[int, int, int]:
    """Stable mapping from (prompt, seed) to an RGB colour.

    The first three bytes of a 64-bit BLAKE2b digest over the UTF-8 prompt
    and the big-endian seed become the channel values.
    """
    digest = hashlib.blake2b(
        prompt.encode("utf-8") + b"\x00" + seed.to_bytes(8, "big"),
        digest_size=8,
    ).digest()
    return digest[0], digest[1], digest[2]


class PatternGenerator:
    """Fill the masked region with a solid colour derived from (prompt, seed)."""

    def generate(self, image: Image, mask: Mask, prompt: str, seed: int) -> Image:
        if not mask.bits.any():
            raise EmptyMask("generate called with an empty mask")
        out = image.pixels.copy()
        out[mask.bits] = np.array(prompt_colour(prompt, seed), dtype=np.uint8)
        return Image(out)
