"""Shared domain types, coordinate conventions, and pipeline configuration.

Coordinate convention used everywhere in this package: origin at the top-left
corner, x grows rightward (columns), y grows downward (rows). Arrays are
indexed ``[y, x]``.

All types here are immutable after construction and safe to share between
threads; the wrapped numpy buffers are marked read-only.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    ChannelMismatch,
    ConfigError,
    DimensionMismatch,
    DimensionTooLarge,
    EmptyImage,
    PointOutOfBounds,
)

logger = logging.getLogger(__name__)

MAX_SIDE = 4096


@dataclass(frozen=True)
class Image:
    """8-bit RGB raster, row-major, at most ``MAX_SIDE`` pixels per side."""

    pixels: np.ndarray  # (height, width, 3) uint8, read-only

    def __post_init__(self) -> None:
        px = self.pixels
        if px.ndim != 3 or px.shape[2] != 3:
            raise ChannelMismatch(f"expected (H, W, 3) buffer, got shape {px.shape}")
        if px.dtype != np.uint8:
            raise ChannelMismatch(f"expected uint8 pixels, got {px.dtype}")
        h, w = px.shape[:2]
        if h == 0 or w == 0:
            raise EmptyImage("image has zero pixels")
        if w > MAX_SIDE or h > MAX_SIDE:
            raise DimensionTooLarge(f"{w}x{h} exceeds the {MAX_SIDE}-pixel side limit")
        # Buffer length rule: h * w * 3 bytes, guaranteed by the shape check.
        assert px.size == w * h * 3
        px.flags.writeable = False

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])


@dataclass(frozen=True)
class Mask:
    """Binary raster aligned 1:1 with an Image; True marks the object/edit region."""

    bits: np.ndarray  # (height, width) bool, read-only

    def __post_init__(self) -> None:
        b = self.bits
        if b.ndim != 2:
            raise ChannelMismatch(f"expected (H, W) mask buffer, got shape {b.shape}")
        if b.dtype != np.bool_:
            raise ChannelMismatch(f"expected bool mask, got {b.dtype}")
        if b.shape[0] == 0 or b.shape[1] == 0:
            raise EmptyImage("mask has zero pixels")
        b.flags.writeable = False

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Mask":
        """Build a mask from any strictly binary integer/bool array."""
        if arr.dtype != np.bool_:
            values = np.unique(arr)
            if not np.isin(values, (0, 1)).all():
                raise ChannelMismatch(f"mask values must be binary, found {values[:8]}")
            arr = arr.astype(bool)
        return cls(arr.copy())

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    @property
    def area(self) -> int:
        return int(self.bits.sum())

    def same_shape_as(self, other: "Image | Mask") -> bool:
        return self.width == other.width and self.height == other.height


class PointLabel(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class ClickPoint:
    x: int
    y: int
    label: PointLabel = PointLabel.POSITIVE


@dataclass(frozen=True)
class ClickPrompt:
    """Ordered list of point prompts; at least one must be positive."""

    points: tuple[ClickPoint, ...]

    def __post_init__(self) -> None:
        if not any(p.label is PointLabel.POSITIVE for p in self.points):
            raise PointOutOfBounds("a click prompt needs at least one positive point")

    @classmethod
    def single(cls, x: int, y: int) -> "ClickPrompt":
        return cls((ClickPoint(x, y, PointLabel.POSITIVE),))

    @property
    def positives(self) -> tuple[ClickPoint, ...]:
        return tuple(p for p in self.points if p.label is PointLabel.POSITIVE)

    @property
    def negatives(self) -> tuple[ClickPoint, ...]:
        return tuple(p for p in self.points if p.label is PointLabel.NEGATIVE)

    def check_bounds(self, width: int, height: int) -> None:
        for p in self.points:
            if not (0 <= p.x < width and 0 <= p.y < height):
                raise PointOutOfBounds(
                    f"point ({p.x}, {p.y}) outside {width}x{height} image"
                )


class Mode(str, Enum):
    REMOVE = "remove"
    FILL = "fill"
    REPLACE = "replace"


@dataclass(frozen=True)
class PipelineConfig:
    """Tunables shared by the CLI, the service, and direct pipeline calls.

    ``dilate_radius_remove`` pads the object mask before contextual hole
    filling.  Fill mode grows the mask much more aggressively: its radius is
    ``max(dilate_radius_fill_min, ceil(dilate_fraction_fill * bbox long side))``
    so the generator gets room to work.  Replace mode applies no dilation.
    """

    mode: Mode = Mode.REMOVE
    dilate_radius_remove: int = 15
    dilate_radius_fill_min: int = 35
    dilate_fraction_fill: float = 0.10
    open_radius: int = 0
    working_resolution: int = 512
    crop_margin: float = 0.25
    seed: int = 0
    segmenter_id: str = "region_grow"
    inpainter_id: str = "harmonic"
    generator_id: str = "pattern"

    def __post_init__(self) -> None:
        if self.working_resolution <= 0 or self.working_resolution % 8 != 0:
            raise ConfigError(
                f"working_resolution must be a positive multiple of 8, "
                f"got {self.working_resolution}"
            )
        for name in ("dilate_radius_remove", "dilate_radius_fill_min", "open_radius"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.dilate_fraction_fill < 0:
            raise ConfigError("dilate_fraction_fill must be >= 0")
        if self.crop_margin < 0:
            raise ConfigError("crop_margin must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a non-negative integer below 2**64")


def validate_image(raster: np.ndarray) -> Image:
    """Validate a decoded raster and wrap it as an :class:`Image`.

    Accepts (H, W, 3) uint8 buffers unchanged.  A trailing alpha channel is
    dropped with a warning; anything else raises :class:`ChannelMismatch`.
    Oversized and empty rasters raise their dedicated errors.
    """
    if raster.ndim != 3:
        raise ChannelMismatch(f"expected a 3-channel raster, got shape {raster.shape}")
    h, w, channels = raster.shape
    if channels == 4:
        logger.warning("dropping alpha channel from %dx%d RGBA input", w, h)
        raster = raster[:, :, :3]
    elif channels != 3:
        raise ChannelMismatch(f"expected 3 channels, got {channels}")
    if h == 0 or w == 0:
        raise EmptyImage("image has zero pixels")
    if w > MAX_SIDE or h > MAX_SIDE:
        raise DimensionTooLarge(f"{w}x{h} exceeds the {MAX_SIDE}-pixel side limit")
    if raster.dtype != np.uint8:
        raise ChannelMismatch(f"expected 8-bit channels, got {raster.dtype}")
    return Image(np.ascontiguousarray(raster))


def require_same_shape(image: Image, mask: Mask) -> None:
    """Raise a typed error when an image/mask pair disagrees on dimensions."""
    if not mask.same_shape_as(image):
        raise DimensionMismatch(
            f"mask {mask.width}x{mask.height} does not match "
            f"image {image.width}x{image.height}"
        )
