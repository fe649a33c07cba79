"""Fidelity-preserving crop, resample, and paste-back.

Generative backends want a fixed working resolution (512x512 by default).
Resizing a whole photo down to that size and back destroys detail, so the
edit region travels through a :class:`CropWindow` instead: a square window
around the region is cut out and resampled to the working resolution, the
backend edits that patch, and the patch is resampled back and composited
through the edit mask.  Pixels outside the mask are bit-identical to the
source by construction.

When the required square does not fit inside the image (huge masks, extreme
aspect ratios), the window falls back to the full image resized so its long
side equals the working resolution, keeping proportions up to the rounding
of working dimensions down to multiples of 8.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

import numpy as np

from .errors import DimensionMismatch, RegionOutOfBounds
from .mask_ops import BBox
from .model import Image, Mask, PipelineConfig


def _floor8(value: Fraction | int) -> int:
    return (int(value) // 8) * 8


@dataclass(frozen=True)
class CropWindow:
    """Source-space window plus the working-space geometry it maps to.

    ``scale`` is source pixels per working pixel, kept exact as a Fraction.
    Working dimensions are multiples of 8 (a hard constraint of diffusion
    backbones) and are derived from the window extent by
    ``max(8, floor8(side / scale))`` per axis, so aspect is preserved up to
    one floor-to-8 rounding step.
    """

    x0: int
    y0: int
    side_w: int
    side_h: int
    scale: Fraction
    working_w: int
    working_h: int

    def __post_init__(self) -> None:
        if self.x0 < 0 or self.y0 < 0 or self.side_w < 1 or self.side_h < 1:
            raise RegionOutOfBounds("window extent is degenerate or negative")
        if self.scale <= 0:
            raise RegionOutOfBounds(f"scale must be positive, got {self.scale}")
        for working, side in ((self.working_w, self.side_w), (self.working_h, self.side_h)):
            if working < 8 or working % 8 != 0:
                raise RegionOutOfBounds(
                    f"working dimension {working} is not a positive multiple of 8"
                )
            if working != max(8, _floor8(Fraction(side) / self.scale)):
                raise RegionOutOfBounds(
                    f"working dimension {working} inconsistent with "
                    f"side {side} at scale {self.scale}"
                )
            # A scale-1 window promises bit-exact extraction, so its sides
            # must equal the working dims exactly.
            if self.scale == 1 and working != side:
                raise RegionOutOfBounds(
                    f"scale-1 window with side {side} != working {working}"
                )

    @classmethod
    def identity(cls, x0: int, y0: int, side_w: int, side_h: int) -> "CropWindow":
        """Scale-1 window; sides must be multiples of 8."""
        return cls(x0, y0, side_w, side_h, Fraction(1), side_w, side_h)

    def fits_in(self, width: int, height: int) -> bool:
        return self.x0 + self.side_w <= width and self.y0 + self.side_h <= height


def compute_crop(image_dims: tuple[int, int], region: BBox, config: PipelineConfig) -> CropWindow:
    """Choose the window a backend will see for an edit over ``region``.

    The window is a square of side ``L = max(S, ceil(long_side * (1 + margin)))``
    centred on the region and shifted (never shrunk) to stay inside the image,
    mapping to an S x S working patch.  If that square cannot fit, the whole
    image becomes the window and is resized so its long side equals S.
    """
    width, height = image_dims
    if not region.fits_in(width, height):
        raise RegionOutOfBounds(
            f"region {region} outside {width}x{height} image"
        )
    s = config.working_resolution
    long_side = max(region.w, region.h)
    side = max(s, ceil(long_side * (1 + config.crop_margin)))

    if side <= min(width, height):
        # Centre the square on the region centre, rounding half up, then
        # shift into bounds.
        x0 = (2 * region.x0 + region.w - side + 1) // 2
        y0 = (2 * region.y0 + region.h - side + 1) // 2
        x0 = min(max(x0, 0), width - side)
        y0 = min(max(y0, 0), height - side)
        return CropWindow(x0, y0, side, side, Fraction(side, s), s, s)

    scale = Fraction(max(width, height), s)
    working_w = max(8, _floor8(Fraction(width) / scale))
    working_h = max(8, _floor8(Fraction(height) / scale))
    return CropWindow(0, 0, width, height, scale, working_w, working_h)


def _axis_taps(n_in: int, n_out: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Neighbour indices and fraction for one axis of bilinear sampling.

    Sample coordinates follow ``(i + 0.5) * in/out - 0.5``; border samples
    clamp to the edge pixel.
    """
    coords = (np.arange(n_out, dtype=np.float64) + 0.5) * (n_in / n_out) - 0.5
    lower = np.floor(coords)
    frac = coords - lower
    i0 = np.clip(lower, 0, n_in - 1).astype(np.intp)
    i1 = np.clip(lower + 1, 0, n_in - 1).astype(np.intp)
    return i0, i1, frac


def _resample_bilinear(src: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Plain bilinear resampling with half-pixel-centre alignment.

    The kernel is a tensor product, so the two axes are resampled
    separately (columns, then rows).  Returns float64.
    """
    in_h, in_w = src.shape[:2]
    values = src.astype(np.float64)

    x0, x1, fx = _axis_taps(in_w, out_w)
    y0, y1, fy = _axis_taps(in_h, out_h)
    if values.ndim == 3:
        fx = fx[None, :, None]
        fy = fy[:, None, None]
    else:
        fx = fx[None, :]
        fy = fy[:, None]

    mid = values[:, x0] * (1 - fx) + values[:, x1] * fx
    return mid[y0] * (1 - fy) + mid[y1] * fy


def _to_uint8(values: np.ndarray) -> np.ndarray:
    # Round half away from zero; values are non-negative here.
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


def extract(image: Image, window: CropWindow) -> Image:
    """Crop the window and resample it to the working resolution."""
    if not window.fits_in(image.width, image.height):
        raise RegionOutOfBounds(f"window {window} outside image")
    patch = image.pixels[
        window.y0 : window.y0 + window.side_h,
        window.x0 : window.x0 + window.side_w,
    ]
    if (window.side_w, window.side_h) == (window.working_w, window.working_h):
        return Image(patch.copy())
    resampled = _resample_bilinear(patch, window.working_h, window.working_w)
    return Image(_to_uint8(resampled))


def extract_mask(mask: Mask, window: CropWindow) -> Mask:
    """Crop and resample a mask with the same geometry as :func:`extract`.

    Interpolated coverage is re-binarised at the 0.5 threshold.
    """
    if not window.fits_in(mask.width, mask.height):
        raise RegionOutOfBounds(f"window {window} outside mask")
    patch = mask.bits[
        window.y0 : window.y0 + window.side_h,
        window.x0 : window.x0 + window.side_w,
    ]
    if (window.side_w, window.side_h) == (window.working_w, window.working_h):
        return Mask(patch.copy())
    coverage = _resample_bilinear(patch.astype(np.float64), window.working_h, window.working_w)
    return Mask(coverage >= 0.5)


def paste_composite(
    original: Image, processed: Image, window: CropWindow, edit_mask: Mask
) -> Image:
    """Resample the processed patch back into place and composite it.

    Output pixels equal the processed patch where ``edit_mask`` is set inside
    the window and the original image everywhere else.
    """
    if (processed.width, processed.height) != (window.working_w, window.working_h):
        raise DimensionMismatch(
            f"processed patch {processed.width}x{processed.height} does not match "
            f"working dims {window.working_w}x{window.working_h}"
        )
    if (edit_mask.width, edit_mask.height) != (original.width, original.height):
        raise DimensionMismatch(
            f"edit mask {edit_mask.width}x{edit_mask.height} does not match "
            f"image {original.width}x{original.height}"
        )
    if not window.fits_in(original.width, original.height):
        raise RegionOutOfBounds(f"window {window} outside image")

    if (window.side_w, window.side_h) == (window.working_w, window.working_h):
        patch = processed.pixels
    else:
        patch = _to_uint8(
            _resample_bilinear(processed.pixels, window.side_h, window.side_w)
        )

    out = original.pixels.copy()
    ys = slice(window.y0, window.y0 + window.side_h)
    xs = slice(window.x0, window.x0 + window.side_w)
    region_mask = edit_mask.bits[ys, xs]
    region = out[ys, xs]
    region[region_mask] = patch[region_mask]
    return Image(out)
