"""Binary mask morphology and refinement.

All operations use a square structuring element of side ``2 * radius + 1``
(a Chebyshev ball), for which dilation and erosion are separable into a
horizontal and a vertical pass and compose additively:
``dilate(dilate(m, a), b) == dilate(m, a + b)``.

Border semantics: the plane outside the mask is background.  Dilation never
grows in from outside; erosion treats out-of-bounds neighbours as background,
so objects touching the image border erode at the border.  Under these
semantics erosion is the dual of dilation evaluated on a zero-padded canvas:
``erode(m, r) == crop(invert(dilate(invert(pad(m, r)), r)))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import EmptyResult, RegionOutOfBounds
from .model import Mask

# 4-connectivity structure for background flood labelling.
_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True)
class BBox:
    """Axis-aligned pixel box: top-left corner plus extent (w, h >= 1)."""

    x0: int
    y0: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.w < 1 or self.h < 1:
            raise RegionOutOfBounds(f"degenerate box {self.w}x{self.h}")
        if self.x0 < 0 or self.y0 < 0:
            raise RegionOutOfBounds(f"box origin ({self.x0}, {self.y0}) negative")

    @property
    def x1(self) -> int:
        """One past the rightmost column."""
        return self.x0 + self.w

    @property
    def y1(self) -> int:
        """One past the bottom row."""
        return self.y0 + self.h

    def contains(self, other: "BBox") -> bool:
        return (
            self.x0 <= other.x0
            and self.y0 <= other.y0
            and other.x1 <= self.x1
            and other.y1 <= self.y1
        )

    def fits_in(self, width: int, height: int) -> bool:
        return self.x1 <= width and self.y1 <= height


def _dilate_axis(bits: np.ndarray, radius: int, axis: int) -> np.ndarray:
    """Running OR over a window of ``2 * radius + 1`` along one axis."""
    out = bits.copy()
    src = bits if axis == 1 else bits.T
    dst = out if axis == 1 else out.T
    for s in range(1, radius + 1):
        dst[:, s:] |= src[:, :-s]
        dst[:, :-s] |= src[:, s:]
    return out


def _erode_axis(bits: np.ndarray, radius: int, axis: int) -> np.ndarray:
    """Running AND over a window of ``2 * radius + 1`` along one axis.

    Out-of-bounds neighbours count as background, so a strip of ``radius``
    pixels at each end of the axis is always cleared.
    """
    out = bits.copy()
    src = bits if axis == 1 else bits.T
    dst = out if axis == 1 else out.T
    n = dst.shape[1]
    for s in range(1, radius + 1):
        dst[:, s:] &= src[:, :-s]
        dst[:, :-s] &= src[:, s:]
    edge = min(radius, n)
    dst[:, :edge] = False
    dst[:, n - edge :] = False
    return out


def dilate(mask: Mask, radius: int) -> Mask:
    """Minkowski dilation by the Chebyshev ball of the given radius."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius == 0:
        return mask
    grown = _dilate_axis(mask.bits, radius, axis=1)
    grown = _dilate_axis(grown, radius, axis=0)
    return Mask(grown)


def erode(mask: Mask, radius: int) -> Mask:
    """Morphological erosion, the border-padded dual of :func:`dilate`."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius == 0:
        return mask
    shrunk = _erode_axis(mask.bits, radius, axis=1)
    shrunk = _erode_axis(shrunk, radius, axis=0)
    return Mask(shrunk)


def invert(mask: Mask) -> Mask:
    return Mask(~mask.bits)


def fill_holes(mask: Mask) -> Mask:
    """Set every background region not 4-connected to the image border.

    Background components are labelled with 4-connectivity; components that
    never touch the border are enclosed by the object and become foreground.
    """
    background = ~mask.bits
    labels, count = ndimage.label(background, structure=_CROSS)
    if count == 0:
        return mask
    border = np.concatenate(
        [labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]
    )
    open_to_border = np.zeros(count + 1, dtype=bool)
    open_to_border[np.unique(border)] = True
    holes = background & ~open_to_border[labels]
    return Mask(mask.bits | holes)


def refine(mask: Mask, open_radius: int, dilate_radius: int) -> Mask:
    """Clean a raw segmentation mask and pad it for editing.

    Fills enclosed holes, then opens (erode + dilate by ``open_radius``) to
    drop speckle and smooth ragged boundaries, then dilates by
    ``dilate_radius``.  Raises :class:`EmptyResult` when nothing survives,
    which usually means the click selected noise.
    """
    cleaned = fill_holes(mask)
    if open_radius > 0:
        cleaned = dilate(erode(cleaned, open_radius), open_radius)
    refined = dilate(cleaned, dilate_radius)
    if not refined.bits.any():
        raise EmptyResult("refined mask has no set pixels")
    return refined


def bbox(mask: Mask) -> BBox | None:
    """Tight bounding box of the set pixels, or ``None`` for an empty mask."""
    rows = mask.bits.any(axis=1)
    if not rows.any():
        return None
    cols = mask.bits.any(axis=0)
    y_idx = np.flatnonzero(rows)
    x_idx = np.flatnonzero(cols)
    x0, x1 = int(x_idx[0]), int(x_idx[-1])
    y0, y1 = int(y_idx[0]), int(y_idx[-1])
    return BBox(x0, y0, x1 - x0 + 1, y1 - y0 + 1)
