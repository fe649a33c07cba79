"""End-to-end click-to-edit workflows.

Three modes share one skeleton: segment the clicked object (or accept a
pre-made mask), clean the mask, derive the edit region for the mode, cut a
fidelity-preserving working window, run the backend on the window, and
composite the result back through the edit mask.

Guarantees, all bit-exact and independent of backend behaviour:

* remove/fill: pixels outside the edit mask equal the input;
* replace: pixels of the kept object equal the input;
* output dimensions equal input dimensions;
* with deterministic backends and a fixed seed, reruns are identical.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import ceil

from . import mask_ops
from .backends import BackendRegistry, DEFAULT_REGISTRY, select_mask
from .backends.base import SelectionPolicy
from .errors import EmptyPrompt, ObjectCoversImage
from .fidelity import CropWindow, compute_crop, extract, extract_mask, paste_composite
from .mask_ops import BBox
from .model import ClickPrompt, Image, Mask, Mode, PipelineConfig, require_same_shape


@dataclass(frozen=True)
class PipelineResult:
    output: Image
    object_mask: Mask  # cleaned segmentation mask, before any dilation
    edit_mask: Mask  # region actually composited
    window: CropWindow
    timings_ms: dict[str, float]


class _StageTimer:
    def __init__(self) -> None:
        self.timings: dict[str, float] = {}
        self._last = time.perf_counter()

    def mark(self, stage: str) -> None:
        now = time.perf_counter()
        self.timings[stage] = round((now - self._last) * 1000.0, 3)
        self._last = now


def _object_mask(
    image: Image,
    clicks: ClickPrompt | None,
    config: PipelineConfig,
    registry: BackendRegistry,
    precomputed: Mask | None,
    policy: SelectionPolicy,
    timer: _StageTimer,
) -> Mask:
    """Segment-and-select, or validate a caller-supplied mask."""
    if precomputed is not None:
        require_same_shape(image, precomputed)
        selected = precomputed
    else:
        if clicks is None:
            raise ValueError("either clicks or a precomputed mask is required")
        candidates = registry.segmenter(config.segmenter_id).segment(image, clicks)
        selected = select_mask(candidates, policy)
    timer.mark("segment")
    # Hole-fill and optional opening happen before any mode-specific
    # dilation so the reported object mask is the cleaned object itself.
    cleaned = mask_ops.refine(selected, config.open_radius, 0)
    timer.mark("refine")
    return cleaned


def fill_dilation_radius(object_box: BBox, config: PipelineConfig) -> int:
    """Dilation radius for fill mode: generous masks give the generator room."""
    long_side = max(object_box.w, object_box.h)
    return max(config.dilate_radius_fill_min, ceil(config.dilate_fraction_fill * long_side))


def _run_windowed(
    image: Image,
    edit_mask: Mask,
    region: BBox,
    config: PipelineConfig,
    apply_backend,
    timer: _StageTimer,
) -> tuple[Image, CropWindow]:
    window = compute_crop((image.width, image.height), region, config)
    timer.mark("crop")
    working_image = extract(image, window)
    working_mask = extract_mask(edit_mask, window)
    timer.mark("extract")
    processed = apply_backend(working_image, working_mask)
    timer.mark("backend")
    output = paste_composite(image, processed, window, edit_mask)
    timer.mark("composite")
    return output, window


def remove_object(
    image: Image,
    clicks: ClickPrompt | None,
    config: PipelineConfig,
    *,
    registry: BackendRegistry = DEFAULT_REGISTRY,
    object_mask: Mask | None = None,
    selection: SelectionPolicy = "highest_score",
) -> PipelineResult:
    """Erase the clicked object and fill the hole from surrounding context."""
    timer = _StageTimer()
    cleaned = _object_mask(image, clicks, config, registry, object_mask, selection, timer)
    edit_mask = mask_ops.dilate(cleaned, config.dilate_radius_remove)
    region = mask_ops.bbox(edit_mask)
    assert region is not None  # cleaned mask is never empty past refine
    inpainter = registry.inpainter(config.inpainter_id)
    output, window = _run_windowed(
        image, edit_mask, region, config, inpainter.inpaint, timer
    )
    return PipelineResult(output, cleaned, edit_mask, window, timer.timings)


def fill_object(
    image: Image,
    clicks: ClickPrompt | None,
    prompt: str,
    config: PipelineConfig,
    *,
    registry: BackendRegistry = DEFAULT_REGISTRY,
    object_mask: Mask | None = None,
    selection: SelectionPolicy = "highest_score",
) -> PipelineResult:
    """Replace the clicked object with content generated from a text prompt."""
    if not prompt or not prompt.strip():
        raise EmptyPrompt("fill mode needs a non-empty prompt")
    timer = _StageTimer()
    cleaned = _object_mask(image, clicks, config, registry, object_mask, selection, timer)
    object_box = mask_ops.bbox(cleaned)
    assert object_box is not None
    edit_mask = mask_ops.dilate(cleaned, fill_dilation_radius(object_box, config))
    region = mask_ops.bbox(edit_mask)
    assert region is not None
    generator = registry.generator(config.generator_id)
    output, window = _run_windowed(
        image,
        edit_mask,
        region,
        config,
        lambda img, msk: generator.generate(img, msk, prompt, config.seed),
        timer,
    )
    return PipelineResult(output, cleaned, edit_mask, window, timer.timings)


def replace_background(
    image: Image,
    clicks: ClickPrompt | None,
    prompt: str,
    config: PipelineConfig,
    *,
    registry: BackendRegistry = DEFAULT_REGISTRY,
    object_mask: Mask | None = None,
    selection: SelectionPolicy = "highest_score",
) -> PipelineResult:
    """Keep the clicked object and regenerate everything around it."""
    if not prompt or not prompt.strip():
        raise EmptyPrompt("replace mode needs a non-empty prompt")
    timer = _StageTimer()
    cleaned = _object_mask(image, clicks, config, registry, object_mask, selection, timer)
    edit_mask = mask_ops.invert(cleaned)
    if not edit_mask.bits.any():
        raise ObjectCoversImage("object mask covers the whole image; nothing to replace")
    # The edit region is the complement of the object and spans essentially
    # the whole image, so the window is computed over the full image.
    region = BBox(0, 0, image.width, image.height)
    generator = registry.generator(config.generator_id)
    output, window = _run_windowed(
        image,
        edit_mask,
        region,
        config,
        lambda img, msk: generator.generate(img, msk, prompt, config.seed),
        timer,
    )
    return PipelineResult(output, cleaned, edit_mask, window, timer.timings)


def run_pipeline(
    image: Image,
    clicks: ClickPrompt | None,
    prompt: str | None,
    config: PipelineConfig,
    *,
    registry: BackendRegistry = DEFAULT_REGISTRY,
    object_mask: Mask | None = None,
    selection: SelectionPolicy = "highest_score",
) -> PipelineResult:
    """Dispatch on ``config.mode``; the one entry point the CLI and service share."""
    common = dict(registry=registry, object_mask=object_mask, selection=selection)
    if config.mode is Mode.REMOVE:
        return remove_object(image, clicks, config, **common)
    if config.mode is Mode.FILL:
        return fill_object(image, clicks, prompt or "", config, **common)
    if config.mode is Mode.REPLACE:
        return replace_background(image, clicks, prompt or "", config, **common)
    raise ValueError(f"unknown mode {config.mode!r}")
