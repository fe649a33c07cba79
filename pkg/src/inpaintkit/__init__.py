"""Interactive click-to-edit image pipeline.

Click an object to build a mask, then remove it (contextual fill), fill it
with prompted content, or keep it and replace the background.  Mask cleanup,
fidelity-preserving cropping, and compositing are deterministic and fully
testable; the model backends are pluggable and ship with exact mocks.
"""

from .backends import DEFAULT_REGISTRY, SegmentationCandidate, select_mask
from .errors import InpaintKitError
from .fidelity import CropWindow, compute_crop, extract, extract_mask, paste_composite
from .mask_ops import BBox, bbox, dilate, erode, fill_holes, invert, refine
from .model import (
    ClickPoint,
    ClickPrompt,
    Image,
    Mask,
    Mode,
    PipelineConfig,
    PointLabel,
    validate_image,
)
from .pipeline import (
    PipelineResult,
    fill_object,
    remove_object,
    replace_background,
    run_pipeline,
)

__version__ = "0.1.0"

__all__ = [
    "BBox",
    "ClickPoint",
    "ClickPrompt",
    "CropWindow",
    "DEFAULT_REGISTRY",
    "Image",
    "InpaintKitError",
    "Mask",
    "Mode",
    "PipelineConfig",
    "PipelineResult",
    "PointLabel",
    "SegmentationCandidate",
    "bbox",
    "compute_crop",
    "dilate",
    "erode",
    "extract",
    "extract_mask",
    "fill_holes",
    "fill_object",
    "invert",
    "paste_composite",
    "refine",
    "remove_object",
    "replace_background",
    "run_pipeline",
    "select_mask",
    "validate_image",
]
