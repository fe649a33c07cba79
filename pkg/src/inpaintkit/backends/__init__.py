"""Backend roles, registry, mocks, and remote adapters."""

from __future__ import annotations

from .base import (
    BackendDescriptor,
    BackendRegistry,
    BackendRole,
    Generator,
    Inpainter,
    SafeGenerator,
    SafeInpainter,
    SafeSegmenter,
    SegmentationCandidate,
    Segmenter,
    SelectionPolicy,
    select_mask,
)
from .mocks import HarmonicFillInpainter, PatternGenerator, RegionGrowSegmenter, prompt_colour
from .remote import RemoteGenerator, RemoteInpainter, RemoteSegmenter

DEFAULT_REGISTRY = BackendRegistry()
DEFAULT_REGISTRY.register(
    BackendDescriptor(BackendRole.SEGMENTER, "region_grow", deterministic=True),
    RegionGrowSegmenter,
)
DEFAULT_REGISTRY.register(
    BackendDescriptor(BackendRole.INPAINTER, "harmonic", deterministic=True),
    HarmonicFillInpainter,
)
DEFAULT_REGISTRY.register(
    BackendDescriptor(BackendRole.GENERATOR, "pattern", deterministic=True),
    PatternGenerator,
)


def register_remote(registry: BackendRegistry, base_url: str, *, serial: bool = True) -> None:
    """Register remote adapters for all three roles under the id ``remote``.

    Remote model workers typically hold one model instance, so calls default
    to serialised dispatch.
    """
    registry.register(
        BackendDescriptor(BackendRole.SEGMENTER, "remote", deterministic=False, serial=serial),
        lambda: RemoteSegmenter(base_url),
    )
    registry.register(
        BackendDescriptor(BackendRole.INPAINTER, "remote", deterministic=False, serial=serial),
        lambda: RemoteInpainter(base_url),
    )
    registry.register(
        BackendDescriptor(BackendRole.GENERATOR, "remote", deterministic=False, serial=serial),
        lambda: RemoteGenerator(base_url),
    )


__all__ = [
    "BackendDescriptor",
    "BackendRegistry",
    "BackendRole",
    "DEFAULT_REGISTRY",
    "Generator",
    "HarmonicFillInpainter",
    "Inpainter",
    "PatternGenerator",
    "RegionGrowSegmenter",
    "RemoteGenerator",
    "RemoteInpainter",
    "RemoteSegmenter",
    "SafeGenerator",
    "SafeInpainter",
    "SafeSegmenter",
    "SegmentationCandidate",
    "Segmenter",
    "SelectionPolicy",
    "prompt_colour",
    "register_remote",
    "select_mask",
]
