"""Typed errors raised across the pipeline.

Every failure mode callers are expected to branch on gets its own class so
the service and CLI can map errors to status codes and exit codes by name
(``type(exc).__name__``) instead of parsing messages.
"""

from __future__ import annotations


class InpaintKitError(Exception):
    """Base class for all errors raised by this package."""


class DimensionTooLarge(InpaintKitError):
    """Image exceeds the supported side length on at least one axis."""


class EmptyImage(InpaintKitError):
    """Image has zero pixels."""


class ChannelMismatch(InpaintKitError):
    """Raster is not 3-channel RGB (alpha is dropped earlier, at ingestion)."""


class DimensionMismatch(InpaintKitError):
    """Paired image/mask (or window) dimensions disagree."""


class PointOutOfBounds(InpaintKitError):
    """A click point lies outside the image."""


class RegionOutOfBounds(InpaintKitError):
    """A bounding box is not contained in the image."""


class EmptyResult(InpaintKitError):
    """Mask refinement produced a mask with no set pixels."""


class EmptyMask(InpaintKitError):
    """An operation that needs a non-empty mask received an empty one."""


class EmptyPrompt(InpaintKitError):
    """A generation call received an empty text prompt."""


class EmptyCandidates(InpaintKitError):
    """Mask selection received an empty candidate list."""


class NoObjectFound(InpaintKitError):
    """No segmentation candidate contains a positive click point."""


class ObjectCoversImage(InpaintKitError):
    """Background replacement has nothing to edit: the object fills the image."""


class BackendFailure(InpaintKitError):
    """A backend could not produce a result for an otherwise valid request."""


class BadMask(InpaintKitError):
    """A caller-supplied mask is unusable (wrong dimensions or not binary)."""


class DecodeError(InpaintKitError):
    """Bytes could not be decoded as a supported image format."""


class ConfigError(InpaintKitError):
    """A configuration value violates its documented constraints."""
