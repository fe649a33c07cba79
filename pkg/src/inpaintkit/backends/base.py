"""Backend interfaces, contract-enforcing wrappers, and the registry.

Three narrow roles cover every model the pipeline talks to: a segmenter
turns clicks into candidate masks, an inpainter fills a hole from context,
and a generator fills a hole from a text prompt.  Real models (promptable
segmenters, large-mask inpainting networks, diffusion inpainting) plug in
behind the same call signatures; the bundled mocks make the whole pipeline
runnable and bit-reproducible without any weights.

The wrappers here enforce the promises callers rely on regardless of how a
backend behaves: inpaint/generate output is re-composited through the mask
(real diffusion models perturb unmasked pixels), and segmentation candidates
that do not contain a positive click are discarded.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol, Union

from ..errors import (
    BackendFailure,
    EmptyCandidates,
    EmptyMask,
    EmptyPrompt,
    NoObjectFound,
)
from ..model import ClickPrompt, Image, Mask, require_same_shape


@dataclass(frozen=True)
class SegmentationCandidate:
    """One candidate object mask with a confidence score in [0, 1]."""

    mask: Mask
    score: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")


class BackendRole(str, Enum):
    SEGMENTER = "segmenter"
    INPAINTER = "inpainter"
    GENERATOR = "generator"


@dataclass(frozen=True)
class BackendDescriptor:
    role: BackendRole
    backend_id: str
    deterministic: bool
    # Granularity constraint on working dimensions the backend accepts.
    working_multiple: int = 8
    # Serial backends cannot run concurrent calls; the registry funnels
    # their invocations through a per-backend lock.
    serial: bool = False


class Segmenter(Protocol):
    def segment(self, image: Image, clicks: ClickPrompt) -> list[SegmentationCandidate]:
        ...


class Inpainter(Protocol):
    def inpaint(self, image: Image, mask: Mask) -> Image:
        ...


class Generator(Protocol):
    def generate(self, image: Image, mask: Mask, prompt: str, seed: int) -> Image:
        ...


SelectionPolicy = Union[str, int]  # "highest_score" | "largest" | index


def select_mask(candidates: list[SegmentationCandidate], policy: SelectionPolicy) -> Mask:
    """Deterministically pick one candidate mask.

    Ties break toward the lower candidate index.  An integer policy selects
    by position.
    """
    if not candidates:
        raise EmptyCandidates("no segmentation candidates to select from")
    if isinstance(policy, int):
        if not 0 <= policy < len(candidates):
            raise IndexError(
                f"candidate index {policy} out of range for {len(candidates)} candidates"
            )
        return candidates[policy].mask
    if policy == "highest_score":
        best = max(range(len(candidates)), key=lambda i: (candidates[i].score, -i))
        return candidates[best].mask
    if policy == "largest":
        best = max(range(len(candidates)), key=lambda i: (candidates[i].mask.area, -i))
        return candidates[best].mask
    raise ValueError(f"unknown selection policy {policy!r}")


def _composite_through_mask(original: Image, produced: Image, mask: Mask) -> Image:
    if (produced.width, produced.height) != (original.width, original.height):
        raise BackendFailure(
            f"backend returned {produced.width}x{produced.height} for a "
            f"{original.width}x{original.height} input"
        )
    out = original.pixels.copy()
    out[mask.bits] = produced.pixels[mask.bits]
    return Image(out)


class SafeSegmenter:
    """Enforces the segmentation contract around any :class:`Segmenter`."""

    def __init__(self, backend: Segmenter):
        self._backend = backend

    def segment(self, image: Image, clicks: ClickPrompt) -> list[SegmentationCandidate]:
        clicks.check_bounds(image.width, image.height)
        raw = self._backend.segment(image, clicks)
        kept = []
        for cand in raw:
            require_same_shape(image, cand.mask)
            if any(cand.mask.bits[p.y, p.x] for p in clicks.positives):
                kept.append(cand)
        if not kept:
            raise NoObjectFound("no candidate mask contains a positive click")
        kept.sort(key=lambda c: -c.score)
        return kept


class SafeInpainter:
    """Enforces mask validity and the outside-mask identity for inpainting."""

    def __init__(self, backend: Inpainter):
        self._backend = backend

    def inpaint(self, image: Image, mask: Mask) -> Image:
        require_same_shape(image, mask)
        if not mask.bits.any():
            raise EmptyMask("inpaint called with an empty mask")
        produced = self._backend.inpaint(image, mask)
        return _composite_through_mask(image, produced, mask)


class SafeGenerator:
    """Enforces prompt/mask validity and the outside-mask identity."""

    def __init__(self, backend: Generator):
        self._backend = backend

    def generate(self, image: Image, mask: Mask, prompt: str, seed: int) -> Image:
        require_same_shape(image, mask)
        if not mask.bits.any():
            raise EmptyMask("generate called with an empty mask")
        if not prompt or not prompt.strip():
            raise EmptyPrompt("generate called with an empty prompt")
        produced = self._backend.generate(image, mask, prompt, seed)
        return _composite_through_mask(image, produced, mask)


class _SerialProxy:
    """Routes every call on a serial backend through a single lock."""

    def __init__(self, target, lock: threading.Lock):
        self._target = target
        self._lock = lock

    def __getattr__(self, name):
        attr = getattr(self._target, name)
        if not callable(attr):
            return attr
        lock = self._lock

        def locked(*args, **kwargs):
            with lock:
                return attr(*args, **kwargs)

        return locked


@dataclass
class _Entry:
    descriptor: BackendDescriptor
    factory: object
    lock: threading.Lock = field(default_factory=threading.Lock)


class BackendRegistry:
    """Maps (role, id) to backend factories; ids are unique per role."""

    def __init__(self) -> None:
        self._entries: dict[tuple[BackendRole, str], _Entry] = {}

    def register(self, descriptor: BackendDescriptor, factory) -> None:
        key = (descriptor.role, descriptor.backend_id)
        if key in self._entries:
            raise ValueError(f"backend {descriptor.backend_id!r} already registered for {descriptor.role.value}")
        self._entries[key] = _Entry(descriptor, factory)

    def describe(self, role: BackendRole, backend_id: str) -> BackendDescriptor:
        return self._entry(role, backend_id).descriptor

    def ids(self, role: BackendRole) -> list[str]:
        return sorted(bid for (r, bid) in self._entries if r is role)

    def _entry(self, role: BackendRole, backend_id: str) -> _Entry:
        try:
            return self._entries[(role, backend_id)]
        except KeyError:
            raise BackendFailure(
                f"no {role.value} backend registered under id {backend_id!r}"
            ) from None

    def _instantiate(self, role: BackendRole, backend_id: str):
        entry = self._entry(role, backend_id)
        instance = entry.factory()
        if entry.descriptor.serial:
            instance = _SerialProxy(instance, entry.lock)
        return instance

    def segmenter(self, backend_id: str) -> SafeSegmenter:
        return SafeSegmenter(self._instantiate(BackendRole.SEGMENTER, backend_id))

    def inpainter(self, backend_id: str) -> SafeInpainter:
        return SafeInpainter(self._instantiate(BackendRole.INPAINTER, backend_id))

    def generator(self, backend_id: str) -> SafeGenerator:
        return SafeGenerator(self._instantiate(BackendRole.GENERATOR, backend_id))
