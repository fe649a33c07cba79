"""Batch command-line entry point mirroring the service semantics.

Subcommands:

* ``run``      execute one edit headlessly and write the output files
* ``compare``  bit-compare two images over a mask region (test harness aid)
* ``serve``    start the HTTP service

Exit codes for ``run``: 0 success, 2 usage error, 3 pipeline error (the
typed error name is printed).  ``compare`` exits 0 when identical over the
chosen region, 1 when a difference is found, 2 on dimension mismatch or
unreadable inputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import codec, service
from .backends import BackendRegistry, DEFAULT_REGISTRY, register_remote
from .errors import BadMask, DecodeError, InpaintKitError
from .model import ClickPoint, ClickPrompt, Mask, Mode, PipelineConfig, PointLabel
from .pipeline import run_pipeline

USAGE_ERROR = 2
PIPELINE_ERROR = 3


def _point(text: str) -> tuple[int, int]:
    try:
        x, y = text.split(",")
        return int(x), int(y)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inpaintkit")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one edit and write the result")
    run.add_argument("--input", required=True, help="input PNG or JPEG")
    run.add_argument("--mode", required=True, choices=[m.value for m in Mode])
    run.add_argument(
        "--point",
        action="append",
        type=_point,
        default=[],
        metavar="X,Y",
        help="positive click; repeatable",
    )
    run.add_argument(
        "--neg-point",
        action="append",
        type=_point,
        default=[],
        metavar="X,Y",
        help="negative click; repeatable",
    )
    run.add_argument("--prompt", help="text prompt (fill/replace)")
    run.add_argument("--mask-in", help="object mask PNG; bypasses segmentation")
    run.add_argument("--dilate-radius", type=int, help="override the mode's dilation radius")
    run.add_argument("--open-radius", type=int, default=0)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--backend", choices=["mock", "remote"], default="mock")
    run.add_argument("--remote-url", help="base URL of a remote backend worker")
    run.add_argument("--output", help="output image path (default: <input>.<mode>.png)")
    run.add_argument("--mask-out", help="write the final edit mask PNG here")
    run.add_argument(
        "--json",
        nargs="?",
        const="-",
        metavar="PATH",
        help="emit a machine-readable run report to stdout or PATH",
    )

    compare = sub.add_parser("compare", help="bit-compare two images over a mask region")
    compare.add_argument("--a", required=True)
    compare.add_argument("--b", required=True)
    compare.add_argument("--mask", required=True)
    compare.add_argument("--region", required=True, choices=["inside", "outside"])

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--config", help="path to JSON config file")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)
    serve.add_argument("--workers", type=int)
    serve.add_argument("--ui-dir")

    return parser


def _load_image(path: str):
    try:
        return codec.decode_image(Path(path).read_bytes())
    except OSError as exc:
        raise DecodeError(f"cannot read {path}: {exc}") from exc


def _load_mask(path: str, width: int, height: int) -> Mask:
    try:
        mask = codec.decode_mask(Path(path).read_bytes())
    except OSError as exc:
        raise BadMask(f"cannot read {path}: {exc}") from exc
    if (mask.width, mask.height) != (width, height):
        raise BadMask(
            f"mask {mask.width}x{mask.height} does not match image {width}x{height}"
        )
    return mask


def _build_config(args: argparse.Namespace, mode: Mode) -> PipelineConfig:
    values = dict(mode=mode, seed=args.seed, open_radius=args.open_radius)
    if args.backend == "remote":
        values.update(segmenter_id="remote", inpainter_id="remote", generator_id="remote")
    if args.dilate_radius is not None:
        if mode is Mode.REMOVE:
            values["dilate_radius_remove"] = args.dilate_radius
        elif mode is Mode.FILL:
            # Pin the fill dilation to exactly the requested radius.
            values["dilate_radius_fill_min"] = args.dilate_radius
            values["dilate_fraction_fill"] = 0.0
        else:
            print("note: --dilate-radius has no effect in replace mode", file=sys.stderr)
    return PipelineConfig(**values)


def _registry(args: argparse.Namespace) -> BackendRegistry:
    if args.backend == "remote":
        if not args.remote_url:
            raise _UsageError("--backend remote requires --remote-url")
        registry = BackendRegistry()
        register_remote(registry, args.remote_url)
        return registry
    return DEFAULT_REGISTRY


class _UsageError(Exception):
    pass


def _window_view(result) -> dict:
    window = result.window
    return {
        "x0": window.x0,
        "y0": window.y0,
        "side_w": window.side_w,
        "side_h": window.side_h,
        "working_w": window.working_w,
        "working_h": window.working_h,
        "scale": str(window.scale),
    }


def cmd_run(args: argparse.Namespace) -> int:
    mode = Mode(args.mode)
    try:
        if mode in (Mode.FILL, Mode.REPLACE) and not (args.prompt or "").strip():
            raise _UsageError(f"--mode {mode.value} requires --prompt")
        if not args.point and not args.mask_in:
            raise _UsageError("provide at least one --point or a --mask-in")
        registry = _registry(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR

    try:
        image = _load_image(args.input)
        object_mask = None
        clicks = None
        if args.mask_in:
            object_mask = _load_mask(args.mask_in, image.width, image.height)
        else:
            points = [ClickPoint(x, y, PointLabel.POSITIVE) for x, y in args.point]
            points += [ClickPoint(x, y, PointLabel.NEGATIVE) for x, y in args.neg_point]
            clicks = ClickPrompt(tuple(points))
            clicks.check_bounds(image.width, image.height)

        config = _build_config(args, mode)
        result = run_pipeline(
            image,
            clicks,
            args.prompt,
            config,
            registry=registry,
            object_mask=object_mask,
        )
    except InpaintKitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return PIPELINE_ERROR

    output_path = Path(args.output) if args.output else Path(f"{args.input}.{mode.value}.png")
    output_path.write_bytes(codec.encode_image_png(result.output))
    if args.mask_out:
        Path(args.mask_out).write_bytes(codec.encode_mask_png(result.edit_mask))

    if args.json is not None:
        config_view = dataclasses.asdict(config)
        config_view["mode"] = config.mode.value
        report = {
            "mode": mode.value,
            "input": args.input,
            "output": str(output_path),
            "mask_out": args.mask_out,
            "seed": args.seed,
            "config": config_view,
            "object_area": result.object_mask.area,
            "mask_area": result.edit_mask.area,
            "window": _window_view(result),
            "timings_ms": result.timings_ms,
        }
        text = json.dumps(report, indent=2, sort_keys=True)
        if args.json == "-":
            print(text)
        else:
            Path(args.json).write_text(text + "\n")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    try:
        a = _load_image(args.a)
        b = _load_image(args.b)
        mask = codec.decode_mask(Path(args.mask).read_bytes())
    except (InpaintKitError, OSError) as exc:
        print(f"compare error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if (a.width, a.height) != (b.width, b.height) or not mask.same_shape_as(a):
        print(
            f"dimension mismatch: a={a.width}x{a.height} b={b.width}x{b.height} "
            f"mask={mask.width}x{mask.height}",
            file=sys.stderr,
        )
        return USAGE_ERROR

    region = mask.bits if args.region == "inside" else ~mask.bits
    diff = (a.pixels != b.pixels).any(axis=2) & region
    if not diff.any():
        print(f"identical over {args.region} region ({int(region.sum())} pixels)")
        return 0
    ys, xs = np.nonzero(diff)
    y, x = int(ys[0]), int(xs[0])
    print(
        f"first difference at ({x}, {y}): "
        f"a={tuple(int(v) for v in a.pixels[y, x])} "
        f"b={tuple(int(v) for v in b.pixels[y, x])}"
    )
    return 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "compare":
        return cmd_compare(args)
    if args.command == "serve":
        serve_args = []
        for key in ("config", "host", "port", "workers", "ui_dir"):
            value = getattr(args, key)
            if value is not None:
                serve_args += [f"--{key.replace('_', '-')}", str(value)]
        service.main(serve_args)
        return 0
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
