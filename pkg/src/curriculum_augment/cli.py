"""Command-line interface.

Every subcommand prints a JSON document on stdout describing what it did
(sampled boxes, colors, mixing ratios, reports) and sends human-readable
messages to stderr.  Exit codes: 0 ok, 1 I/O or decode error, 2 invalid
parameters or config, 3 an epoch aborted on too many failed samples.
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import replace

from . import imageio
from .augment import Rect, colorful_cutout, cutmix, cutout, mixup, sample_lambda
from .bench import run_bench
from .curriculum import CurriculumSchedule
from .exceptions import (
    ConfigError,
    CurriculumAugmentError,
    DecodeError,
    EpochAborted,
    InvalidParameterError,
    ManifestError,
    ShapeError,
)
from .grid import GridLayout, cell_origin, compose_grid
from .pipeline import (
    PAIRED_TECHNIQUES,
    TECHNIQUES,
    apply_technique,
    load_config,
    load_manifest,
    normalize_technique,
    run_all,
)
from .rng import RngStream, check_seed

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_PARTIAL = 0, 1, 2, 3
LOG_ENV = "CURRICULUM_AUGMENT_LOG"
CLI_TECHNIQUES = [t.replace("_", "-") for t in TECHNIQUES]


def _jsonable(value):
    if isinstance(value, Rect):
        return value.to_dict()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "tolist"):
        return value.tolist()
    return value


def emit(doc):
    sys.stdout.write(json.dumps(_jsonable(doc)) + "\n")
    sys.stdout.flush()


def _seed(text):
    try:
        return check_seed(int(text, 0))
    except (ValueError, InvalidParameterError) as exc:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}: {exc}") from None


def _count(minimum):
    def parse(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value
    return parse


def _add_schedule_args(p):
    p.add_argument("--box", type=_count(1), default=32, help="erasure box side in pixels (default 32)")
    p.add_argument("--base", type=_count(1), default=1, help="sub-regions at epoch 0")
    p.add_argument("--growth-factor", type=_count(1), default=2)
    p.add_argument("--max-regions", type=_count(1), default=256)


def _add_grid_args(p, columns=None):
    p.add_argument("--columns", type=_count(1), default=columns, help="grid columns")
    p.add_argument("--padding", type=_count(0), default=2, help="padding around each cell")


def _schedule(args):
    return CurriculumSchedule(args.base, args.growth_factor, args.max_regions, args.box)


def _preprocess(img, args):
    if getattr(args, "resize", None):
        img = imageio.resize_bilinear(img, args.resize, args.resize)
    if getattr(args, "crop", None):
        img = imageio.center_crop(img, args.crop)
    return img


def cmd_augment(args):
    technique = normalize_technique(args.technique)
    img = _preprocess(imageio.decode(args.input), args)
    other = None
    if technique in PAIRED_TECHNIQUES:
        if not args.mix_with:
            raise InvalidParameterError(f"{args.technique} needs --mix-with IMAGE")
        other = _preprocess(imageio.decode(args.mix_with), args)
    schedule = _schedule(args)
    n_regions = schedule.regions_for_epoch(args.epoch)
    out, label, info = apply_technique(
        technique, img, RngStream(args.seed),
        box=args.box, n_regions=n_regions, alpha=args.alpha, other=other, return_info=True,
    )
    imageio.encode_png(out, args.output)
    doc = {"command": "augment", "technique": technique, "seed": args.seed, "epoch": args.epoch,
           "width": out.shape[1], "height": out.shape[0], "output": os.fspath(args.output)}
    doc.update(info)
    if technique in PAIRED_TECHNIQUES:
        doc["label_weights"] = [float(label[0]), float(label[1])]
    emit(doc)
    return EXIT_OK


def preview_cells(img, epochs, schedule, seed):
    """One colorful-cutout cell per epoch, all from the same seed.

    The box is drawn first from the stream, so every cell shares it and only
    the subdivision changes from cell to cell.
    """
    cells, infos = [], []
    for epoch in range(epochs):
        out, info = colorful_cutout(img, schedule.box, epoch, RngStream(seed), schedule=schedule,
                                    return_info=True)
        cells.append(out)
        infos.append({"epoch": epoch, **info})
    return cells, infos


def _grid_doc(cells, layout):
    h, w = cells[0].shape[:2]
    return {
        "columns": layout.columns,
        "padding": layout.cell_padding,
        "cell_width": w,
        "cell_height": h,
        "origins": [list(cell_origin(i, w, h, layout)) for i in range(len(cells))],
    }


def cmd_preview(args):
    img = _preprocess(imageio.decode(args.input), args)
    schedule = _schedule(args)
    cells, infos = preview_cells(img, args.epochs, schedule, args.seed)
    layout = GridLayout(columns=args.columns or args.epochs, cell_padding=args.padding)
    grid = compose_grid(cells, layout)
    imageio.encode_png(grid, args.output)
    rects = {tuple(info["rect"]) for info in infos}
    emit({
        "command": "preview",
        "seed": args.seed,
        "rect": infos[0]["rect"] if len(rects) == 1 else None,
        "cells": infos,
        "grid": {**_grid_doc(cells, layout), "width": grid.shape[1], "height": grid.shape[0]},
        "output": os.fspath(args.output),
    })
    return EXIT_OK


def compare_cells(img_a, img_b, seed, box, epoch, alpha, schedule=None):
    """Original, cutout, mixup, cutmix and colorful cutout panels from one seed."""
    onehot_a, onehot_b = [1.0, 0.0], [0.0, 1.0]
    cut, cut_info = cutout(img_a, box, RngStream(seed), return_info=True)
    lam = sample_lambda(RngStream(seed), alpha)
    mixed, mix_label = mixup(img_a, img_b, onehot_a, onehot_b, lam)
    pasted, paste_label, paste_info = cutmix(img_a, img_b, onehot_a, onehot_b, box, RngStream(seed),
                                             return_info=True)
    colorful, colorful_info = colorful_cutout(img_a, box, epoch, RngStream(seed), schedule=schedule,
                                              return_info=True)
    cells = [img_a.copy(), cut, mixed, pasted, colorful]
    infos = [
        {"technique": "original"},
        {"technique": "cutout", **cut_info},
        {"technique": "mixup", "lambda": lam, "label_weights": mix_label.tolist()},
        {"technique": "cutmix", **paste_info, "label_weights": paste_label.tolist()},
        {"technique": "colorful_cutout", "epoch": epoch, **colorful_info},
    ]
    return cells, infos


def cmd_compare(args):
    img_a = _preprocess(imageio.decode(args.input_a), args)
    img_b = _preprocess(imageio.decode(args.input_b), args)
    if img_a.shape != img_b.shape:
        raise ShapeError(
            f"images differ in size after preprocessing ({img_a.shape[1]}x{img_a.shape[0]} vs "
            f"{img_b.shape[1]}x{img_b.shape[0]}); use --resize/--crop"
        )
    cells, infos = compare_cells(img_a, img_b, args.seed, args.box, args.epoch, args.alpha, _schedule(args))
    layout = GridLayout(columns=args.columns or len(cells), cell_padding=args.padding)
    grid = compose_grid(cells, layout)
    imageio.encode_png(grid, args.output)
    emit({
        "command": "compare",
        "seed": args.seed,
        "cells": infos,
        "grid": {**_grid_doc(cells, layout), "width": grid.shape[1], "height": grid.shape[0]},
        "output": os.fspath(args.output),
    })
    return EXIT_OK


def _report_row(r):
    return f"{r.epoch:>5}  {r.n_samples:>9}  {r.n_regions_used:>9}  {r.wall_time:>9.3f}  {r.throughput:>10.1f}  {len(r.failures):>8}"


def cmd_run(args):
    config = load_config(args.config)
    overrides = {}
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.output_dir is not None:
        overrides["output_dir"] = args.output_dir
    if overrides:
        config = replace(config, **overrides)
    manifest = load_manifest(args.manifest, n_classes=args.classes, root=args.root)
    print(f"{'epoch':>5}  {'samples':>9}  {'regions':>9}  {'wall (s)':>9}  {'img/s':>10}  {'failures':>8}",
          file=sys.stderr)
    reports = run_all(manifest, config, on_report=lambda r: print(_report_row(r), file=sys.stderr))
    emit({
        "command": "run",
        "output_dir": config.output_dir,
        "summary": os.path.join(config.output_dir, "summary.json"),
        "epochs": [r.to_dict() for r in reports],
    })
    return EXIT_OK


def cmd_bench(args):
    result = run_bench(
        args.technique,
        size=args.size,
        iterations=args.iterations,
        workers=args.workers,
        seed=args.seed,
        box=args.box,
        epoch=args.epoch,
        curriculum_epochs=args.curriculum_epochs,
        alpha=args.alpha,
    )
    emit({"command": "bench", **result})
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="curriculum-augment",
        description="Curriculum colorful cutout and baseline image augmentations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("augment", help="augment a single image")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--technique", choices=CLI_TECHNIQUES, default="colorful-cutout")
    p.add_argument("--epoch", type=_count(0), default=0)
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--mix-with", help="second image for mixup/cutmix")
    p.add_argument("--resize", type=_count(1), help="resize to N x N first")
    p.add_argument("--crop", type=_count(1), help="center-crop to N x N first")
    _add_schedule_args(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("preview", help="curriculum progression grid, one cell per epoch")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--epochs", type=_count(1), default=5)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--resize", type=_count(1))
    p.add_argument("--crop", type=_count(1))
    _add_schedule_args(p)
    _add_grid_args(p)
    p.set_defaults(func=cmd_preview)

    p = sub.add_parser("compare", help="original / cutout / mixup / cutmix / colorful cutout grid")
    p.add_argument("input_a")
    p.add_argument("input_b")
    p.add_argument("output")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--epoch", type=_count(0), default=2, help="epoch for the colorful cutout panel")
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--resize", type=_count(1))
    p.add_argument("--crop", type=_count(1))
    _add_schedule_args(p)
    _add_grid_args(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("run", help="augment a dataset manifest over all epochs")
    p.add_argument("config", help="JSON run configuration")
    p.add_argument("--manifest", required=True, help="CSV manifest (path,label)")
    p.add_argument("--classes", type=_count(2), help="class count, overriding '#classes='")
    p.add_argument("--root", help="directory manifest paths are relative to")
    p.add_argument("--workers", type=_count(1))
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="time a technique on synthetic images")
    p.add_argument("--technique", choices=CLI_TECHNIQUES, default="colorful-cutout")
    p.add_argument("--size", type=_count(1), default=224)
    p.add_argument("--iterations", type=_count(1), default=10000)
    p.add_argument("--workers", type=_count(1), default=1)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--box", type=_count(1), default=32)
    p.add_argument("--epoch", type=_count(0), default=0)
    p.add_argument("--curriculum-epochs", type=_count(1), default=1,
                   help="cycle epochs epoch..epoch+N-1 across iterations")
    p.add_argument("--alpha", type=float, default=0.2)
    p.set_defaults(func=cmd_bench)
    return parser


def _configure_logging():
    level = os.environ.get(LOG_ENV, "error").strip().upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv=None):
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EpochAborted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    except (ConfigError, ManifestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidParameterError, ShapeError, CurriculumAugmentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
