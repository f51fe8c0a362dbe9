"""Offline, epoch-by-epoch dataset augmentation.

Every sample draws from its own :class:`RngStream` seeded by
``derive_seed(master_seed, epoch, index)``, so the bytes written are a pure
function of the manifest and the config: running with one worker or eight
gives the same output tree.

Within a sample, random draws happen in this order: mixup/cutmix partner
index, crop offsets of the sample, crop offsets of the partner, then the
technique's own draws.
"""

import csv
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path, PurePosixPath

import jsonschema

from . import imageio
from .augment import colorful_cutout_regions, cutmix, cutout, mixup, sample_lambda, smooth_labels
from .curriculum import CurriculumSchedule
from .exceptions import ConfigError, EpochAborted, InvalidParameterError, ManifestError
from .rng import RngStream, derive_seed

logger = logging.getLogger(__name__)

TECHNIQUES = ("baseline", "cutout", "colorful_cutout", "mixup", "cutmix")
PAIRED_TECHNIQUES = ("mixup", "cutmix")
MAX_FAILURE_FRACTION = 0.10
LABEL_DIGITS = 9


def normalize_technique(name):
    """Accept CLI spellings (``colorful-cutout``) as well as config ones."""
    key = str(name).strip().lower().replace("-", "_")
    if key not in TECHNIQUES:
        raise InvalidParameterError(f"unknown technique {name!r}; expected one of {', '.join(TECHNIQUES)}")
    return key


@dataclass(frozen=True)
class ManifestEntry:
    relative_path: str
    class_index: int


@dataclass
class DatasetManifest:
    entries: list
    n_classes: int
    root: Path

    def __len__(self):
        return len(self.entries)

    def path_of(self, index):
        return self.root / self.entries[index].relative_path


def _check_relative(raw, line):
    if not raw:
        raise ManifestError("empty path", line=line)
    path = PurePosixPath(raw.replace("\\", "/"))
    if path.is_absolute() or (len(raw) > 1 and raw[1] == ":"):
        raise ManifestError(f"path {raw!r} must be relative to the manifest root", line=line)
    depth = 0
    for part in path.parts:
        depth += -1 if part == ".." else (0 if part == "." else 1)
        if depth < 0:
            raise ManifestError(f"path {raw!r} escapes the manifest root", line=line)
    return str(path)


def load_manifest(path, n_classes=None, root=None):
    """Parse a ``path,label`` CSV manifest.

    The class count comes from ``n_classes`` if given, otherwise from a
    ``#classes=<K>`` first line.  Paths are resolved against ``root``
    (default: the manifest's directory).
    """
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    line_no = 0
    declared = None
    if lines and lines[0].startswith("#"):
        directive = lines[0][1:].strip()
        key, _, value = directive.partition("=")
        if key.strip() != "classes":
            raise ManifestError(f"unknown directive {lines[0]!r}", line=1)
        try:
            declared = int(value)
        except ValueError:
            raise ManifestError(f"bad class count {value.strip()!r}", line=1) from None
        line_no = 1
    if n_classes is None:
        n_classes = declared
    if n_classes is None:
        raise ManifestError("class count missing: add a '#classes=<K>' first line or pass it explicitly")
    if n_classes < 2:
        raise ManifestError(f"class count must be >= 2, got {n_classes}")
    if line_no >= len(lines) or [c.strip() for c in lines[line_no].split(",")] != ["path", "label"]:
        raise ManifestError("missing 'path,label' header", line=line_no + 1)

    entries = []
    seen = {}
    for offset, row in enumerate(csv.reader(lines[line_no + 1:]), start=line_no + 2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise ManifestError(f"expected 2 fields, got {len(row)}", line=offset)
        rel = _check_relative(row[0].strip(), offset)
        try:
            label = int(row[1])
        except ValueError:
            raise ManifestError(f"label {row[1]!r} is not an integer", line=offset) from None
        if not 0 <= label < n_classes:
            raise ManifestError(f"label {label} out of range [0, {n_classes})", line=offset)
        if rel in seen:
            logger.warning("%s:%d: duplicate path %r (first on line %d), keeping both", path, offset, rel, seen[rel])
        else:
            seen[rel] = offset
        entries.append(ManifestEntry(rel, label))
    if not entries:
        raise ManifestError("manifest has no entries")
    return DatasetManifest(entries, n_classes, Path(root) if root is not None else path.parent)


def write_manifest(manifest, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"#classes={manifest.n_classes}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["path", "label"])
        for entry in manifest.entries:
            writer.writerow([entry.relative_path, entry.class_index])


@dataclass(frozen=True)
class Preprocessing:
    resize_to: int = 256
    crop_to: int = 224
    crop_mode: str = "random"


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a run; defaults are the reference training setup."""

    technique: str = "colorful_cutout"
    schedule: CurriculumSchedule = field(default_factory=CurriculumSchedule)
    alpha: float = 0.2
    epochs: int = 5
    master_seed: int = 0
    preprocessing: Preprocessing = field(default_factory=Preprocessing)
    workers: int = 1
    output_dir: str = "augmented"
    smoothing: float = 0.05

    def to_dict(self):
        return asdict(self)


_POS_INT = {"type": "integer", "minimum": 1}
CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "technique": {"type": "string"},
        "schedule": {
            "type": "object",
            "additionalProperties": False,
            "properties": {name: _POS_INT for name in ("base", "growth_factor", "max_regions", "box")},
        },
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "epochs": _POS_INT,
        "master_seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "preprocessing": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "resize_to": {"type": ["integer", "null"], "minimum": 1},
                "crop_to": {"type": ["integer", "null"], "minimum": 1},
                "crop_mode": {"enum": ["random", "center"]},
            },
        },
        "workers": _POS_INT,
        "output_dir": {"type": "string", "minLength": 1},
        "smoothing": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
    },
}


def _pointer(parts):
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in parts)


def config_from_dict(data):
    """Build a :class:`RunConfig`, raising :class:`ConfigError` with a JSON pointer."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    error = jsonschema.exceptions.best_match(validator.iter_errors(data))
    if error is not None:
        parts = list(error.absolute_path)
        if error.validator == "additionalProperties":
            extra = sorted(set(error.instance) - set(error.schema.get("properties", {})))
            parts.append(extra[0] if extra else "")
        raise ConfigError(error.message, _pointer(parts))
    data = dict(data)
    try:
        technique = normalize_technique(data.get("technique", RunConfig.technique))
    except InvalidParameterError as exc:
        raise ConfigError(str(exc), "/technique") from None
    try:
        schedule = CurriculumSchedule(**data.get("schedule", {}))
    except InvalidParameterError as exc:
        raise ConfigError(str(exc), "/schedule") from None
    pre = Preprocessing(**data.get("preprocessing", {}))
    if pre.crop_to is not None and pre.resize_to is not None and pre.crop_to > pre.resize_to:
        raise ConfigError(f"crop_to {pre.crop_to} exceeds resize_to {pre.resize_to}", "/preprocessing/crop_to")
    data.update(technique=technique, schedule=schedule, preprocessing=pre)
    return RunConfig(**data)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
    return config_from_dict(data)


@dataclass
class EpochReport:
    epoch: int
    n_samples: int
    n_regions_used: int
    wall_time: float
    throughput: float
    failures: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def regions_used(config, epoch):
    if config.technique == "colorful_cutout":
        return config.schedule.regions_for_epoch(epoch)
    if config.technique in ("cutout", "cutmix"):
        return 1
    return 0


def output_names(manifest):
    """Output file name (relative, POSIX) for each manifest entry.

    The source extension becomes ``.png``; entries that would collide get a
    ``__<index>`` suffix so no file is written twice.
    """
    names = []
    taken = set()
    for index, entry in enumerate(manifest.entries):
        name = str(PurePosixPath(entry.relative_path).with_suffix(".png"))
        if name in taken:
            name = str(PurePosixPath(name).with_name(f"{PurePosixPath(name).stem}__{index}.png"))
        taken.add(name)
        names.append(name)
    return names


def preprocess(img, pre, rng):
    if pre.resize_to is not None:
        img = imageio.resize_bilinear(img, pre.resize_to, pre.resize_to)
    if pre.crop_to is not None:
        if pre.crop_mode == "random":
            img = imageio.random_crop(img, pre.crop_to, rng)
        else:
            img = imageio.center_crop(img, pre.crop_to)
    return img


def apply_technique(technique, img, rng, *, box=32, n_regions=1, alpha=0.2,
                    label=None, other=None, other_label=None, return_info=False):
    """Apply one named technique to an already preprocessed image.

    Returns ``(image, label, info)``; ``label`` is mixed for mixup/cutmix and
    passed through otherwise.  ``info`` is ``None`` unless ``return_info``.
    """
    technique = normalize_technique(technique)
    info = None
    if technique == "baseline":
        out = img.copy()
        info = {}
    elif technique == "cutout":
        result = cutout(img, box, rng, return_info=return_info)
        out, info = result if return_info else (result, None)
    elif technique == "colorful_cutout":
        result = colorful_cutout_regions(img, box, n_regions, rng, return_info=return_info)
        out, info = result if return_info else (result, None)
    else:
        if other is None:
            raise InvalidParameterError(f"{technique} needs a second image")
        if label is None:
            label, other_label = [1.0, 0.0], [0.0, 1.0]
        if technique == "mixup":
            lam = sample_lambda(rng, alpha)
            out, label = mixup(img, other, label, other_label, lam)
            info = {"lambda": lam}
        elif return_info:
            out, label, info = cutmix(img, other, label, other_label, box, rng, return_info=True)
        else:
            out, label = cutmix(img, other, label, other_label, box, rng)
    return out, label, (info if return_info else None)


def augment_sample(manifest, config, epoch, index):
    """Augmented image and soft label for one sample (no file output)."""
    rng = RngStream(derive_seed(config.master_seed, epoch, index))
    entry = manifest.entries[index]
    n_classes = manifest.n_classes
    technique = config.technique
    paired = technique in PAIRED_TECHNIQUES
    partner = rng.integers(len(manifest)) if paired else None

    img = preprocess(imageio.decode(manifest.path_of(index)), config.preprocessing, rng)
    label = smooth_labels(entry.class_index, n_classes, config.smoothing)
    other = other_label = None
    if paired:
        other = preprocess(imageio.decode(manifest.path_of(partner)), config.preprocessing, rng)
        other_label = smooth_labels(manifest.entries[partner].class_index, n_classes, config.smoothing)
    out, label, _ = apply_technique(
        technique, img, rng,
        box=config.schedule.box,
        n_regions=regions_used(config, epoch) or 1,
        alpha=config.alpha,
        label=label, other=other, other_label=other_label,
    )
    return out, label


# Per-process job context, installed by _init_worker (or directly when serial).
_JOB = {}


def _init_worker(manifest, config, names, output_dir):
    _JOB.update(manifest=manifest, config=config, names=names, output_dir=output_dir)


def _process_sample(task):
    epoch, index = task
    try:
        img, label = augment_sample(_JOB["manifest"], _JOB["config"], epoch, index)
        target = Path(_JOB["output_dir"]) / f"epoch_{epoch}" / _JOB["names"][index]
        imageio.encode_png(img, target)
        return index, label.tolist(), None
    except Exception as exc:  # any sample failure is recorded, not fatal
        return index, None, f"{type(exc).__name__}: {exc}"


def _write_labels(path, names, results, n_classes):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["filename"] + [f"p{k}" for k in range(n_classes)])
    for index, label, _ in results:
        if label is not None:
            writer.writerow([names[index]] + [f"{p:.{LABEL_DIGITS}g}" for p in label])
    path.write_text(buf.getvalue(), encoding="utf-8")


class _SerialExecutor:
    def __init__(self, manifest, config, names, output_dir):
        _init_worker(manifest, config, names, output_dir)

    def map(self, fn, tasks, chunksize=1):
        return map(fn, tasks)

    def shutdown(self, wait=True):
        _JOB.clear()


def _make_executor(manifest, config, names, output_dir):
    if config.workers == 1:
        return _SerialExecutor(manifest, config, names, output_dir)
    return ProcessPoolExecutor(
        max_workers=config.workers,
        initializer=_init_worker,
        initargs=(manifest, config, names, os.fspath(output_dir)),
    )


def _run_epoch(executor, manifest, config, names, output_dir, epoch):
    n = len(manifest)
    epoch_dir = Path(output_dir) / f"epoch_{epoch}"
    epoch_dir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    chunksize = max(1, math.ceil(n / (config.workers * 8)))
    results = sorted(executor.map(_process_sample, [(epoch, i) for i in range(n)], chunksize=chunksize))
    _write_labels(epoch_dir / "labels.csv", names, results, manifest.n_classes)
    wall = time.perf_counter() - start

    failures = [
        {"index": i, "path": manifest.entries[i].relative_path, "error": err}
        for i, _, err in results
        if err is not None
    ]
    n_ok = n - len(failures)
    report = EpochReport(
        epoch=epoch,
        n_samples=n_ok,
        n_regions_used=regions_used(config, epoch),
        wall_time=wall,
        throughput=n_ok / wall if wall > 0 else float("inf"),
        failures=failures,
    )
    for failure in failures:
        logger.warning("epoch %d sample %d (%s) failed: %s", epoch, failure["index"], failure["path"], failure["error"])
    if len(failures) > MAX_FAILURE_FRACTION * n:
        raise EpochAborted(f"epoch {epoch}: {len(failures)} of {n} samples failed", report)
    return report


def run_epoch(manifest, config, epoch, output_dir=None):
    """Augment every sample of ``manifest`` for one epoch and write the results.

    Images go to ``<output_dir>/epoch_<epoch>/`` with a ``labels.csv`` of
    soft labels.  Failed samples are skipped and listed in the report; more
    than 10% failures raises :class:`EpochAborted`.
    """
    if epoch < 0:
        raise InvalidParameterError(f"epoch must be >= 0, got {epoch}")
    output_dir = Path(output_dir if output_dir is not None else config.output_dir)
    names = output_names(manifest)
    executor = _make_executor(manifest, config, names, output_dir)
    try:
        return _run_epoch(executor, manifest, config, names, output_dir, epoch)
    finally:
        executor.shutdown()


def run_all(manifest, config, output_dir=None, on_report=None):
    """Run epochs ``0 .. config.epochs - 1`` and write ``summary.json``.

    ``on_report`` is called with each :class:`EpochReport` as it completes.
    """
    output_dir = Path(output_dir if output_dir is not None else config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    names = output_names(manifest)
    reports = []
    executor = _make_executor(manifest, config, names, output_dir)
    try:
        for epoch in range(config.epochs):
            try:
                report = _run_epoch(executor, manifest, config, names, output_dir, epoch)
            except EpochAborted as exc:
                reports.append(exc.report)
                write_summary(output_dir, manifest, config, reports, aborted=True)
                raise
            reports.append(report)
            if on_report is not None:
                on_report(report)
    finally:
        executor.shutdown()
    write_summary(output_dir, manifest, config, reports)
    return reports


def write_summary(output_dir, manifest, config, reports, aborted=False):
    summary = {
        "config": config.to_dict(),
        "n_classes": manifest.n_classes,
        "n_entries": len(manifest),
        "aborted": aborted,
        "epochs": [r.to_dict() for r in reports],
    }
    path = Path(output_dir) / "summary.json"
    path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return path

