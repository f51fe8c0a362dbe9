"""Curriculum colorful cutout and baseline image augmentations.

Images are ``(height, width, 3)`` uint8 numpy arrays throughout.
"""

from .augment import (
    Rect,
    colorful_cutout,
    colorful_cutout_regions,
    cutmix,
    cutout,
    mixup,
    random_color,
    random_colors,
    sample_box,
    sample_lambda,
    smooth_labels,
    subdivide,
)
from .curriculum import CurriculumSchedule, DifficultyParams, params_for_epoch, regions_for_epoch
from .estimators import ColorfulCutout, CutMix, Cutout, LabelSmoother, Mixup, Preprocessor
from .exceptions import (
    ConfigError,
    CurriculumAugmentError,
    DecodeError,
    EpochAborted,
    InvalidParameterError,
    ManifestError,
    ShapeError,
)
from .rng import RngStream, derive_seed

__version__ = "0.1.0"

__all__ = [
    "ColorfulCutout",
    "ConfigError",
    "CurriculumAugmentError",
    "CurriculumSchedule",
    "CutMix",
    "Cutout",
    "DecodeError",
    "DifficultyParams",
    "EpochAborted",
    "InvalidParameterError",
    "LabelSmoother",
    "ManifestError",
    "Mixup",
    "Preprocessor",
    "Rect",
    "RngStream",
    "ShapeError",
    "colorful_cutout",
    "colorful_cutout_regions",
    "cutmix",
    "cutout",
    "derive_seed",
    "mixup",
    "params_for_epoch",
    "random_color",
    "random_colors",
    "regions_for_epoch",
    "sample_box",
    "sample_lambda",
    "smooth_labels",
    "subdivide",
]
