"""Colorful cutout and the baseline augmentations it is compared against.

All functions are pure: they take ``(H, W, 3)`` uint8 images, never modify
their inputs and draw every random decision from the :class:`RngStream`
passed in.  Random draws happen in a fixed order (box x, box y, then fill
colors in sub-region order) so results are reproducible from a seed.
"""

import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .curriculum import CurriculumSchedule, bisection_fits, is_power_of_two
from .exceptions import InvalidParameterError
from .rng import as_stream
from .validation import check_image, check_same_shape, check_soft_label

BLACK = (0, 0, 0)


class Rect(NamedTuple):
    """Integer pixel rectangle; ``(x, y)`` is the top-left corner."""

    x: int
    y: int
    w: int
    h: int

    @property
    def area(self):
        return self.w * self.h

    @property
    def slices(self):
        """``(rows, cols)`` slices selecting this rectangle from an image array."""
        return slice(self.y, self.y + self.h), slice(self.x, self.x + self.w)

    def fits_in(self, width, height):
        return self.x >= 0 and self.y >= 0 and self.x + self.w <= width and self.y + self.h <= height

    def to_dict(self):
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}


def _check_box(box, width, height):
    if isinstance(box, bool) or not isinstance(box, (int, np.integer)) or box < 1:
        raise InvalidParameterError(f"box must be a positive integer, got {box!r}")
    if box > width or box > height:
        raise InvalidParameterError(f"box exceeds image: {box}px box on a {width}x{height} image")
    return int(box)


def sample_box(rng, image_w, image_h, box):
    """Place a ``box x box`` square uniformly, fully inside the image."""
    box = _check_box(box, image_w, image_h)
    rng = as_stream(rng)
    x = rng.integers(image_w - box + 1)
    y = rng.integers(image_h - box + 1)
    return Rect(x, y, box, box)


def _bisect(length, levels):
    # larger half first; every extent must stay >= 1 pixel
    if levels == 0:
        return [length]
    if length < 2:
        raise InvalidParameterError("bisection would split a one-pixel extent")
    return _bisect((length + 1) // 2, levels - 1) + _bisect(length // 2, levels - 1)


@lru_cache(maxsize=512)
def _grid(width, height, n_regions):
    """Column widths and row heights of the bisection grid."""
    if not is_power_of_two(n_regions):
        raise InvalidParameterError(f"n_regions must be a power of two >= 1, got {n_regions}")
    if n_regions > width * height:
        raise InvalidParameterError(
            f"{n_regions} sub-regions do not fit in a {width}x{height} box"
        )
    if not bisection_fits(n_regions, width, height):
        raise InvalidParameterError(
            f"a {width}x{height} box cannot be bisected into {n_regions} sub-regions"
        )
    k = n_regions.bit_length() - 1
    return tuple(_bisect(width, (k + 1) // 2)), tuple(_bisect(height, k // 2))


@lru_cache(maxsize=512)
def _region_index_map(width, height, n_regions):
    widths, heights = _grid(width, height, n_regions)
    cols = np.repeat(np.arange(len(widths)), widths)
    rows = np.repeat(np.arange(len(heights)), heights)
    index = rows[:, None] * len(widths) + cols[None, :]
    index.setflags(write=False)
    return index


def subdivide(box, n_regions):
    """Split ``box`` into ``n_regions`` tiles by alternating bisection.

    The first cut is vertical, the next horizontal, and so on; odd extents
    split with the larger half on the left/top.  Tiles come back in
    row-major order, which is also the order fill colors are assigned in.
    """
    if isinstance(n_regions, bool) or not isinstance(n_regions, (int, np.integer)):
        raise InvalidParameterError(f"n_regions must be an integer, got {n_regions!r}")
    widths, heights = _grid(box.w, box.h, int(n_regions))
    xs = np.concatenate(([0], np.cumsum(widths)[:-1])) + box.x
    ys = np.concatenate(([0], np.cumsum(heights)[:-1])) + box.y
    return [
        Rect(int(x), int(y), w, h)
        for y, h in zip(ys, heights)
        for x, w in zip(xs, widths)
    ]


def random_color(rng):
    """One color with each channel uniform over ``[0, 255]``."""
    r, g, b = as_stream(rng).bytes(3)
    return int(r), int(g), int(b)


def random_colors(rng, n):
    """``(n, 3)`` uint8 array of independent uniform colors."""
    return as_stream(rng).bytes(3 * n).reshape(n, 3)


def _paint(out, rect, colors):
    if len(colors) == 1:
        out[rect.slices] = colors[0]
        return
    # gather whole pixels as 3-byte items; out is a fresh contiguous copy
    pixels = np.ascontiguousarray(colors).view("V3")[:, 0]
    index = _region_index_map(rect.w, rect.h, len(colors))
    out.view("V3")[..., 0][rect.slices] = pixels.take(index)


def _colorful_cutout(img, box, n_regions, rng, fill, return_info):
    height, width = img.shape[:2]
    rng = as_stream(rng)
    rect = sample_box(rng, width, height, box)
    _grid(rect.w, rect.h, n_regions)
    out = img.copy()
    if fill is None:
        colors = random_colors(rng, n_regions)
        _paint(out, rect, colors)
        colors = colors.tolist()
    else:
        # a pinned color makes the whole box one block whatever the split
        out[rect.slices] = fill
        colors = [list(fill)] * n_regions
    if not return_info:
        return out
    info = {
        "rect": rect,
        "n_regions": n_regions,
        "regions": subdivide(rect, n_regions),
        "colors": colors,
    }
    return out, info


def colorful_cutout_regions(img, box, n_regions, rng, fill=None, return_info=False):
    """Colorful cutout with an explicit sub-region count.

    ``fill`` pins every sub-region to one color instead of drawing random
    ones; ``fill=BLACK`` with ``n_regions=1`` is plain cutout.
    """
    return _colorful_cutout(check_image(img), box, n_regions, rng, fill, return_info)


@lru_cache(maxsize=1024)
def _scheduled_regions(schedule, box, epoch):
    if schedule is None:
        schedule = CurriculumSchedule(box=box)
    elif schedule.box != box:
        schedule = CurriculumSchedule(schedule.base, schedule.growth_factor, schedule.max_regions, box)
    return schedule.regions_for_epoch(epoch)


def colorful_cutout(img, box, n_epoch, rng, schedule=None, return_info=False):
    """Fill a random ``box x box`` patch with randomly colored sub-regions.

    The number of sub-regions grows with ``n_epoch`` following ``schedule``
    (default: ``2 ** n_epoch``, clamped to what the box can hold).  Pixels
    outside the patch are copied unchanged.

    Parameters
    ----------
    img : ndarray of shape (H, W, 3), uint8
    box : int
        Side of the square erasure box.
    n_epoch : int
        Zero-based training epoch.
    rng : RngStream or int
    schedule : CurriculumSchedule, optional
        Its ``box`` field is replaced by ``box``.
    return_info : bool
        Also return a dict with the sampled ``rect``, the ``regions`` and
        their ``colors``.
    """
    img = check_image(img)
    box = _check_box(box, img.shape[1], img.shape[0])
    n_regions = _scheduled_regions(schedule, box, n_epoch)
    return _colorful_cutout(img, box, n_regions, rng, None, return_info)


def cutout(img, box, rng, return_info=False):
    """Zero out a random ``box x box`` square."""
    return _colorful_cutout(check_image(img), box, 1, rng, BLACK, return_info)


def _gamma_log_variate(rng, shape):
    """Log of a Gamma(shape, 1) draw (Marsaglia-Tsang).

    Shapes below one are boosted: G(a) = G(a + 1) * U**(1/a).  Working in
    log space keeps tiny draws at small ``shape`` from underflowing.
    """
    if shape < 1.0:
        return _gamma_log_variate(rng, shape + 1.0) + math.log(rng.uniform_open()) / shape
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = rng.normal()
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = rng.uniform_open()
        if u < 1.0 - 0.0331 * x ** 4 or math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
            return math.log(d * v)


def sample_lambda(rng, alpha):
    """Draw a mixing ratio from Beta(alpha, alpha)."""
    if not alpha > 0 or not math.isfinite(alpha):
        raise InvalidParameterError(f"alpha must be positive, got {alpha!r}")
    rng = as_stream(rng)
    log_x = _gamma_log_variate(rng, alpha)
    log_y = _gamma_log_variate(rng, alpha)
    # x / (x + y) without exponentiating either draw on its own
    if log_x >= log_y:
        return 1.0 / (1.0 + math.exp(log_y - log_x))
    t = math.exp(log_x - log_y)
    return t / (1.0 + t)


def _mix_labels(label_a, label_b, lam):
    label_a = check_soft_label(label_a, "label_a")
    label_b = check_soft_label(label_b, "label_b")
    if label_a.shape != label_b.shape:
        raise InvalidParameterError(
            f"labels must have the same length, got {label_a.size} and {label_b.size}"
        )
    return lam * label_a + (1.0 - lam) * label_b


def mixup(img_a, img_b, label_a, label_b, lam):
    """Convex combination of two images and their labels.

    Pixels are mixed in float64 and rounded half-to-even back to uint8.
    """
    img_a = check_image(img_a, "img_a")
    img_b = check_image(img_b, "img_b")
    check_same_shape(img_a, img_b)
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise InvalidParameterError(f"lambda must lie in [0, 1], got {lam}")
    label = _mix_labels(label_a, label_b, lam)
    mixed = lam * img_a.astype(np.float64) + (1.0 - lam) * img_b.astype(np.float64)
    return np.rint(mixed).astype(np.uint8), label


def cutmix(img_a, img_b, label_a, label_b, box, rng, return_info=False):
    """Paste a random ``box x box`` patch of ``img_b`` into ``img_a``.

    The label weight of ``img_a`` is the fraction of its area left intact,
    ``1 - box**2 / (width * height)``.
    """
    img_a = check_image(img_a, "img_a")
    img_b = check_image(img_b, "img_b")
    check_same_shape(img_a, img_b)
    height, width = img_a.shape[:2]
    rect = sample_box(rng, width, height, box)
    area = width * height
    lam = (area - rect.area) / area
    label = _mix_labels(label_a, label_b, lam)
    out = img_a.copy()
    out[rect.slices] = img_b[rect.slices]
    if return_info:
        return out, label, {"rect": rect, "lambda": lam}
    return out, label


def smooth_labels(onehot_class, n_classes, factor):
    """Label-smoothed target: ``factor`` of the mass spread evenly over classes."""
    if isinstance(n_classes, bool) or not isinstance(n_classes, (int, np.integer)) or n_classes < 2:
        raise InvalidParameterError(f"n_classes must be an integer >= 2, got {n_classes!r}")
    if (
        isinstance(onehot_class, bool)
        or not isinstance(onehot_class, (int, np.integer))
        or not 0 <= onehot_class < n_classes
    ):
        raise InvalidParameterError(f"class index {onehot_class!r} out of range [0, {n_classes})")
    factor = float(factor)
    if not 0.0 <= factor < 1.0:
        raise InvalidParameterError(f"smoothing factor must lie in [0, 1), got {factor}")
    probs = np.full(n_classes, factor / n_classes)
    # written as 1 - off-target mass so 0.05 over 10 classes gives exactly 0.955
    probs[onehot_class] = 1.0 - factor * (n_classes - 1) / n_classes
    return probs
