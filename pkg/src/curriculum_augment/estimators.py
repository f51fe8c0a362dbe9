"""scikit-learn compatible wrappers around the augmentation functions.

The transformers take a batch of images, either a ``(n, H, W, 3)`` uint8
array or a list of ``(H, W, 3)`` arrays, and return the same container type.
Sample ``i`` of a batch is augmented with the stream seeded by
``derive_seed(random_state, epoch, i)``, so a transform is reproducible and
the curriculum advances with ``set_params(epoch=...)``.

Mixup and CutMix change the targets as well as the images, so they expose
``fit_resample(X, y) -> (X_aug, Y_soft)`` instead of ``transform``.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import imageio
from .augment import colorful_cutout_regions, cutmix, cutout, mixup, sample_lambda, smooth_labels
from .curriculum import CurriculumSchedule
from .exceptions import InvalidParameterError, ShapeError
from .rng import RngStream, check_seed, derive_seed
from .validation import check_images, check_positive_int


def _restack(like, images):
    if isinstance(like, np.ndarray) and like.ndim == 4:
        return np.stack(images)
    return images


def _check_fits(images, size, what):
    for i, img in enumerate(images):
        if size > img.shape[0] or size > img.shape[1]:
            raise InvalidParameterError(
                f"{what} exceeds image: {size}px on image {i} of size {img.shape[1]}x{img.shape[0]}"
            )


class _SeededAugmenter(BaseEstimator):
    def _fit_seed(self):
        self.seed_ = check_seed(self.random_state)
        check_positive_int(self.epoch, "epoch", minimum=0)

    def _stream(self, index):
        return RngStream(derive_seed(self.seed_, self.epoch, index))


class ColorfulCutout(TransformerMixin, _SeededAugmenter):
    """Curriculum colorful cutout.

    Parameters
    ----------
    box : int, default=32
        Side of the square erasure box.
    epoch : int, default=0
        Current training epoch; sets the number of sub-regions.
    base, growth_factor, max_regions : int
        Curriculum schedule; the defaults give ``2 ** epoch`` regions capped
        at 256.
    random_state : int or None
        Seed for the per-sample streams.  ``None`` picks one at fit time.

    Attributes
    ----------
    schedule_ : CurriculumSchedule
    seed_ : int
    """

    def __init__(self, box=32, epoch=0, base=1, growth_factor=2, max_regions=256, random_state=None):
        self.box = box
        self.epoch = epoch
        self.base = base
        self.growth_factor = growth_factor
        self.max_regions = max_regions
        self.random_state = random_state

    def fit(self, X, y=None):
        images = check_images(X)
        _check_fits(images, self.box, "box")
        self.schedule_ = CurriculumSchedule(self.base, self.growth_factor, self.max_regions, self.box)
        self._fit_seed()
        return self

    @property
    def n_regions_(self):
        check_is_fitted(self, "schedule_")
        return self.schedule_.regions_for_epoch(self.epoch)

    def transform(self, X):
        check_is_fitted(self, "schedule_")
        images = check_images(X)
        _check_fits(images, self.box, "box")
        n_regions = self.schedule_.regions_for_epoch(self.epoch)
        out = [
            colorful_cutout_regions(img, self.box, n_regions, self._stream(i))
            for i, img in enumerate(images)
        ]
        return _restack(X, out)


class Cutout(TransformerMixin, _SeededAugmenter):
    """Zero out one random ``box x box`` square per image."""

    def __init__(self, box=32, epoch=0, random_state=None):
        self.box = box
        self.epoch = epoch
        self.random_state = random_state

    def fit(self, X, y=None):
        _check_fits(check_images(X), self.box, "box")
        self._fit_seed()
        return self

    def transform(self, X):
        check_is_fitted(self, "seed_")
        images = check_images(X)
        _check_fits(images, self.box, "box")
        return _restack(X, [cutout(img, self.box, self._stream(i)) for i, img in enumerate(images)])


class Preprocessor(TransformerMixin, _SeededAugmenter):
    """Resize to ``resize_to`` squared, then crop to ``crop_to`` (random or center)."""

    def __init__(self, resize_to=256, crop_to=224, crop_mode="random", epoch=0, random_state=None):
        self.resize_to = resize_to
        self.crop_to = crop_to
        self.crop_mode = crop_mode
        self.epoch = epoch
        self.random_state = random_state

    def fit(self, X=None, y=None):
        if self.crop_mode not in ("random", "center"):
            raise InvalidParameterError(f"crop_mode must be 'random' or 'center', got {self.crop_mode!r}")
        if self.resize_to is not None and self.crop_to is not None and self.crop_to > self.resize_to:
            raise InvalidParameterError(f"crop_to {self.crop_to} exceeds resize_to {self.resize_to}")
        self._fit_seed()
        return self

    def transform(self, X):
        check_is_fitted(self, "seed_")
        out = []
        for i, img in enumerate(check_images(X)):
            if self.resize_to is not None:
                img = imageio.resize_bilinear(img, self.resize_to, self.resize_to)
            if self.crop_to is not None:
                if self.crop_mode == "random":
                    img = imageio.random_crop(img, self.crop_to, self._stream(i))
                else:
                    img = imageio.center_crop(img, self.crop_to)
            out.append(img)
        return _restack(X, out)


def _soft_targets(y, n_classes, smoothing):
    y = np.asarray(y)
    if y.ndim == 2:
        if n_classes is not None and y.shape[1] != n_classes:
            raise ShapeError(f"soft labels have {y.shape[1]} classes, expected {n_classes}")
        return y.astype(np.float64)
    if y.ndim != 1:
        raise ShapeError(f"y must be class indices (1-D) or soft labels (2-D), got shape {y.shape}")
    return np.stack([smooth_labels(int(c), n_classes, smoothing) for c in y])


class LabelSmoother(TransformerMixin, BaseEstimator):
    """Turn class indices into label-smoothed probability vectors.

    Parameters
    ----------
    factor : float, default=0.05
        Probability mass spread uniformly over all classes.
    n_classes : int or None
        Inferred as ``max(y) + 1`` at fit time when ``None``.
    """

    def __init__(self, factor=0.05, n_classes=None):
        self.factor = factor
        self.n_classes = n_classes

    def fit(self, y, _=None):
        y = np.asarray(y)
        if y.ndim != 1 or y.size == 0:
            raise ShapeError("y must be a non-empty 1-D array of class indices")
        self.n_classes_ = self.n_classes if self.n_classes is not None else max(int(y.max()) + 1, 2)
        return self

    def transform(self, y):
        check_is_fitted(self, "n_classes_")
        return _soft_targets(y, self.n_classes_, self.factor)


class _PairMixer(_SeededAugmenter):
    """Pairs each sample with a partner drawn uniformly from the batch."""

    def fit(self, X, y):
        images = check_images(X)
        self._check_images(images)
        y = np.asarray(y)
        if len(y) != len(images):
            raise ShapeError(f"X has {len(images)} samples but y has {len(y)}")
        if self.n_classes is not None:
            self.n_classes_ = self.n_classes
        elif y.ndim == 2:
            self.n_classes_ = y.shape[1]
        else:
            self.n_classes_ = max(int(y.max()) + 1, 2)
        self._fit_seed()
        return self

    def _check_images(self, images):
        shape = images[0].shape
        if any(img.shape != shape for img in images):
            raise ShapeError("all images in a batch must have the same dimensions")

    def fit_resample(self, X, y):
        self.fit(X, y)
        return self.resample(X, y)

    def resample(self, X, y):
        check_is_fitted(self, "seed_")
        images = check_images(X)
        self._check_images(images)
        targets = _soft_targets(y, self.n_classes_, self.smoothing)
        if len(targets) != len(images):
            raise ShapeError(f"X has {len(images)} samples but y has {len(targets)}")
        out_images, out_labels = [], []
        for i, img in enumerate(images):
            rng = self._stream(i)
            j = rng.integers(len(images))
            mixed, label = self._mix(img, images[j], targets[i], targets[j], rng)
            out_images.append(mixed)
            out_labels.append(label)
        return _restack(X, out_images), np.stack(out_labels)


class Mixup(_PairMixer):
    """Mixup with ``lambda ~ Beta(alpha, alpha)`` per sample."""

    def __init__(self, alpha=0.2, n_classes=None, smoothing=0.0, epoch=0, random_state=None):
        self.alpha = alpha
        self.n_classes = n_classes
        self.smoothing = smoothing
        self.epoch = epoch
        self.random_state = random_state

    def _mix(self, img_a, img_b, label_a, label_b, rng):
        return mixup(img_a, img_b, label_a, label_b, sample_lambda(rng, self.alpha))


class CutMix(_PairMixer):
    """CutMix with a fixed ``box x box`` patch and area-proportional labels."""

    def __init__(self, box=32, n_classes=None, smoothing=0.0, epoch=0, random_state=None):
        self.box = box
        self.n_classes = n_classes
        self.smoothing = smoothing
        self.epoch = epoch
        self.random_state = random_state

    def _check_images(self, images):
        super()._check_images(images)
        _check_fits(images[:1], self.box, "box")

    def _mix(self, img_a, img_b, label_a, label_b, rng):
        return cutmix(img_a, img_b, label_a, label_b, self.box, rng)
