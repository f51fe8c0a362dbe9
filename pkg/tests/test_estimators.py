import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline
from sklearn.utils.validation import NotFittedError

from curriculum_augment.estimators import ColorfulCutout, CutMix, Cutout, LabelSmoother, Mixup, Preprocessor
from curriculum_augment.exceptions import InvalidParameterError, ShapeError


@pytest.fixture
def batch():
    return np.random.default_rng(0).integers(0, 256, (6, 40, 40, 3), dtype=np.uint8)


def test_get_params_and_clone():
    est = ColorfulCutout(box=16, epoch=3, random_state=7)
    params = est.get_params()
    assert params["box"] == 16 and params["epoch"] == 3 and params["random_state"] == 7
    assert clone(est).get_params() == params


def test_colorful_cutout_transform(batch):
    est = ColorfulCutout(box=16, epoch=2, random_state=1).fit(batch)
    assert est.n_regions_ == 4
    out = est.transform(batch)
    assert out.shape == batch.shape and out.dtype == np.uint8
    assert np.array_equal(out, ColorfulCutout(box=16, epoch=2, random_state=1).fit_transform(batch))
    changed = np.any(out != batch, axis=-1).sum(axis=(1, 2))
    assert np.all(changed <= 256)


def test_epoch_changes_output(batch):
    est = ColorfulCutout(box=16, random_state=1).fit(batch)
    first = est.transform(batch)
    est.set_params(epoch=3)
    assert est.n_regions_ == 8
    assert not np.array_equal(first, est.transform(batch))


def test_list_input_returns_list(batch):
    images = list(batch)
    out = Cutout(box=8, random_state=0).fit_transform(images)
    assert isinstance(out, list) and len(out) == 6
    assert all(np.sum(np.all(o == 0, axis=-1)) >= 64 for o in out)


def test_not_fitted(batch):
    with pytest.raises(NotFittedError):
        Cutout().transform(batch)


def test_box_too_large(batch):
    with pytest.raises(InvalidParameterError, match="box exceeds image"):
        ColorfulCutout(box=64).fit(batch)


def test_sklearn_pipeline(batch):
    pipe = make_pipeline(
        Preprocessor(resize_to=36, crop_to=32, random_state=3),
        ColorfulCutout(box=8, epoch=1, random_state=3),
    )
    out = pipe.fit_transform(batch)
    assert out.shape == (6, 32, 32, 3)
    assert np.array_equal(out, clone(pipe).fit_transform(batch))
    pipe.set_params(colorfulcutout__epoch=4)
    assert pipe.named_steps["colorfulcutout"].n_regions_ == 16


def test_preprocessor_center_and_validation(batch):
    out = Preprocessor(resize_to=None, crop_to=32, crop_mode="center").fit_transform(batch)
    assert np.array_equal(out, batch[:, 4:36, 4:36])
    with pytest.raises(InvalidParameterError):
        Preprocessor(crop_mode="corner").fit()
    with pytest.raises(InvalidParameterError):
        Preprocessor(resize_to=10, crop_to=20).fit()


def test_label_smoother():
    out = LabelSmoother(factor=0.05, n_classes=10).fit_transform(np.array([0, 9]))
    assert out[0].tolist() == [0.955] + [0.005] * 9
    assert LabelSmoother().fit([0, 2, 1]).n_classes_ == 3


def test_mixup_fit_resample(batch):
    y = np.array([0, 1, 2, 0, 1, 2])
    X_out, Y = Mixup(alpha=0.4, random_state=5).fit_resample(batch, y)
    assert X_out.shape == batch.shape and Y.shape == (6, 3)
    assert np.allclose(Y.sum(axis=1), 1.0)
    X_again, Y_again = Mixup(alpha=0.4, random_state=5).fit_resample(batch, y)
    assert np.array_equal(X_out, X_again) and np.array_equal(Y, Y_again)


def test_cutmix_fit_resample_label_area(batch):
    y = np.array([0, 1, 0, 1, 0, 1])
    _, Y = CutMix(box=10, smoothing=0.0, random_state=2).fit_resample(batch, y)
    own = Y[np.arange(6), y]
    # each row keeps at least the intact-area share for its own class
    assert np.all(own >= 1 - 100 / 1600 - 1e-12)


def test_pair_mixer_errors(batch):
    with pytest.raises(ShapeError):
        Mixup().fit(batch, [0, 1])
    with pytest.raises(ShapeError):
        Mixup().fit([batch[0], batch[1][:30]], [0, 1])
    with pytest.raises(InvalidParameterError):
        CutMix(box=50).fit(batch, np.zeros(6, dtype=int))
