import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image as PILImage

from curriculum_augment import RngStream
from curriculum_augment.augment import Rect
from curriculum_augment.exceptions import DecodeError, InvalidParameterError, ShapeError
from curriculum_augment.imageio import (
    ImageFormat,
    center_crop,
    crop,
    decode,
    decode_bytes,
    encode_png,
    encode_png_bytes,
    random_crop,
    resize_bilinear,
    sniff_format,
)


def _pil_bytes(pil, fmt, **kw):
    buf = io.BytesIO()
    pil.save(buf, format=fmt, **kw)
    return buf.getvalue()


def test_png_round_trip_one_pixel(tmp_path):
    img = np.array([[[1, 2, 3]]], dtype=np.uint8)
    encode_png(img, tmp_path / "a" / "b.png")
    assert decode(tmp_path / "a" / "b.png").tolist() == [[[1, 2, 3]]]


@settings(max_examples=30, deadline=None)
@given(w=st.integers(1, 40), h=st.integers(1, 40), seed=st.integers(0, 1000))
def test_png_round_trip_lossless(w, h, seed):
    img = np.random.default_rng(seed).integers(0, 256, (h, w, 3), dtype=np.uint8)
    assert np.array_equal(decode_bytes(encode_png_bytes(img)), img)


def test_png_encoding_is_stable(make_image):
    img = make_image(30, 20)
    assert encode_png_bytes(img) == encode_png_bytes(img.copy())


def test_jpeg_decode_is_deterministic(make_image):
    data = _pil_bytes(PILImage.fromarray(make_image(32, 24)), "JPEG", quality=90)
    a, b = decode_bytes(data), decode_bytes(data)
    assert a.shape == (24, 32, 3) and np.array_equal(a, b)


def test_format_sniffed_not_from_extension(tmp_path, make_image):
    path = tmp_path / "really_a_png.jpg"
    path.write_bytes(encode_png_bytes(make_image(5, 5)))
    assert decode(path).shape == (5, 5, 3)
    assert sniff_format(path.read_bytes()) is ImageFormat.PNG


def test_grayscale_replicated():
    gray = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    out = decode_bytes(_pil_bytes(PILImage.fromarray(gray), "PNG"))
    assert np.array_equal(out, np.repeat(gray[..., None], 3, axis=2))


def test_alpha_composited_over_black():
    rgba = np.array([[[200, 100, 50, 255], [200, 100, 50, 0], [255, 255, 255, 128]]], dtype=np.uint8)
    out = decode_bytes(_pil_bytes(PILImage.fromarray(rgba), "PNG"))
    assert out.tolist() == [[[200, 100, 50], [0, 0, 0], [128, 128, 128]]]


def test_palette_decodes_to_rgb():
    pil = PILImage.new("P", (2, 1))
    pil.putpalette([10, 20, 30, 40, 50, 60] + [0] * 762)
    pil.putpixel((1, 0), 1)
    assert decode_bytes(_pil_bytes(pil, "PNG")).tolist() == [[[10, 20, 30], [40, 50, 60]]]


def test_missing_file_is_oserror(tmp_path):
    with pytest.raises(OSError):
        decode(tmp_path / "nope.png")


def test_unknown_signature():
    with pytest.raises(DecodeError, match="offset 0"):
        decode_bytes(b"GIF89a....")


def test_png_crc_error_reports_chunk_offset(make_image):
    data = bytearray(encode_png_bytes(make_image(8, 8)))
    data[20] ^= 0xFF  # inside IHDR payload, chunk starts at 8
    with pytest.raises(DecodeError) as err:
        decode_bytes(bytes(data))
    assert err.value.offset == 8 and "CRC" in str(err.value)


def test_png_truncated(make_image):
    data = encode_png_bytes(make_image(8, 8))
    with pytest.raises(DecodeError) as err:
        decode_bytes(data[:40])
    assert err.value.offset is not None and err.value.offset >= 8


def test_jpeg_truncated(make_image):
    data = _pil_bytes(PILImage.fromarray(make_image(16, 16)), "JPEG")
    with pytest.raises(DecodeError):
        decode_bytes(data[:30])


def test_resize_identity_is_copy(make_image):
    img = make_image(13, 9)
    out = resize_bilinear(img, 13, 9)
    assert np.array_equal(out, img) and out is not img


def test_resize_constant_stays_constant():
    img = np.full((17, 23, 3), 77, dtype=np.uint8)
    assert np.all(resize_bilinear(img, 256, 256) == 77)
    assert np.all(resize_bilinear(img, 5, 3) == 77)


def test_resize_upscale_2x_matches_half_pixel_formula():
    row = np.array([[[0, 0, 0], [100, 100, 100]]], dtype=np.uint8)
    out = resize_bilinear(row, 4, 1)[0, :, 0].tolist()
    # centers at -0.25 (clamped), 0.25, 0.75, 1.25 (clamped)
    assert out == [0, 25, 75, 100]


def test_resize_downscale_2x_averages_pairs():
    img = np.array([[[0] * 3, [10] * 3, [20] * 3, [40] * 3]], dtype=np.uint8)
    assert resize_bilinear(img, 2, 1)[0, :, 0].tolist() == [5, 30]


def test_resize_preserves_monotone_ramp():
    ramp = np.tile(np.arange(0, 250, 10, dtype=np.uint8)[None, :, None], (3, 1, 3))
    out = resize_bilinear(ramp, 61, 3)[1, :, 0].astype(int)
    assert np.all(np.diff(out) >= 0)


@pytest.mark.parametrize("w,h", [(0, 5), (5, -1), (2.0, 2)])
def test_resize_rejects(make_image, w, h):
    with pytest.raises(InvalidParameterError):
        resize_bilinear(make_image(4, 4), w, h)


def test_center_crop_offsets(make_image):
    img = make_image(256, 256)
    assert np.array_equal(center_crop(img, 224), img[16:240, 16:240])
    img = make_image(225, 225)
    assert np.array_equal(center_crop(img, 224), img[0:224, 0:224])


def test_random_crop_is_exact_window(make_image):
    img = make_image(40, 30)
    out = random_crop(img, 10, RngStream(3))
    rng = RngStream(3)
    dx, dy = rng.integers(31), rng.integers(21)
    assert np.array_equal(out, img[dy:dy + 10, dx:dx + 10])


def test_random_crop_covers_offsets(make_image):
    img = np.arange(5 * 5 * 3, dtype=np.uint8).reshape(5, 5, 3)
    rng = RngStream(0)
    corners = {tuple(random_crop(img, 3, rng)[0, 0]) for _ in range(500)}
    assert len(corners) == 9


def test_crop_errors(make_image):
    img = make_image(10, 10)
    with pytest.raises(InvalidParameterError):
        random_crop(img, 11, RngStream(0))
    with pytest.raises(InvalidParameterError):
        center_crop(img, 0)
    with pytest.raises(InvalidParameterError):
        crop(img, Rect(5, 5, 6, 1))
    assert crop(img, Rect(1, 2, 3, 4)).shape == (4, 3, 3)


def test_image_validation():
    with pytest.raises(ShapeError):
        encode_png_bytes(np.zeros((4, 4), dtype=np.uint8))
    with pytest.raises(ShapeError):
        encode_png_bytes(np.zeros((0, 4, 3), dtype=np.uint8))
    with pytest.raises(InvalidParameterError):
        encode_png_bytes(np.full((2, 2, 3), 300))
    assert encode_png_bytes(np.full((2, 2, 3), 7, dtype=np.int64))
