"""PNG/JPEG decoding, PNG encoding and geometric preprocessing.

Decoding is delegated to Pillow after a structural walk of the container
(PNG chunks with CRCs, JPEG marker segments) so malformed files are reported
with the byte offset where they go wrong.  Resizing is a plain separable
bilinear filter with half-pixel centers; Pillow's ``BILINEAR`` widens its
kernel when downscaling, so it is not used.
"""

import enum
import io
import os
import struct
import zlib

import numpy as np
from PIL import Image as PILImage

from .augment import Rect
from .exceptions import DecodeError, InvalidParameterError
from .rng import as_stream
from .validation import check_image

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
JPEG_SIGNATURE = b"\xff\xd8\xff"
PNG_COMPRESS_LEVEL = 6


class ImageFormat(enum.Enum):
    PNG = "png"
    JPEG = "jpeg"


def sniff_format(data):
    """Identify the container from its magic bytes; extensions are ignored."""
    if data.startswith(PNG_SIGNATURE):
        return ImageFormat.PNG
    if data.startswith(JPEG_SIGNATURE):
        return ImageFormat.JPEG
    raise DecodeError("unrecognized image signature (expected PNG or JPEG)", offset=0)


def _walk_png(data):
    pos = len(PNG_SIGNATURE)
    seen_ihdr = False
    while True:
        if pos + 8 > len(data):
            raise DecodeError("truncated PNG chunk header", offset=pos)
        length, ctype = struct.unpack(">I4s", data[pos:pos + 8])
        end = pos + 12 + length
        if end > len(data):
            raise DecodeError(f"truncated PNG chunk {ctype!r}", offset=pos)
        crc = struct.unpack(">I", data[end - 4:end])[0]
        if zlib.crc32(data[pos + 4:end - 4]) != crc:
            raise DecodeError(f"CRC mismatch in PNG chunk {ctype!r}", offset=pos)
        if not seen_ihdr and ctype != b"IHDR":
            raise DecodeError("PNG does not start with IHDR", offset=pos)
        seen_ihdr = True
        if ctype == b"IEND":
            return
        pos = end


def _walk_jpeg(data):
    # marker segments up to start-of-scan; entropy-coded data is left to the decoder
    pos = 2
    while True:
        if pos + 4 > len(data):
            raise DecodeError("truncated JPEG marker segment", offset=pos)
        if data[pos] != 0xFF:
            raise DecodeError("expected JPEG marker", offset=pos)
        marker = data[pos + 1]
        if marker == 0xFF:
            pos += 1
            continue
        if marker in (0xD8, 0x01) or 0xD0 <= marker <= 0xD7:
            pos += 2
            continue
        if marker == 0xD9:
            raise DecodeError("JPEG ends before any image data", offset=pos)
        (length,) = struct.unpack(">H", data[pos + 2:pos + 4])
        if length < 2 or pos + 2 + length > len(data):
            raise DecodeError(f"bad length in JPEG segment 0xFF{marker:02X}", offset=pos)
        if marker == 0xDA:
            return
        pos += 2 + length


def _to_rgb(pil):
    if pil.mode == "P":
        pil = pil.convert("RGBA" if "transparency" in pil.info else "RGB")
    if pil.mode in ("RGBA", "LA", "PA", "RGBa", "La"):
        rgba = np.asarray(pil.convert("RGBA"), dtype=np.uint16)
        alpha = rgba[..., 3:4]
        # composite over black, rounding to nearest
        return ((rgba[..., :3] * alpha + 127) // 255).astype(np.uint8)
    if pil.mode != "RGB":
        pil = pil.convert("RGB")
    return np.asarray(pil, dtype=np.uint8).copy()


def decode_bytes(data):
    fmt = sniff_format(data)
    if fmt is ImageFormat.PNG:
        _walk_png(data)
    else:
        _walk_jpeg(data)
    stream = io.BytesIO(data)
    try:
        with PILImage.open(stream) as pil:
            pil.load()
            return _to_rgb(pil)
    except DecodeError:
        raise
    except (OSError, SyntaxError, ValueError, struct.error, zlib.error) as exc:
        raise DecodeError(f"cannot decode {fmt.value}: {exc}", offset=stream.tell()) from exc


def decode(path):
    """Read a PNG or JPEG file as an ``(H, W, 3)`` uint8 RGB array.

    Grayscale is replicated across channels and alpha is composited over
    black.  Missing files raise ``OSError``; malformed ones ``DecodeError``.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    return decode_bytes(data)


def encode_png_bytes(img):
    img = check_image(img)
    buf = io.BytesIO()
    PILImage.fromarray(img).save(buf, format="PNG", compress_level=PNG_COMPRESS_LEVEL)
    return buf.getvalue()


def encode_png(img, path):
    """Write ``img`` as a lossless PNG with fixed settings (stable bytes)."""
    data = encode_png_bytes(img)
    directory = os.path.dirname(os.fspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(data)


def _source_coords(out_size, in_size):
    """Left neighbor index and interpolation weight for each output pixel."""
    scale = in_size / out_size
    src = (np.arange(out_size, dtype=np.float64) + 0.5) * scale - 0.5
    src = np.clip(src, 0.0, in_size - 1)
    left = np.minimum(np.floor(src).astype(np.intp), in_size - 1)
    right = np.minimum(left + 1, in_size - 1)
    return left, right, src - left


def resize_bilinear(img, out_w, out_h):
    """Bilinear resize with half-pixel centers, rounded half-to-even."""
    img = check_image(img)
    for name, value in (("out_w", out_w), ("out_h", out_h)):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
            raise InvalidParameterError(f"{name} must be a positive integer, got {value!r}")
    in_h, in_w = img.shape[:2]
    if (in_w, in_h) == (out_w, out_h):
        return img.copy()
    top, bottom, wy = _source_coords(out_h, in_h)
    left, right, wx = _source_coords(out_w, in_w)
    src = img.astype(np.float64)
    rows = src[top] * (1.0 - wy)[:, None, None] + src[bottom] * wy[:, None, None]
    out = rows[:, left] * (1.0 - wx)[None, :, None] + rows[:, right] * wx[None, :, None]
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def crop(img, rect):
    img = check_image(img)
    if not rect.fits_in(img.shape[1], img.shape[0]):
        raise InvalidParameterError(f"crop {rect} lies outside a {img.shape[1]}x{img.shape[0]} image")
    return img[rect.slices].copy()


def _check_crop(img, size):
    height, width = img.shape[:2]
    if isinstance(size, bool) or not isinstance(size, (int, np.integer)) or size < 1:
        raise InvalidParameterError(f"crop size must be a positive integer, got {size!r}")
    if size > width or size > height:
        raise InvalidParameterError(f"crop size {size} exceeds image {width}x{height}")
    return int(size)


def random_crop(img, size, rng):
    """Exact copy of a uniformly placed ``size x size`` window."""
    img = check_image(img)
    size = _check_crop(img, size)
    rng = as_stream(rng)
    dx = rng.integers(img.shape[1] - size + 1)
    dy = rng.integers(img.shape[0] - size + 1)
    return img[dy:dy + size, dx:dx + size].copy()


def center_crop(img, size):
    """``size x size`` window offset by ``floor((dim - size) / 2)`` on each axis."""
    img = check_image(img)
    size = _check_crop(img, size)
    dx = (img.shape[1] - size) // 2
    dy = (img.shape[0] - size) // 2
    return crop(img, Rect(dx, dy, size, size))
