"""Image decoding and conversion to color-basis tokens.

Every image is normalized to a 200x300 (width x height) RGB raster with
bicubic resampling before quantization, so each document contributes exactly
60000 color tokens.
"""

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .basis import TOTAL_BINS, quantize_array

TARGET_WIDTH = 200
TARGET_HEIGHT = 300
TOKENS_PER_IMAGE = TARGET_WIDTH * TARGET_HEIGHT


def open_image(source) -> Image.Image:
    """Open a path / file object / PIL image / numpy array as RGB."""
    if isinstance(source, Image.Image):
        return source.convert("RGB")
    if isinstance(source, np.ndarray):
        arr = source
        if arr.ndim == 2:
            arr = np.stack([arr] * 3, axis=-1)
        return Image.fromarray(arr.astype(np.uint8), "RGB")
    try:
        img = Image.open(source)
        img.load()
    except (UnidentifiedImageError, OSError) as exc:
        name = source if isinstance(source, (str, Path)) else "<stream>"
        raise ValueError(f"could not decode image {name}: {exc}") from exc
    return img.convert("RGB")


def to_rgb_array(source) -> np.ndarray:
    """(H, W, 3) uint8 array of the image at its native size."""
    return np.asarray(open_image(source), dtype=np.uint8)


def image_to_color_tokens(source) -> np.ndarray:
    """Resize to 200x300 bicubic, quantize each pixel; 60000 bin indices."""
    img = open_image(source)
    if img.width == 0 or img.height == 0:
        raise ValueError("empty image")
    resized = img.resize((TARGET_WIDTH, TARGET_HEIGHT), Image.Resampling.BICUBIC)
    px = np.asarray(resized, dtype=np.uint8)
    return quantize_array(px).reshape(-1)


def image_histogram(source) -> np.ndarray:
    """512-bin color count vector of the resized image (sums to 60000)."""
    tokens = image_to_color_tokens(source)
    return np.bincount(tokens, minlength=TOTAL_BINS)


def native_histogram(source) -> np.ndarray:
    """512-bin count vector at native resolution (no resize); used when
    scoring arbitrary images against topic histograms."""
    px = to_rgb_array(source)
    return np.bincount(quantize_array(px).reshape(-1), minlength=TOTAL_BINS)


def luma(px: np.ndarray) -> np.ndarray:
    """Rec. 709 luma of an (H, W, 3) uint8 array, rounded to uint8."""
    y = 0.2126 * px[..., 0] + 0.7152 * px[..., 1] + 0.0722 * px[..., 2]
    return np.rint(y).astype(np.uint8)


def is_gray(px: np.ndarray) -> bool:
    return bool((px[..., 0] == px[..., 1]).all() and (px[..., 1] == px[..., 2]).all())
