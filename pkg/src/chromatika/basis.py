"""The fixed 512-color basis: sRGB quantized to 8 bins per channel.

Bin index layout is r-major (``r_bin*64 + g_bin*8 + b_bin``) and the
representative color of a bin is its center (channel value ``32*coord + 16``).
Both choices are part of the on-disk file formats and must not change.
"""

from dataclasses import dataclass

import numpy as np

BINS_PER_CHANNEL = 8
TOTAL_BINS = BINS_PER_CHANNEL**3
_BIN_WIDTH = 256 // BINS_PER_CHANNEL


@dataclass(frozen=True)
class ColorBasis:
    bins_per_channel: int = BINS_PER_CHANNEL
    total_bins: int = TOTAL_BINS

    def quantize(self, rgb) -> int:
        return quantize_color(rgb)

    def representative(self, bin_index: int):
        return bin_representative(bin_index)


def quantize_color(rgb) -> int:
    """Map an sRGB triple (0-255 per channel) to its bin index in [0, 512)."""
    r, g, b = rgb
    for v in (r, g, b):
        if not 0 <= v <= 255:
            raise ValueError(f"channel value {v} outside [0, 255]")
    return (
        int(r) // _BIN_WIDTH * BINS_PER_CHANNEL**2
        + int(g) // _BIN_WIDTH * BINS_PER_CHANNEL
        + int(b) // _BIN_WIDTH
    )


def bin_representative(bin_index: int) -> tuple[int, int, int]:
    """Center color of a bin: channel value 32*coord + 16."""
    if not 0 <= bin_index < TOTAL_BINS:
        raise ValueError(f"bin index {bin_index} outside [0, {TOTAL_BINS})")
    r_bin, rem = divmod(int(bin_index), BINS_PER_CHANNEL**2)
    g_bin, b_bin = divmod(rem, BINS_PER_CHANNEL)
    half = _BIN_WIDTH // 2
    return (
        _BIN_WIDTH * r_bin + half,
        _BIN_WIDTH * g_bin + half,
        _BIN_WIDTH * b_bin + half,
    )


def quantize_array(pixels: np.ndarray) -> np.ndarray:
    """Vectorized quantize_color over an (..., 3) uint8/int array."""
    px = np.asarray(pixels)
    if px.shape[-1] != 3:
        raise ValueError("expected trailing dimension of 3 (RGB)")
    if px.min() < 0 or px.max() > 255:
        raise ValueError("channel values outside [0, 255]")
    coords = px.astype(np.int64) // _BIN_WIDTH
    return (
        coords[..., 0] * BINS_PER_CHANNEL**2
        + coords[..., 1] * BINS_PER_CHANNEL
        + coords[..., 2]
    )


def all_representatives() -> np.ndarray:
    """(512, 3) array of bin-center sRGB colors, in bin-index order."""
    return np.array([bin_representative(i) for i in range(TOTAL_BINS)], dtype=np.float64)
